#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "qpp/numlin.hpp"
#include "qpp/rng.hpp"
#include "qpp/types.hpp"

namespace qpp::pairs {

using numlin::op_norm;

/// Validated quasi-projection pair: P a projection, Q an idempotent, with
/// Q^* = (2P - I) Q (2P - I).
template <typename Real>
struct QuasiPair {
  CMat<Real> P;
  CMat<Real> Q;
  Real char_residual = Real(0);

  Index size() const { return P.rows(); }
};

/// Outcome of verify_pair: either an accepted QuasiPair or a typed rejection
/// naming the first failed invariant. All characterization residuals are
/// reported either way.
template <typename Real>
struct PairCheck {
  bool accepted = false;
  std::string failed_invariant;
  Real p_residual = Real(0);    // projection defect of P
  Real q_residual = Real(0);    // idempotency defect of Q
  Real def_residual = Real(0);  // block-condition characterization
  Real sym_residual = Real(0);  // Q^* - (2P-I) Q (2P-I)
  Real abs_residual = Real(0);  // |Q^*| - (2P-I) |Q| (2P-I)
  std::optional<QuasiPair<Real>> pair;
};

/// Checks (P, Q) against all three equivalent characterizations of a
/// quasi-projection pair and accepts iff every residual clears the threshold.
template <typename DP, typename DQ>
PairCheck<numlin::RealOf<DP>> verify_pair(const Eigen::MatrixBase<DP>& Pin,
                                          const Eigen::MatrixBase<DQ>& Qin,
                                          const Tolerances<numlin::RealOf<DP>>& tol = {}) {
  using Real = numlin::RealOf<DP>;
  tol.validate();
  numlin::check_finite(Pin, "verify_pair");
  numlin::check_finite(Qin, "verify_pair");
  if (Pin.rows() != Pin.cols() || Qin.rows() != Qin.cols() || Pin.rows() != Qin.rows())
    throw InputError("verify_pair: P and Q must be square and of equal size");
  const CMat<Real> P = Pin.template cast<std::complex<Real>>();
  const CMat<Real> Q = Qin.template cast<std::complex<Real>>();
  const Index n = P.rows();
  PairCheck<Real> out;
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  out.p_residual = std::max(op_norm((P * P - P).eval()), numlin::herm_gap(P));
  out.q_residual = op_norm((Q * Q - Q).eval());
  if (out.p_residual >= tol.residual_tol) {
    out.failed_invariant = "P is not a projection";
    return out;
  }
  if (out.q_residual >= tol.residual_tol) {
    out.failed_invariant = "Q is not idempotent";
    return out;
  }
  const CMat<Real> Qs = Q.adjoint();
  const CMat<Real> S = Real(2) * P - I;
  const CMat<Real> C = I - P;
  out.def_residual =
      std::max({op_norm((P * Qs * P - P * Q * P).eval()),
                op_norm((P * Qs * C + P * Q * C).eval()),
                op_norm((C * Qs * C - C * Q * C).eval())});
  out.sym_residual = op_norm((Qs - S * Q * S).eval());
  const CMat<Real> absQ = numlin::psd_sqrt((Qs * Q), tol);
  const CMat<Real> absQs = numlin::psd_sqrt((Q * Qs), tol);
  out.abs_residual = op_norm((absQs - S * absQ * S).eval());
  if (out.def_residual >= tol.residual_tol || out.sym_residual >= tol.residual_tol ||
      out.abs_residual >= tol.residual_tol) {
    out.failed_invariant = "characterization";
    return out;
  }
  out.accepted = true;
  out.pair = QuasiPair<Real>{P, Q, out.sym_residual};
  return out;
}

/// The eight pairs {P, I-P} x {Q, Q^*, I-Q, I-Q^*}; membership of one implies
/// membership of all, so every element is re-validated.
template <typename Real>
std::array<QuasiPair<Real>, 8> sigma_closure(const QuasiPair<Real>& pair,
                                             const Tolerances<Real>& tol = {}) {
  const Index n = pair.size();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real> As[2] = {pair.P, I - pair.P};
  const CMat<Real> Bs[4] = {pair.Q, pair.Q.adjoint(), I - pair.Q,
                            I - pair.Q.adjoint()};
  std::array<QuasiPair<Real>, 8> out;
  int k = 0;
  for (const auto& A : As)
    for (const auto& B : Bs) {
      PairCheck<Real> chk = verify_pair(A, B, tol);
      if (!chk.accepted)
        throw NumericalError("sigma_closure: derived pair failed to validate (" +
                             chk.failed_invariant + ")");
      out[k++] = *chk.pair;
    }
  return out;
}

/// Hermitian projection onto the range of an idempotent, computed as
/// Q (Q + Q^* - I)^{-1}.
template <typename Derived>
CMat<numlin::RealOf<Derived>> range_projection_of_idempotent(
    const Eigen::MatrixBase<Derived>& Qin,
    const Tolerances<numlin::RealOf<Derived>>& tol = {}) {
  using Real = numlin::RealOf<Derived>;
  tol.validate();
  numlin::check_finite(Qin, "range_projection_of_idempotent");
  if (Qin.rows() != Qin.cols())
    throw InputError("range_projection_of_idempotent: matrix must be square");
  const CMat<Real> Q = Qin.template cast<std::complex<Real>>();
  if (Q.rows() == 0) return Q;
  if (op_norm((Q * Q - Q).eval()) >= tol.residual_tol)
    throw InputError("range_projection_of_idempotent: Q is not idempotent");
  const CMat<Real> G = Q + Q.adjoint() - CMat<Real>::Identity(Q.rows(), Q.cols());
  Eigen::JacobiSVD<CMat<Real>> svd(G);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= tol.rank_rel_tol * s(0))
    throw NumericalError(
        "range_projection_of_idempotent: Q + Q^* - I is numerically singular");
  // X = Q G^{-1}; G is Hermitian, so solve G X^* = Q^* and take the adjoint.
  CMat<Real> X = G.partialPivLu().solve(Q.adjoint().eval()).adjoint();
  return (X + X.adjoint()) / Real(2);
}

/// Matched projection of an idempotent together with its construction
/// intermediates.
template <typename Real>
struct MatchedResult {
  CMat<Real> mQ;
  CMat<Real> absQstar;       // |Q^*|
  CMat<Real> absQstar_pinv;  // |Q^*|^dag
  CMat<Real> range_proj;     // projection onto R(Q)
  Real pinv_crosscheck = Real(0);
  Real projection_residual = Real(0);
  QuasiPair<Real> pair;  // (m(Q), Q), validated
};

/// m(Q) = (1/2)(|Q^*| + Q^*) |Q^*|^dag (|Q^*| + I)^{-1} (|Q^*| + Q).
/// The pseudoinverse is computed twice, directly and through
/// (P_{R(Q)} P_{R(Q^*)} P_{R(Q)})^{1/2}; the two routes must agree.
template <typename Derived>
MatchedResult<numlin::RealOf<Derived>> matched_projection(
    const Eigen::MatrixBase<Derived>& Qin,
    const Tolerances<numlin::RealOf<Derived>>& tol = {}) {
  using Real = numlin::RealOf<Derived>;
  tol.validate();
  numlin::check_finite(Qin, "matched_projection");
  if (Qin.rows() != Qin.cols())
    throw InputError("matched_projection: matrix must be square");
  const CMat<Real> Q = Qin.template cast<std::complex<Real>>();
  const Index n = Q.rows();
  if (op_norm((Q * Q - Q).eval()) >= tol.residual_tol)
    throw InputError("matched_projection: Q is not idempotent");
  MatchedResult<Real> out;
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  out.absQstar = numlin::psd_sqrt((Q * Q.adjoint()), tol);
  out.absQstar_pinv = numlin::pinv(out.absQstar, tol);
  out.range_proj = numlin::projector(numlin::range_space(Q, tol));
  const CMat<Real> range_proj_star =
      numlin::projector(numlin::range_space(Q.adjoint(), tol));
  const CMat<Real> alt = numlin::psd_sqrt(
      out.range_proj * range_proj_star * out.range_proj, tol);
  out.pinv_crosscheck = op_norm((out.absQstar_pinv - alt).eval());
  if (out.pinv_crosscheck >= tol.residual_tol)
    throw NumericalError(
        "matched_projection: the two pseudoinverse routes disagree");
  CMat<Real> mQ = Real(0.5) * (out.absQstar + Q.adjoint()) * out.absQstar_pinv *
                  (out.absQstar + I).llt().solve(I) * (out.absQstar + Q);
  out.mQ = (mQ + mQ.adjoint()) / Real(2);
  out.projection_residual =
      std::max(op_norm((out.mQ * out.mQ - out.mQ).eval()), numlin::herm_gap(out.mQ));
  PairCheck<Real> chk = verify_pair(out.mQ, Q, tol);
  if (!chk.accepted)
    throw NumericalError("matched_projection: (m(Q), Q) failed to validate (" +
                         chk.failed_invariant + ")");
  out.pair = *chk.pair;
  return out;
}

/// Doubled-dimension pair from a Hermitian A with A^2 - A >= 0:
/// P = diag(I, 0), Q = [[A, -l(A)], [l(A), I - A]] with l(A) = (A^2 - A)^{1/2}.
template <typename Derived>
QuasiPair<numlin::RealOf<Derived>> build_from_A(
    const Eigen::MatrixBase<Derived>& Ain,
    const Tolerances<numlin::RealOf<Derived>>& tol = {}) {
  using Real = numlin::RealOf<Derived>;
  tol.validate();
  numlin::check_finite(Ain, "build_from_A");
  if (Ain.rows() != Ain.cols()) throw InputError("build_from_A: matrix must be square");
  const CMat<Real> A = Ain.template cast<std::complex<Real>>();
  const Real scale = std::max(Real(1), A.cwiseAbs().maxCoeff());
  if (numlin::herm_gap(A) > tol.residual_tol * scale)
    throw InputError("build_from_A: A must be Hermitian");
  const Index m = A.rows();
  CMat<Real> ell;
  try {
    ell = numlin::psd_sqrt((A * A - A), tol);
  } catch (const NumericalError&) {
    throw NumericalError("build_from_A: A-family precondition violated (A^2 - A not PSD)");
  }
  CMat<Real> P = CMat<Real>::Zero(2 * m, 2 * m);
  P.topLeftCorner(m, m).setIdentity();
  CMat<Real> Q(2 * m, 2 * m);
  Q.topLeftCorner(m, m) = A;
  Q.topRightCorner(m, m) = -ell;
  Q.bottomLeftCorner(m, m) = ell;
  Q.bottomRightCorner(m, m) = CMat<Real>::Identity(m, m) - A;
  PairCheck<Real> chk = verify_pair(P, Q, tol);
  if (!chk.accepted)
    throw NumericalError("build_from_A: constructed pair failed to validate (" +
                         chk.failed_invariant + ")");
  return *chk.pair;
}

/// Krein-symmetry construction: (J_+, Q) with J_+ = (I + J)/2 is a
/// quasi-projection pair exactly when Q is a weighted projection for J,
/// i.e. (JQ)^* = JQ.
template <typename Real>
struct KreinResult {
  bool accepted = false;
  Real weighted_residual = Real(0);  // ||(JQ)^* - JQ||
  std::optional<QuasiPair<Real>> pair;
};

template <typename DJ, typename DQ>
KreinResult<numlin::RealOf<DJ>> build_krein(const Eigen::MatrixBase<DJ>& Jin,
                                            const Eigen::MatrixBase<DQ>& Qin,
                                            const Tolerances<numlin::RealOf<DJ>>& tol = {}) {
  using Real = numlin::RealOf<DJ>;
  tol.validate();
  numlin::check_finite(Jin, "build_krein");
  numlin::check_finite(Qin, "build_krein");
  if (Jin.rows() != Jin.cols() || Qin.rows() != Qin.cols() || Jin.rows() != Qin.rows())
    throw InputError("build_krein: J and Q must be square and of equal size");
  const CMat<Real> J = Jin.template cast<std::complex<Real>>();
  const CMat<Real> Q = Qin.template cast<std::complex<Real>>();
  const Index n = J.rows();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  if (numlin::herm_gap(J) > tol.residual_tol ||
      op_norm((J * J - I).eval()) > tol.residual_tol)
    throw InputError("build_krein: J is not a symmetry");
  if (op_norm((Q * Q - Q).eval()) >= tol.residual_tol)
    throw InputError("build_krein: Q is not idempotent");
  KreinResult<Real> out;
  out.weighted_residual = numlin::herm_gap((J * Q).eval());
  const CMat<Real> Jplus = (I + J) / Real(2);
  PairCheck<Real> chk = verify_pair(Jplus, Q, tol);
  out.accepted = out.weighted_residual < tol.residual_tol;
  if (out.accepted != chk.accepted)
    throw NumericalError(
        "build_krein: weighted-projection verdict disagrees with pair validation");
  if (out.accepted) out.pair = *chk.pair;
  return out;
}

/// The closed-form projection family of the idempotent Q = [[1, a], [0, 0]]
/// (a != 0): the projections P with (P, Q) a quasi-projection pair are
/// exactly m(Q) and I - m(Q). The four slots list the solutions in both
/// orders, P[0] = m(Q), P[1] = I - m(Q), P[2] = I - P[0], P[3] = I - P[1];
/// every slot validates against Q.
template <typename Real>
struct TwoByTwoFamily {
  CMat<Real> Q;
  std::array<CMat<Real>, 4> P;
  Real matched_gap = Real(0);  // distance of P[0] from matched_projection(Q)
};

template <typename Real>
TwoByTwoFamily<Real> two_by_two_family(std::complex<Real> a,
                                       const Tolerances<Real>& tol = {}) {
  tol.validate();
  if (std::abs(a) == Real(0))
    throw InputError("two_by_two_family: a must be nonzero (Q would be a projection)");
  TwoByTwoFamily<Real> out;
  const Real b = std::sqrt(Real(1) + std::norm(a));
  out.Q = CMat<Real>::Zero(2, 2);
  out.Q(0, 0) = Real(1);
  out.Q(0, 1) = a;
  CMat<Real> P0(2, 2), P1(2, 2);
  P0 << b + Real(1), a, std::conj(a), b - Real(1);
  P1 << b - Real(1), -a, -std::conj(a), b + Real(1);
  P0 /= Real(2) * b;
  P1 /= Real(2) * b;
  const CMat<Real> I = CMat<Real>::Identity(2, 2);
  out.P = {P0, P1, I - P0, I - P1};
  for (const auto& P : out.P) {
    PairCheck<Real> chk = verify_pair(P, out.Q, tol);
    if (!chk.accepted)
      throw NumericalError("two_by_two_family: closed-form pair failed to validate");
  }
  out.matched_gap = op_norm((out.P[0] - matched_projection(out.Q, tol).mQ).eval());
  if (out.matched_gap >= tol.residual_tol)
    throw NumericalError("two_by_two_family: P0 does not match m(Q)");
  return out;
}

/// Sampling report for the extremal-distance inequalities
/// ||m(Q) - Q|| <= ||P - Q|| <= ||I - m(Q) - Q|| over random projections P.
struct ProbeReport {
  double min_dist = 0.0;
  double max_dist = 0.0;
  double lower_bound = 0.0;  // ||m(Q) - Q||
  double upper_bound = 0.0;  // ||I - m(Q) - Q||
  long violations = 0;
};

/// Samples Haar-random projections of every rank and checks both inequalities
/// with a fixed 1e-9 slack. Deterministic for a given seed.
inline ProbeReport distance_extremality_probe(const CMatd& Q, long samples,
                                              std::uint64_t seed,
                                              const Tolerances<double>& tol = {}) {
  tol.validate();
  numlin::check_finite(Q, "distance_extremality_probe");
  if (Q.rows() != Q.cols())
    throw InputError("distance_extremality_probe: matrix must be square");
  if (op_norm((Q * Q - Q).eval()) >= tol.residual_tol)
    throw InputError("distance_extremality_probe: Q is not idempotent");
  const Index n = Q.rows();
  const CMatd mQ = matched_projection(Q, tol).mQ;
  const CMatd I = CMatd::Identity(n, n);
  ProbeReport rep;
  rep.lower_bound = op_norm((mQ - Q).eval());
  rep.upper_bound = op_norm((I - mQ - Q).eval());
  rep.min_dist = std::numeric_limits<double>::infinity();
  rep.max_dist = 0.0;
  rng::Rng gen(seed);
  const double slack = 1e-9;
  for (long i = 0; i < samples; ++i) {
    const CMatd P = rng::haar_projection_any_rank(n, gen);
    const double d = op_norm((P - Q).eval());
    rep.min_dist = std::min(rep.min_dist, d);
    rep.max_dist = std::max(rep.max_dist, d);
    if (d < rep.lower_bound - slack || d > rep.upper_bound + slack) ++rep.violations;
  }
  if (samples == 0) rep.min_dist = rep.lower_bound;
  return rep;
}

}  // namespace qpp::pairs
