#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "qpp/numlin.hpp"
#include "qpp/pairs.hpp"
#include "qpp/types.hpp"

namespace qpp::anatomy {

using numlin::op_norm;
using pairs::QuasiPair;

/// Everything derived from one quasi-projection pair: the six operators
/// T1 = P(I-Q), T2 = (I-P)Q, T3 = PQ(I-P), T4 = (I-P)QP and the twisted
/// variants T1~ = T1(2P-I), T2~ = -T2(2P-I); the polar factors of T1, T2;
/// the six submodules H1 = R(P) n R(Q), H2 = R(P) n N(Q), H3 = N(P) n R(Q),
/// H4 = N(P) n N(Q), H5 = cl R(T3), H6 = cl R(T4); and M = cl R(P - Q).
template <typename Real>
struct PairAnatomy {
  CMat<Real> P, Q;
  CMat<Real> T1, T2, T3, T4, T1tilde, T2tilde;
  PolarParts<Real> polar1, polar2;
  Subspace<Real> H1, H2, H3, H4, H5, H6, M;
  Real h1_cross_gap = Real(0);  // H1 recomputed against R(Q^*)
  Real h4_cross_gap = Real(0);  // H4 recomputed against N(Q^*)

  const CMat<Real>& V1() const { return polar1.V; }
  const CMat<Real>& V2() const { return polar2.V; }
};

/// Rounding-noise floor for operators assembled by multiplying and
/// cancelling P and Q; far below residual_tol, far above accumulated eps.
template <typename Real>
Real noise_floor(const CMat<Real>& P, const CMat<Real>& Q) {
  const Real sp = std::max(Real(1), P.cwiseAbs().maxCoeff());
  const Real sq = std::max(Real(1), Q.cwiseAbs().maxCoeff());
  return Real(1e-12) * sp * sq;
}

template <typename Real>
PairAnatomy<Real> anatomize(const QuasiPair<Real>& pair, const Tolerances<Real>& tol = {}) {
  tol.validate();
  const Index n = pair.size();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real>&P = pair.P, &Q = pair.Q;
  const CMat<Real> C = I - P;
  const CMat<Real> S = Real(2) * P - I;
  const Real floor = noise_floor(P, Q);
  using numlin::snap_zero;
  PairAnatomy<Real> a;
  a.P = P;
  a.Q = Q;
  a.T1 = snap_zero<Real>(P * (I - Q), floor);
  a.T2 = snap_zero<Real>(C * Q, floor);
  a.T3 = snap_zero<Real>(P * Q * C, floor);
  a.T4 = snap_zero<Real>(C * Q * P, floor);
  a.T1tilde = a.T1 * S;
  a.T2tilde = -a.T2 * S;
  a.polar1 = numlin::polar(a.T1, tol);
  a.polar2 = numlin::polar(a.T2, tol);
  const Subspace<Real> RP = numlin::range_space(P, tol);
  const Subspace<Real> NP = numlin::null_space(P, tol);
  const Subspace<Real> RQ = numlin::range_space(Q, tol);
  const Subspace<Real> NQ = numlin::null_space(Q, tol);
  const Subspace<Real> RQs = numlin::range_space(Q.adjoint(), tol);
  const Subspace<Real> NQs = numlin::null_space(Q.adjoint(), tol);
  a.H1 = numlin::subspace_meet(RP, RQ, tol);
  a.H2 = numlin::subspace_meet(RP, NQ, tol);
  a.H3 = numlin::subspace_meet(NP, RQ, tol);
  a.H4 = numlin::subspace_meet(NP, NQ, tol);
  a.h1_cross_gap = numlin::subspace_gap(a.H1, numlin::subspace_meet(RP, RQs, tol));
  a.h4_cross_gap = numlin::subspace_gap(a.H4, numlin::subspace_meet(NP, NQs, tol));
  a.H5 = numlin::range_space(a.T3, tol);
  a.H6 = numlin::range_space(a.T4, tol);
  a.M = numlin::range_space(snap_zero<Real>(P - Q, floor), tol);
  return a;
}

template <typename Real>
void require_consistent(const PairAnatomy<Real>& a, const QuasiPair<Real>& pair,
                        const Tolerances<Real>& tol) {
  if (a.P.rows() != pair.P.rows() ||
      op_norm((a.P - pair.P).eval()) > tol.residual_tol ||
      op_norm((a.Q - pair.Q).eval()) > tol.residual_tol)
    throw InputError("anatomy does not belong to the given pair");
}

/// Residuals of the orthogonal decompositions that characterize a
/// semi-harmonious pair (all automatic in finite dimension):
///   P            = P_{cl R(T1)}    + P_{H1}
///   P_{R(Q)}     = P_{cl R(T2~*)}  + P_{H1}
///   I - P        = P_{cl R(T2)}    + P_{H4}
///   P_{N(Q)}     = P_{cl R(T1~*)}  + P_{H4}
/// plus rank additivity of l1 T1 + l2 T2 and the two kernel-sum identities
///   N(T4) = N(P) + H1 + H2,   N[(I-Q)(I-P)] = R(P) + H3.
template <typename Real>
CertReport<Real> certify_semiharmony(const PairAnatomy<Real>& a,
                                     const QuasiPair<Real>& pair,
                                     const Tolerances<Real>& tol = {}) {
  tol.validate();
  require_consistent(a, pair, tol);
  const Index n = pair.size();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real>&P = pair.P, &Q = pair.Q;
  using numlin::projector;
  using numlin::range_space;
  CertReport<Real> rep;
  rep.tol = tol.residual_tol;

  const CMat<Real> PT1 = projector(range_space(a.T1, tol));
  const CMat<Real> PT2 = projector(range_space(a.T2, tol));
  const CMat<Real> PT1ts = projector(range_space(a.T1tilde.adjoint(), tol));
  const CMat<Real> PT2ts = projector(range_space(a.T2tilde.adjoint(), tol));
  const CMat<Real> P1 = projector(a.H1);
  const CMat<Real> P4 = projector(a.H4);
  const CMat<Real> PRQ = projector(range_space(Q, tol));
  const CMat<Real> PNQ = projector(numlin::null_space(Q, tol));

  rep.add("p_decomposition", op_norm((P - (PT1 + P1)).eval()));
  rep.add("rangeQ_decomposition", op_norm((PRQ - (PT2ts + P1)).eval()));
  rep.add("complement_decomposition", op_norm((I - P - (PT2 + P4)).eval()));
  rep.add("nullQ_decomposition", op_norm((PNQ - (PT1ts + P4)).eval()));

  // rank additivity over a small grid of nonzero coefficient pairs
  const Index r1 = numlin::rank_of(a.T1, tol), r2 = numlin::rank_of(a.T2, tol);
  const std::complex<Real> lams[4] = {{Real(1), Real(0)},
                                      {Real(-1), Real(0)},
                                      {Real(2), Real(0)},
                                      {Real(0), Real(1)}};
  Index worst = 0;
  for (const auto& l1 : lams)
    for (const auto& l2 : lams) {
      const Index r = numlin::rank_of((l1 * a.T1 + l2 * a.T2).eval(), tol);
      worst = std::max<Index>(worst, std::abs(r - (r1 + r2)));
    }
  rep.add("rank_additivity", Real(worst));

  const Subspace<Real> NP = numlin::null_space(P, tol);
  const Subspace<Real> RP = range_space(P, tol);
  const Real floor = noise_floor(P, Q);
  rep.add("nullT4_kernel_sum",
          numlin::subspace_gap(numlin::null_space(a.T4, tol),
                               numlin::subspace_sum(NP, a.H1, a.H2, tol)));
  rep.add("nullIQIP_kernel_sum",
          numlin::subspace_gap(
              numlin::null_space(numlin::snap_zero<Real>((I - Q) * (I - P), floor), tol),
              numlin::subspace_sum(RP, a.H3, tol)));
  return rep;
}

/// Residuals of the finer decompositions available for harmonious pairs:
///   P_{cl R(PQ)}          = P_{H1} + P_{H5}
///   P                     = P_{cl R(PQ)} + P_{H2}
///   P_{cl R(T1)}          = P_{H2} + P_{H5}
///   P_{cl R(T2)}          = P_{H3} + P_{H6}
///   I - P                 = P_{cl R(T2)} + P_{H4}
///   P_{cl R[(I-P)(I-Q)]}  = P_{H4} + P_{H6}
///   P                     = P_{H1} + P_{H2} + P_{H5}
template <typename Real>
CertReport<Real> certify_harmony(const PairAnatomy<Real>& a, const QuasiPair<Real>& pair,
                                 const Tolerances<Real>& tol = {}) {
  tol.validate();
  require_consistent(a, pair, tol);
  const Index n = pair.size();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real>&P = pair.P, &Q = pair.Q;
  using numlin::projector;
  using numlin::range_space;
  CertReport<Real> rep;
  rep.tol = tol.residual_tol;

  const Real floor = noise_floor(P, Q);
  const CMat<Real> PPQ =
      projector(range_space(numlin::snap_zero<Real>(P * Q, floor), tol));
  const CMat<Real> PIPIQ =
      projector(range_space(numlin::snap_zero<Real>((I - P) * (I - Q), floor), tol));
  const CMat<Real> PT1 = projector(range_space(a.T1, tol));
  const CMat<Real> PT2 = projector(range_space(a.T2, tol));
  const CMat<Real> P1 = projector(a.H1), P2 = projector(a.H2), P3 = projector(a.H3),
                   P4 = projector(a.H4), P5 = projector(a.H5), P6 = projector(a.H6);

  rep.add("pq_decomposition", op_norm((PPQ - (P1 + P5)).eval()));
  rep.add("p_via_pq", op_norm((P - (PPQ + P2)).eval()));
  rep.add("rT1_decomposition", op_norm((PT1 - (P2 + P5)).eval()));
  rep.add("rT2_decomposition", op_norm((PT2 - (P3 + P6)).eval()));
  rep.add("complement_via_rT2", op_norm((I - P - (PT2 + P4)).eval()));
  rep.add("ipiq_decomposition", op_norm((PIPIQ - (P4 + P6)).eval()));
  rep.add("p_three_way", op_norm((P - (P1 + P2 + P5)).eval()));
  return rep;
}

/// Compression of a pair to M = cl R(P - Q), which is invariant under both P
/// and Q. The compressed pair is itself a quasi-projection pair on M and the
/// ranks of T3, T4 survive the compression.
template <typename Real>
struct Restriction {
  QuasiPair<Real> compressed;  // 0 x 0 when degenerate
  CMat<Real> isometry;         // orthonormal basis of M, ambient x dim(M)
  bool degenerate = false;     // M = {0}
  Index rank_T3 = 0, rank_T3_M = 0;
  Index rank_T4 = 0, rank_T4_M = 0;
};

template <typename Real>
Restriction<Real> restrict_to_M(const QuasiPair<Real>& pair, const Tolerances<Real>& tol = {}) {
  tol.validate();
  const Index n = pair.size();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real>&P = pair.P, &Q = pair.Q;
  Restriction<Real> out;
  const Real floor = noise_floor(P, Q);
  const Subspace<Real> M =
      numlin::range_space(numlin::snap_zero<Real>(P - Q, floor), tol);
  out.isometry = M.basis;
  const CMat<Real> C = I - P;
  const CMat<Real> T3 = numlin::snap_zero<Real>(P * Q * C, floor);
  const CMat<Real> T4 = numlin::snap_zero<Real>(C * Q * P, floor);
  out.rank_T3 = numlin::rank_of(T3, tol);
  out.rank_T4 = numlin::rank_of(T4, tol);
  if (M.dim() == 0) {
    out.degenerate = true;
    out.compressed = QuasiPair<Real>{CMat<Real>::Zero(0, 0), CMat<Real>::Zero(0, 0), Real(0)};
    return out;
  }
  const CMat<Real>& B = M.basis;
  const CMat<Real> Pm = ((B.adjoint() * P * B + (B.adjoint() * P * B).adjoint()) / Real(2)).eval();
  const CMat<Real> Qm = B.adjoint() * Q * B;
  pairs::PairCheck<Real> chk = pairs::verify_pair(Pm, Qm, tol);
  if (!chk.accepted)
    throw NumericalError("restrict_to_M: compressed pair failed to validate (" +
                         chk.failed_invariant + ")");
  out.compressed = *chk.pair;
  out.rank_T3_M =
      numlin::rank_of(numlin::snap_zero<Real>(B.adjoint() * T3 * B, floor), tol);
  out.rank_T4_M =
      numlin::rank_of(numlin::snap_zero<Real>(B.adjoint() * T4 * B, floor), tol);
  return out;
}

/// Polar data of P_{R(Q)} - Q for the matched pair (m(Q), Q), together with
/// the two range identifications that tie it to the pair:
///   cl R(T1^*)  = cl R(P_{R(Q)} - Q^*),   cl R(T2~^*) = cl R(P_{R(Q)} - Q).
template <typename Real>
struct MatchedWitness {
  CMat<Real> defect;  // P_{R(Q)} - Q
  PolarParts<Real> polar;
  Real t1_range_gap = Real(0);
  Real t2tilde_range_gap = Real(0);
};

template <typename Real>
MatchedWitness<Real> matched_pair_witness(const CMat<Real>& Q,
                                          const Tolerances<Real>& tol = {}) {
  tol.validate();
  const CMat<Real> PRQ = pairs::range_projection_of_idempotent(Q, tol);
  const Real floor = noise_floor(Q, Q);
  MatchedWitness<Real> out;
  out.defect = numlin::snap_zero<Real>(PRQ - Q, floor);
  out.polar = numlin::polar(out.defect, tol);
  const CMat<Real> mQ = pairs::matched_projection(Q, tol).mQ;
  const Index n = Q.rows();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real> T1 = numlin::snap_zero<Real>(mQ * (I - Q), floor);
  const CMat<Real> T2tilde_star = numlin::snap_zero<Real>(Q * (I - mQ), floor);
  out.t1_range_gap =
      numlin::subspace_gap(numlin::range_space(T1.adjoint(), tol),
                           numlin::range_space(out.defect.adjoint(), tol));
  out.t2tilde_range_gap =
      numlin::subspace_gap(numlin::range_space(T2tilde_star, tol),
                           numlin::range_space(out.defect, tol));
  return out;
}

}  // namespace qpp::anatomy
