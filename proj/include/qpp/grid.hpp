#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpp/anatomy.hpp"
#include "qpp/numlin.hpp"
#include "qpp/pairs.hpp"
#include "qpp/similarity.hpp"
#include "qpp/types.hpp"

namespace qpp::grid {

using numlin::op_norm;

/// Sampled compact domain: a union of disjoint closed intervals, each carrying
/// the same number of uniformly spaced points (endpoints included).
struct GridDomain {
  std::vector<std::pair<double, double>> components;
  Index points_per_component = 0;
  std::vector<double> points;
  std::vector<Index> component_of;

  Index size() const { return Index(points.size()); }

  static GridDomain uniform(std::vector<std::pair<double, double>> comps,
                            Index pts_per_comp) {
    if (comps.empty()) throw InputError("GridDomain: no components");
    if (pts_per_comp < 2)
      throw InputError("GridDomain: each component needs at least 2 points");
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (!(comps[i].first <= comps[i].second))
        throw InputError("GridDomain: malformed interval");
      if (i > 0 && !(comps[i - 1].second < comps[i].first))
        throw InputError("GridDomain: components must be disjoint and ordered");
    }
    GridDomain d;
    d.components = std::move(comps);
    d.points_per_component = pts_per_comp;
    for (std::size_t c = 0; c < d.components.size(); ++c) {
      const auto [a, b] = d.components[c];
      for (Index k = 0; k < pts_per_comp; ++k) {
        d.points.push_back(a + (b - a) * double(k) / double(pts_per_comp - 1));
        d.component_of.push_back(Index(c));
      }
    }
    return d;
  }
};

inline bool same_domain(const GridDomain& a, const GridDomain& b) {
  return a.points == b.points && a.components == b.components;
}

/// Matrix-valued function sampled on a GridDomain; block size 1 for scalars,
/// 2 for the pair constructions.
struct GridElement {
  GridDomain domain;
  std::vector<CMatd> values;

  Index block_size() const { return values.empty() ? 0 : values.front().rows(); }

  void validate() const {
    if (Index(values.size()) != domain.size())
      throw InputError("GridElement: one value per grid point required");
    const Index n = block_size();
    for (const auto& v : values) {
      if (v.rows() != n || v.cols() != n)
        throw InputError("GridElement: nonuniform block size");
      numlin::check_finite(v, "GridElement");
    }
  }
};

inline GridElement sample_scalar(const GridDomain& dom,
                                 const std::function<double(double)>& f) {
  GridElement x;
  x.domain = dom;
  x.values.reserve(dom.points.size());
  for (double t : dom.points) {
    CMatd v(1, 1);
    v(0, 0) = f(t);
    x.values.push_back(v);
  }
  return x;
}

inline GridElement constant_element(const GridDomain& dom, const CMatd& v) {
  GridElement x;
  x.domain = dom;
  x.values.assign(dom.points.size(), v);
  return x;
}

/// Sup norm: max over the grid of the pointwise operator norm.
inline double grid_norm(const GridElement& x) {
  x.validate();
  double m = 0.0;
  for (const auto& v : x.values) m = std::max(m, op_norm(v));
  return m;
}

inline GridElement pointwise(const GridElement& a, const GridElement& b,
                             const std::function<CMatd(const CMatd&, const CMatd&)>& f) {
  if (!same_domain(a.domain, b.domain) || a.block_size() != b.block_size())
    throw InputError("grid: operands live on different grids");
  GridElement out;
  out.domain = a.domain;
  out.values.reserve(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    out.values.push_back(f(a.values[i], b.values[i]));
  return out;
}

inline GridElement difference(const GridElement& a, const GridElement& b) {
  return pointwise(a, b, [](const CMatd& x, const CMatd& y) { return (x - y).eval(); });
}

inline GridElement product(const GridElement& a, const GridElement& b) {
  return pointwise(a, b, [](const CMatd& x, const CMatd& y) { return (x * y).eval(); });
}

/// The pair P(t) = diag(1, 0), Q(t) = [[a, -l], [l, 1 - a]](t) with
/// l = (a^2 - a)^{1/2}, sampled pointwise from a real scalar element with
/// a^2 - a >= 0 on the whole grid.
struct LiftedPair {
  GridElement P, Q;
  GridElement ell;                // scalar l(a)
  double max_pair_residual = 0.0;  // worst pointwise quasi-pair defect
};

inline LiftedPair lift_A(const GridElement& a, const Tolerances<double>& tol = {}) {
  tol.validate();
  a.validate();
  if (a.block_size() != 1) throw InputError("lift_A: scalar element required");
  double scale = 0.0;
  for (const auto& v : a.values) {
    if (std::abs(v(0, 0).imag()) > tol.residual_tol)
      throw InputError("lift_A: element must be real-valued");
    const double av = v(0, 0).real();
    scale = std::max(scale, std::abs(av * av - av));
  }
  const double clamp = tol.psd_clamp_tol * std::max(1.0, scale);
  LiftedPair out;
  out.P = constant_element(a.domain, (CMatd(2, 2) << 1, 0, 0, 0).finished());
  out.Q.domain = a.domain;
  out.ell.domain = a.domain;
  const CMatd I2 = CMatd::Identity(2, 2);
  for (const auto& v : a.values) {
    const double av = v(0, 0).real();
    const double g = av * av - av;
    if (g < -clamp)
      throw InputError("lift_A: precondition a^2 - a >= 0 violated on the grid");
    const double l = g > 0.0 ? std::sqrt(g) : 0.0;
    CMatd lv(1, 1);
    lv(0, 0) = l;
    out.ell.values.push_back(lv);
    CMatd Qv(2, 2);
    Qv << av, -l, l, 1.0 - av;
    out.Q.values.push_back(Qv);
  }
  for (std::size_t i = 0; i < out.Q.values.size(); ++i) {
    const CMatd& Qv = out.Q.values[i];
    const CMatd& Pv = out.P.values[i];
    const CMatd S = 2.0 * Pv - I2;
    out.max_pair_residual =
        std::max({out.max_pair_residual, op_norm((Qv * Qv - Qv).eval()),
                  op_norm((Qv.adjoint() - S * Qv * S).eval())});
  }
  return out;
}

/// Zero set of a scalar element at the hybrid cutoff
/// zero_tol = max(1e-9, 1e-7 * max |a|). A zero point is a boundary point if
/// it has a nonzero neighbor within its own component; the set is clopen on
/// the grid exactly when no boundary point exists.
struct ZeroSetReport {
  std::vector<Index> zero;
  std::vector<Index> boundary;
  bool clopen = true;
  double zero_tol = 0.0;
};

inline ZeroSetReport zero_set(const GridElement& a, const Tolerances<double>& tol = {}) {
  tol.validate();
  a.validate();
  if (a.block_size() != 1) throw InputError("zero_set: scalar element required");
  const Index n = a.domain.size();
  double amax = 0.0;
  for (const auto& v : a.values) amax = std::max(amax, std::abs(v(0, 0)));
  ZeroSetReport rep;
  rep.zero_tol = std::max(1e-9, 1e-7 * amax);
  std::vector<bool> is_zero(std::size_t(n));
  for (Index i = 0; i < n; ++i) {
    is_zero[std::size_t(i)] = std::abs(a.values[std::size_t(i)](0, 0)) <= rep.zero_tol;
    if (is_zero[std::size_t(i)]) rep.zero.push_back(i);
  }
  for (Index i : rep.zero) {
    bool bd = false;
    // adjacency never crosses a component gap
    if (i > 0 && a.domain.component_of[std::size_t(i - 1)] == a.domain.component_of[std::size_t(i)] &&
        !is_zero[std::size_t(i - 1)])
      bd = true;
    if (i + 1 < n &&
        a.domain.component_of[std::size_t(i + 1)] == a.domain.component_of[std::size_t(i)] &&
        !is_zero[std::size_t(i + 1)])
      bd = true;
    if (bd) rep.boundary.push_back(i);
  }
  rep.clopen = rep.boundary.empty();
  return rep;
}

struct CriterionVerdict {
  bool holds = false;
  ZeroSetReport zeros;
};

/// The lifted pair is semi-harmonious in M2(C(Omega)) iff the unit belongs to
/// cl R(a - 1) + N(a - 1); under the closed-ideal correspondence this is the
/// clopen-ness of Z(a - 1) on the grid.
inline CriterionVerdict semiharmony_criterion(const GridElement& a,
                                              const Tolerances<double>& tol = {}) {
  GridElement shifted = a;
  for (auto& v : shifted.values) v(0, 0) -= 1.0;
  CriterionVerdict v;
  v.zeros = zero_set(shifted, tol);
  v.holds = v.zeros.clopen;
  return v;
}

/// Harmony criterion: Z(a^2 - a) clopen.
inline CriterionVerdict harmony_criterion(const GridElement& a,
                                          const Tolerances<double>& tol = {}) {
  GridElement g = a;
  for (auto& v : g.values) {
    const std::complex<double> av = v(0, 0);
    v(0, 0) = av * av - av;
  }
  CriterionVerdict v;
  v.zeros = zero_set(g, tol);
  v.holds = v.zeros.clopen;
  return v;
}

/// Verdict for the pair compressed to M = cl R(P - Q). The compression is
/// always semi-harmonious; it is harmonious exactly when the closed ideals
/// generated by l(a) and 1 - a agree, i.e. Z(l(a)) = Z(1 - a) on the grid.
/// When 1 - a vanishes identically, M is trivial and the verdict is vacuous.
struct RestrictedVerdict {
  bool harmonious = false;
  bool semiharmonious = true;  // structural: holds for every compression
  bool degenerate = false;     // M = {0}
  ZeroSetReport z_ell;         // Z(l(a))
  ZeroSetReport z_b;           // Z(1 - a)
};

inline RestrictedVerdict restricted_harmony(const GridElement& a,
                                            const Tolerances<double>& tol = {}) {
  const LiftedPair lifted = lift_A(a, tol);
  GridElement b = a;
  for (auto& v : b.values) v(0, 0) = 1.0 - v(0, 0);
  RestrictedVerdict out;
  out.z_ell = zero_set(lifted.ell, tol);
  out.z_b = zero_set(b, tol);
  out.harmonious = out.z_ell.zero == out.z_b.zero;
  out.degenerate = Index(out.z_b.zero.size()) == a.domain.size();
  return out;
}

/// Pointwise intersection projector: at each t, the projector onto
/// R(P(t)) n R(Q(t)), with the idempotent's range taken through its Hermitian
/// range projection.
inline GridElement pointwise_meet(const GridElement& P, const GridElement& Q,
                                  const Tolerances<double>& tol = {}) {
  tol.validate();
  if (!same_domain(P.domain, Q.domain) || P.block_size() != Q.block_size())
    throw InputError("pointwise_meet: operands live on different grids");
  P.validate();
  Q.validate();
  GridElement out;
  out.domain = P.domain;
  out.values.reserve(P.values.size());
  for (std::size_t i = 0; i < P.values.size(); ++i) {
    const CMatd& Pv = P.values[i];
    const CMatd& Qv = Q.values[i];
    if (std::max(op_norm((Pv * Pv - Pv).eval()), numlin::herm_gap(Pv)) >= tol.residual_tol)
      throw InputError("pointwise_meet: P is not a pointwise projection");
    const CMatd RQ = pairs::range_projection_of_idempotent(Qv, tol);
    const Subspace<double> meet = numlin::subspace_meet(
        numlin::range_space(Pv, tol), numlin::range_space(RQ, tol), tol);
    out.values.push_back(numlin::projector(meet));
  }
  return out;
}

/// Both sides of the evaluation-representation norm splits
///   ||pi(P) pi(Q) - pi(P_{H1})||          = max(alpha, ||P_M - pi(P_{H1})||)
///   ||pi(P) pi(P_{R(Q)}) - pi(P_{H1})||   = max(beta,  ||P_M - pi(P_{H1})||)
/// where P_M is the pointwise meet, alpha and beta the distances of the
/// respective products from P_M, everything in the sup norm.
struct MaxSplitReport {
  double lhs = 0.0, alpha = 0.0, split_norm = 0.0, rhs = 0.0, residual = 0.0;
  double lhs_beta = 0.0, beta = 0.0, rhs_beta = 0.0, residual_beta = 0.0;
  double meet_norm = 0.0;  // ||P_M||
};

inline MaxSplitReport max_split_check(const GridElement& P, const GridElement& Q,
                                      const GridElement& H1_projector,
                                      const Tolerances<double>& tol = {}) {
  tol.validate();
  if (!same_domain(P.domain, H1_projector.domain))
    throw InputError("max_split_check: H1 projector lives on a different grid");
  const GridElement PM = pointwise_meet(P, Q, tol);
  const GridElement PQ = product(P, Q);
  GridElement PRQ;
  PRQ.domain = Q.domain;
  for (const auto& Qv : Q.values)
    PRQ.values.push_back(pairs::range_projection_of_idempotent(Qv, tol));
  const GridElement PPRQ = product(P, PRQ);

  MaxSplitReport rep;
  rep.meet_norm = grid_norm(PM);
  rep.split_norm = grid_norm(difference(PM, H1_projector));
  rep.lhs = grid_norm(difference(PQ, H1_projector));
  rep.alpha = grid_norm(difference(PQ, PM));
  rep.rhs = std::max(rep.alpha, rep.split_norm);
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.lhs_beta = grid_norm(difference(PPRQ, H1_projector));
  rep.beta = grid_norm(difference(PPRQ, PM));
  rep.rhs_beta = std::max(rep.beta, rep.split_norm);
  rep.residual_beta = std::abs(rep.lhs_beta - rep.rhs_beta);
  return rep;
}

namespace detail {

// Nullspace dimension and rank of the pointwise equation X A = B X, as a
// linear system on vec(X) (column-major), optionally restricted to diagonal
// unknowns x11, x22 (the off-diagonal entries are pinned to zero by the
// constrained algebra).
struct PointwiseSystem {
  Index rank = 0;
  Index nullity = 0;
  CMatd nullspace_basis;  // columns are vec solutions
};

inline PointwiseSystem solve_intertwiner(const CMatd& A, const CMatd& B,
                                         bool diagonal_only,
                                         const Tolerances<double>& tol) {
  const Index n = A.rows();
  CMatd K = CMatd::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const Index row = i + n * j;
      for (Index k = 0; k < n; ++k) {
        K(row, i + n * k) += A(k, j);
        K(row, k + n * j) -= B(i, k);
      }
    }
  CMatd Keff = K;
  std::vector<Index> cols;
  if (diagonal_only) {
    for (Index d = 0; d < n; ++d) cols.push_back(d + n * d);
    Keff.resize(n * n, Index(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) Keff.col(Index(c)) = K.col(cols[c]);
  }
  PointwiseSystem out;
  out.rank = numlin::rank_of(Keff, tol);
  const Subspace<double> ns = numlin::null_space(Keff, tol);
  out.nullity = ns.dim();
  out.nullspace_basis = ns.basis;
  return out;
}

}  // namespace detail

/// The constrained-algebra obstruction: with a(t) = sec^2(t) on [0, 1] and the
/// off-diagonal entries required to vanish at t = 0, the pointwise equation
/// X P(0)Q(0) = (I - Q(0))(I - P(0)) X has only the zero solution, while the
/// unconstrained equation has a two-dimensional solution space; at interior
/// points invertible solutions exist (witnessed through the similarity
/// construction). The pointwise intersections R(P) n R(Q) and N(P) n N(Q)
/// are nontrivial only at the isolated point t = 0.
struct CounterexampleReport {
  Index constrained_rank = 0;
  Index constrained_nullity = 0;
  Index unconstrained_rank = 0;
  Index unconstrained_nullity = 0;
  double generic_t = 0.0;
  Index generic_nullity = 0;
  double generic_witness_det = 0.0;  // |det W| of the invertible witness
  double generic_residual = 0.0;     // residual of the pointwise equation at generic_t
  std::vector<Index> h1_dims, h4_dims;
  bool h_trivial_consistent = false;
};

inline CounterexampleReport counterexample_check(const Tolerances<double>& tol = {},
                                                 Index points = 101) {
  const GridDomain dom = GridDomain::uniform({{0.0, 1.0}}, points);
  const GridElement a = sample_scalar(dom, [](double t) {
    const double c = std::cos(t);
    return 1.0 / (c * c);
  });
  const LiftedPair lifted = lift_A(a, tol);
  const CMatd I2 = CMatd::Identity(2, 2);

  CounterexampleReport rep;
  const CMatd A0 = lifted.P.values[0] * lifted.Q.values[0];
  const CMatd B0 = (I2 - lifted.Q.values[0]) * (I2 - lifted.P.values[0]);
  const auto con = detail::solve_intertwiner(A0, B0, true, tol);
  const auto unc = detail::solve_intertwiner(A0, B0, false, tol);
  rep.constrained_rank = con.rank;
  rep.constrained_nullity = con.nullity;
  rep.unconstrained_rank = unc.rank;
  rep.unconstrained_nullity = unc.nullity;

  // generic interior point: the equation is solvable by an invertible operator
  const Index mid = dom.size() / 2;
  rep.generic_t = dom.points[std::size_t(mid)];
  const CMatd& Pg = lifted.P.values[std::size_t(mid)];
  const CMatd& Qg = lifted.Q.values[std::size_t(mid)];
  rep.generic_nullity =
      detail::solve_intertwiner((Pg * Qg).eval(), ((I2 - Qg) * (I2 - Pg)).eval(), false, tol)
          .nullity;
  const pairs::PairCheck<double> chk = pairs::verify_pair(Pg, Qg, tol);
  if (!chk.accepted)
    throw NumericalError("counterexample_check: pointwise pair failed to validate");
  const anatomy::PairAnatomy<double> an = anatomy::anatomize(*chk.pair, tol);
  const similarity::SimilaritySolution<double> w = similarity::build_W(
      an, std::complex<double>(1, 0), std::complex<double>(1, 0),
      std::complex<double>(1, 0), tol);
  rep.generic_witness_det = std::abs(w.W.determinant());
  rep.generic_residual =
      op_norm((w.W * Pg * Qg - (I2 - Qg) * (I2 - Pg) * w.W).eval());

  for (Index i = 0; i < dom.size(); ++i) {
    const CMatd& Pv = lifted.P.values[std::size_t(i)];
    const CMatd& Qv = lifted.Q.values[std::size_t(i)];
    rep.h1_dims.push_back(numlin::subspace_meet(numlin::range_space(Pv, tol),
                                                numlin::range_space(Qv, tol), tol)
                              .dim());
    rep.h4_dims.push_back(numlin::subspace_meet(numlin::null_space(Pv, tol),
                                                numlin::null_space(Qv, tol), tol)
                              .dim());
  }
  auto isolated = [&](const std::vector<Index>& dims) {
    for (Index i = 0; i < Index(dims.size()); ++i) {
      if (dims[std::size_t(i)] == 0) continue;
      bool has_trivial_neighbor = false;
      if (i > 0 && dims[std::size_t(i - 1)] == 0) has_trivial_neighbor = true;
      if (i + 1 < Index(dims.size()) && dims[std::size_t(i + 1)] == 0)
        has_trivial_neighbor = true;
      if (!has_trivial_neighbor) return false;
    }
    return true;
  };
  rep.h_trivial_consistent = isolated(rep.h1_dims) && isolated(rep.h4_dims);
  return rep;
}

}  // namespace qpp::grid
