#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "qpp/anatomy.hpp"
#include "qpp/numlin.hpp"
#include "qpp/types.hpp"

namespace qpp::angles {

using anatomy::PairAnatomy;
using numlin::op_norm;
using pairs::QuasiPair;

/// Cosine of the Friedrichs angle, c(M, N) = ||P_M P_N - P_{M n N}||,
/// clamped to [0, 1].
template <typename Real>
Real friedrichs_cos(const Subspace<Real>& M, const Subspace<Real>& N,
                    const Tolerances<Real>& tol = {}) {
  tol.validate();
  if (M.ambient != N.ambient)
    throw InputError("friedrichs_cos: ambient dimensions differ");
  const Subspace<Real> meet = numlin::subspace_meet(M, N, tol);
  const Real c = op_norm(
      (numlin::projector(M) * numlin::projector(N) - numlin::projector(meet)).eval());
  return std::clamp(c, Real(0), Real(1));
}

/// |c(M, N) - c(M^perp, N^perp)|; the two sides agree exactly.
template <typename Real>
Real complement_invariance_check(const Subspace<Real>& M, const Subspace<Real>& N,
                                 const Tolerances<Real>& tol = {}) {
  const Real lhs = friedrichs_cos(M, N, tol);
  const Real rhs =
      friedrichs_cos(numlin::complement(M, tol), numlin::complement(N, tol), tol);
  return std::abs(lhs - rhs);
}

/// The two sides of the norm equation for a quasi-projection pair,
///   ||PQ - P_{H1}|| = ||(I - P)(I - Q) - P_{H4}||,
/// with the Friedrichs cosine of (R(P), R(Q)) and the max-split quantities.
/// Under the identity representation the meet of the ranges IS H1, so
/// meet_norm vanishes and the split collapses to lhs = max(alpha, 0).
template <typename Real>
struct AngleReport {
  Real cosine = Real(0);
  Real lhs = Real(0), rhs = Real(0);
  Real alpha = Real(0);      // ||PQ - P_M||, M = R(P) n R(Q)
  Real beta = Real(0);       // ||P P_{R(Q)} - P_M||
  Real meet_norm = Real(0);  // ||P_M - P_{H1}||
};

template <typename Real>
AngleReport<Real> norm_equation_check(const QuasiPair<Real>& pair,
                                      const PairAnatomy<Real>& a,
                                      const Tolerances<Real>& tol = {}) {
  tol.validate();
  anatomy::require_consistent(a, pair, tol);
  const Index n = pair.size();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real>&P = pair.P, &Q = pair.Q;
  const CMat<Real> P1 = numlin::projector(a.H1);
  const CMat<Real> P4 = numlin::projector(a.H4);
  AngleReport<Real> rep;
  rep.lhs = op_norm((P * Q - P1).eval());
  rep.rhs = op_norm(((I - P) * (I - Q) - P4).eval());
  const Subspace<Real> RP = numlin::range_space(P, tol);
  const Subspace<Real> RQ = numlin::range_space(Q, tol);
  rep.cosine = friedrichs_cos(RP, RQ, tol);
  const CMat<Real> PM = numlin::projector(numlin::subspace_meet(RP, RQ, tol));
  rep.alpha = op_norm((P * Q - PM).eval());
  rep.beta = op_norm((P * pairs::range_projection_of_idempotent(Q, tol) - PM).eval());
  rep.meet_norm = op_norm((PM - P1).eval());
  return rep;
}

}  // namespace qpp::angles
