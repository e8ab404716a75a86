#pragma once

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "qpp/anatomy.hpp"
#include "qpp/numlin.hpp"
#include "qpp/types.hpp"

namespace qpp::similarity {

using anatomy::PairAnatomy;
using numlin::op_norm;
using pairs::QuasiPair;

/// Invertible similarity W = l1 (V1 - V2) + l2 P_{H1} + l3 P_{H4} with its
/// closed-form inverse (1/l1)(V1 - V2)^dag + (1/l2) P_{H1} + (1/l3) P_{H4}.
template <typename Real>
struct SimilaritySolution {
  CMat<Real> W;
  CMat<Real> Winv;
  std::array<std::complex<Real>, 3> lambdas;
  CMat<Real> Ptilde;  // I - P_{H1} - P_{H4}
};

template <typename Real>
SimilaritySolution<Real> build_W(const PairAnatomy<Real>& a,
                                 std::complex<Real> l1, std::complex<Real> l2,
                                 std::complex<Real> l3,
                                 const Tolerances<Real>& tol = {}) {
  tol.validate();
  if (std::abs(l1) == Real(0) || std::abs(l2) == Real(0) || std::abs(l3) == Real(0))
    throw InputError("build_W: all lambda parameters must be nonzero");
  const Index n = a.P.rows();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real> P1 = numlin::projector(a.H1);
  const CMat<Real> P4 = numlin::projector(a.H4);
  const CMat<Real> D = a.V1() - a.V2();
  SimilaritySolution<Real> sol;
  sol.lambdas = {l1, l2, l3};
  sol.W = l1 * D + l2 * P1 + l3 * P4;
  sol.Winv = (Real(1) / l1) * numlin::pinv(D, tol) + (Real(1) / l2) * P1 +
             (Real(1) / l3) * P4;
  sol.Ptilde = I - P1 - P4;
  const Real inv_residual = std::max(op_norm((sol.W * sol.Winv - I).eval()),
                                     op_norm((sol.Winv * sol.W - I).eval()));
  if (inv_residual >= tol.residual_tol)
    throw NumericalError("build_W: closed-form inverse fails to invert W");
  return sol;
}

/// Residuals of the two conjugation equations and their composite:
///   W (Q - P_{H1}) W^{-1} = I - P - P_{H4}
///   W (P - P_{H1}) W^{-1} = I - Q - P_{H4}
///   W (P - P_{H1})(Q - P_{H1}) W^{-1} = (I - Q - P_{H4})(I - P - P_{H4}).
template <typename Real>
CertReport<Real> verify_similarity(const SimilaritySolution<Real>& sol,
                                   const QuasiPair<Real>& pair,
                                   const PairAnatomy<Real>& a,
                                   const Tolerances<Real>& tol = {}) {
  tol.validate();
  anatomy::require_consistent(a, pair, tol);
  const Index n = pair.size();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real>&P = pair.P, &Q = pair.Q;
  const CMat<Real> P1 = numlin::projector(a.H1);
  const CMat<Real> P4 = numlin::projector(a.H4);
  CertReport<Real> rep;
  rep.tol = tol.residual_tol;
  rep.add("conjugation_Q",
          op_norm((sol.W * (Q - P1) * sol.Winv - (I - P - P4)).eval()));
  rep.add("conjugation_P",
          op_norm((sol.W * (P - P1) * sol.Winv - (I - Q - P4)).eval()));
  rep.add("composite", op_norm((sol.W * (P - P1) * (Q - P1) * sol.Winv -
                                (I - Q - P4) * (I - P - P4))
                                   .eval()));
  rep.add("inverse_left", op_norm((sol.Winv * sol.W - I).eval()));
  rep.add("inverse_right", op_norm((sol.W * sol.Winv - I).eval()));
  return rep;
}

/// Unitary U = l1 [V1 (2P - I) - V2] + l2 P_{H1} + l3 P_{H4} (all |l| = 1)
/// conjugating (P - P_{H1})(Q - P_{H1}) to (I - Q - P_{H4})(I - P - P_{H4}).
template <typename Real>
struct UnitarySolution {
  CMat<Real> U;
  std::array<std::complex<Real>, 3> lambdas;
  CertReport<Real> checks;  // unitarity, conjugation, relation to W
};

template <typename Real>
UnitarySolution<Real> build_U(const PairAnatomy<Real>& a, std::complex<Real> l1,
                              std::complex<Real> l2, std::complex<Real> l3,
                              const Tolerances<Real>& tol = {}) {
  tol.validate();
  for (const auto& l : {l1, l2, l3})
    if (std::abs(std::abs(l) - Real(1)) > Real(1e-12))
      throw InputError("build_U: lambda parameters must lie on the unit circle");
  const Index n = a.P.rows();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real>&P = a.P, &Q = a.Q;
  const CMat<Real> S = Real(2) * P - I;
  const CMat<Real> P1 = numlin::projector(a.H1);
  const CMat<Real> P4 = numlin::projector(a.H4);
  UnitarySolution<Real> out;
  out.lambdas = {l1, l2, l3};
  out.U = l1 * (a.V1() * S - a.V2()) + l2 * P1 + l3 * P4;
  out.checks.tol = tol.residual_tol;
  out.checks.add("unitary_left", op_norm((out.U.adjoint() * out.U - I).eval()));
  out.checks.add("unitary_right", op_norm((out.U * out.U.adjoint() - I).eval()));
  out.checks.add("conjugation",
                 op_norm((out.U * (P - P1) * (Q - P1) * out.U.adjoint() -
                          (I - Q - P4) * (I - P - P4))
                             .eval()));
  const SimilaritySolution<Real> w = build_W(a, l1, l2, l3, tol);
  out.checks.add("w_relation",
                 op_norm((out.U - (w.W + Real(2) * l1 * a.V1() * (P - I))).eval()));
  if (!out.checks.pass())
    throw NumericalError("build_U: unitary construction failed its checks");
  return out;
}

/// EP structure of V1 - V2 and the intertwining family:
///   (V1 - V2)(V1 - V2)^dag = (V1 - V2)^dag (V1 - V2) = I - P_{H1} - P_{H4},
///   V1 + V2 self-adjoint, and Vi Tj = Ti Vj for i, j in {1, 2}.
template <typename Real>
CertReport<Real> ep_check(const PairAnatomy<Real>& a, const Tolerances<Real>& tol = {}) {
  tol.validate();
  const Index n = a.P.rows();
  const CMat<Real> I = CMat<Real>::Identity(n, n);
  const CMat<Real> P1 = numlin::projector(a.H1);
  const CMat<Real> P4 = numlin::projector(a.H4);
  const CMat<Real> Ptilde = I - P1 - P4;
  const CMat<Real> D = a.V1() - a.V2();
  const CMat<Real> Ddag = numlin::pinv(D, tol);
  CertReport<Real> rep;
  rep.tol = tol.residual_tol;
  rep.add("ep_right", op_norm((D * Ddag - Ptilde).eval()));
  rep.add("ep_left", op_norm((Ddag * D - Ptilde).eval()));
  rep.add("v_sum_selfadjoint", numlin::herm_gap((a.V1() + a.V2()).eval()));
  const CMat<Real>* V[2] = {&a.V1(), &a.V2()};
  const CMat<Real>* T[2] = {&a.T1, &a.T2};
  const char* names[2][2] = {{"intertwine_11", "intertwine_12"},
                             {"intertwine_21", "intertwine_22"}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      rep.add(names[i][j], op_norm(((*V[i]) * (*T[j]) - (*T[i]) * (*V[j])).eval()));
  return rep;
}

}  // namespace qpp::similarity
