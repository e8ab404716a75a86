#pragma once

// Independent reference computations used only by tests. Each oracle reaches
// its answer by a different route than the library path it checks.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "qpp/types.hpp"

namespace oracles {

using qpp::CMatd;
using qpp::CVecd;
using qpp::Index;

// Largest singular value by power iteration on T^* T.
inline double power_iteration_norm(const CMatd& T, int iters = 600) {
  const Index n = T.cols();
  if (n == 0 || T.rows() == 0) return 0.0;
  const CMatd G = T.adjoint() * T;
  CVecd v = CVecd::Ones(n);
  v /= v.norm();
  double lam = 0.0;
  for (int k = 0; k < iters; ++k) {
    CVecd w = G * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    lam = nw;
  }
  return std::sqrt(lam);
}

// Von Neumann alternating projections: (Pa Pb)^iters converges to the
// projector onto the intersection.
inline CMatd alternating_meet(const CMatd& Pa, const CMatd& Pb, int iters = 200) {
  CMatd X = CMatd::Identity(Pa.rows(), Pa.cols());
  for (int k = 0; k < iters; ++k) X = Pa * Pb * X;
  return X;
}

// 1 - (smallest singular value of Ba^* Bb): zero iff the subspaces spanned by
// the two orthonormal bases coincide (principal angles all zero). Dimension
// mismatch counts as maximal gap.
inline double principal_angle_gap(const CMatd& Ba, const CMatd& Bb) {
  if (Ba.cols() != Bb.cols()) return 1.0;
  if (Ba.cols() == 0) return 0.0;
  Eigen::JacobiSVD<CMatd> svd(CMatd(Ba.adjoint() * Bb));
  const auto& s = svd.singularValues();
  return 1.0 - s(s.size() - 1);
}

}  // namespace oracles
