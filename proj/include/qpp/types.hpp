#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qpp {

using Index = Eigen::Index;

template <typename Real>
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using CMatd = CMat<double>;
using CVecd = CVec<double>;

/// Argument violates a documented precondition (bad shape, non-finite
/// entries, wrong structure).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Computation cannot proceed numerically, e.g. an operator that should be
/// positive fails to be beyond the clamping window.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tolerance policy shared by all operations.
///
/// psd_clamp_tol is relative: the effective clamping window for negative
/// eigenvalues is psd_clamp_tol times the spectral radius of the operator at
/// hand. rank_rel_tol is relative to the largest singular value.
template <typename Real>
struct Tolerances {
  Real rank_rel_tol = Real(1e-10);
  Real psd_clamp_tol = Real(1e-10);
  Real residual_tol = Real(1e-8);
  Real cluster_tol = Real(1e-8);

  void validate() const {
    if (!(rank_rel_tol > Real(0)) || !(psd_clamp_tol > Real(0)) ||
        !(residual_tol > Real(0)) || !(cluster_tol > Real(0)))
      throw InputError("Tolerances: all fields must be strictly positive");
  }
};

/// Closed subspace of C^n held as an orthonormal column basis (n x k, k may
/// be zero).
template <typename Real>
struct Subspace {
  Index ambient = 0;
  CMat<Real> basis;

  Index dim() const { return basis.cols(); }
};

/// Polar factorization T = V |T| with V a partial isometry and
/// |T| = (T^* T)^(1/2); V^* V is the orthogonal projection onto the closure
/// of R(T^*).
template <typename Real>
struct PolarParts {
  CMat<Real> V;
  CMat<Real> absT;
};

/// Named residuals of a batch of operator identities, all judged against one
/// threshold. Insertion order is preserved for reporting.
template <typename Real>
struct CertReport {
  std::vector<std::pair<std::string, Real>> residuals;
  Real tol = Real(1e-8);

  void add(std::string name, Real value) {
    residuals.emplace_back(std::move(name), value);
  }
  Real worst() const {
    Real w = Real(0);
    for (const auto& [_, r] : residuals) w = std::max(w, r);
    return w;
  }
  bool pass() const { return worst() < tol; }
  const Real* find(std::string_view name) const {
    for (const auto& [k, r] : residuals)
      if (k == name) return &r;
    return nullptr;
  }
};

}  // namespace qpp
