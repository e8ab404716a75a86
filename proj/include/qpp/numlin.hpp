#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qpp/types.hpp"

namespace qpp::numlin {

template <typename Derived>
using RealOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

template <typename Derived>
void check_finite(const Eigen::MatrixBase<Derived>& T, const char* who) {
  if (!T.allFinite()) throw InputError(std::string(who) + ": non-finite entry");
}

/// Operator 2-norm (largest singular value). Accepts any dense expression.
template <typename Derived>
RealOf<Derived> op_norm(const Eigen::MatrixBase<Derived>& T) {
  using Real = RealOf<Derived>;
  if (T.rows() == 0 || T.cols() == 0) return Real(0);
  check_finite(T, "op_norm");
  const CMat<Real> Te = T.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMat<Real>> svd(Te);
  return svd.singularValues()(0);
}

/// Distance of X from its own adjoint in operator norm.
template <typename Derived>
RealOf<Derived> herm_gap(const Eigen::MatrixBase<Derived>& X) {
  using Real = RealOf<Derived>;
  const CMat<Real> Xe = X.template cast<std::complex<Real>>();
  return op_norm(Xe - Xe.adjoint());
}

template <typename Real>
Index retained_count(const RVec<Real>& s, const Tolerances<Real>& tol) {
  if (s.size() == 0 || s(0) == Real(0)) return 0;
  const Real cut = tol.rank_rel_tol * s(0);
  Index r = 0;
  while (r < s.size() && s(r) >= cut) ++r;
  return r;
}

/// Numerical rank at the relative singular-value cutoff.
template <typename Derived>
Index rank_of(const Eigen::MatrixBase<Derived>& T,
              const Tolerances<RealOf<Derived>>& tol = {}) {
  using Real = RealOf<Derived>;
  tol.validate();
  if (T.rows() == 0 || T.cols() == 0) return 0;
  check_finite(T, "rank_of");
  const CMat<Real> Te = T.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMat<Real>> svd(Te);
  RVec<Real> s = svd.singularValues();
  return retained_count(s, tol);
}

/// Square root of a Hermitian positive semidefinite matrix. Eigenvalues in
/// the symmetric clamping window around zero are flushed to zero (the square
/// root would otherwise amplify rounding noise into spurious rank); anything
/// below the window is rejected.
template <typename Derived>
CMat<RealOf<Derived>> psd_sqrt(const Eigen::MatrixBase<Derived>& A,
                               const Tolerances<RealOf<Derived>>& tol = {}) {
  using Real = RealOf<Derived>;
  tol.validate();
  check_finite(A, "psd_sqrt");
  if (A.rows() != A.cols()) throw InputError("psd_sqrt: matrix must be square");
  const CMat<Real> Ae = A.template cast<std::complex<Real>>();
  if (Ae.rows() == 0) return Ae;
  const Real scale = std::max(Real(1), Ae.cwiseAbs().maxCoeff());
  if (op_norm(Ae - Ae.adjoint()) > tol.residual_tol * scale)
    throw InputError("psd_sqrt: matrix is not Hermitian");
  CMat<Real> H = (Ae + Ae.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMat<Real>> eig(H);
  if (eig.info() != Eigen::Success)
    throw NumericalError("psd_sqrt: eigendecomposition failed");
  RVec<Real> lam = eig.eigenvalues();
  const Real rho = std::max(std::abs(lam(0)), std::abs(lam(lam.size() - 1)));
  // absolute floor: eigenvalues at machine-epsilon scale are rounding noise
  // even when the whole matrix is (numerically) zero
  const Real clamp = tol.psd_clamp_tol * rho + Eigen::NumTraits<Real>::epsilon();
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -clamp) throw NumericalError("psd_sqrt: matrix is not PSD");
    lam(i) = lam(i) > clamp ? std::sqrt(lam(i)) : Real(0);
  }
  CMat<Real> B = eig.eigenvectors() *
                 lam.template cast<std::complex<Real>>().asDiagonal() *
                 eig.eigenvectors().adjoint();
  return (B + B.adjoint()) / Real(2);
}

/// Moore-Penrose inverse via SVD with the relative rank cutoff.
template <typename Derived>
CMat<RealOf<Derived>> pinv(const Eigen::MatrixBase<Derived>& T,
                           const Tolerances<RealOf<Derived>>& tol = {}) {
  using Real = RealOf<Derived>;
  tol.validate();
  check_finite(T, "pinv");
  if (T.rows() == 0 || T.cols() == 0)
    return CMat<Real>::Zero(T.cols(), T.rows());
  const CMat<Real> Te = T.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMat<Real>> svd(Te, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RVec<Real> s = svd.singularValues();
  const Index r = retained_count(s, tol);
  if (r == 0) return CMat<Real>::Zero(T.cols(), T.rows());
  RVec<Real> sinv = s.head(r).cwiseInverse();
  return svd.matrixV().leftCols(r) *
         sinv.template cast<std::complex<Real>>().asDiagonal() *
         svd.matrixU().leftCols(r).adjoint();
}

/// Polar factorization T = V|T|. The partial isometry is supported exactly on
/// the retained singular directions; the phase of each retained right-singular
/// vector is fixed so its first non-negligible entry is real positive, which
/// pins the reported factors across runs.
template <typename Derived>
PolarParts<RealOf<Derived>> polar(const Eigen::MatrixBase<Derived>& T,
                                  const Tolerances<RealOf<Derived>>& tol = {}) {
  using Real = RealOf<Derived>;
  tol.validate();
  check_finite(T, "polar");
  const Index m = T.rows(), n = T.cols();
  PolarParts<Real> out{CMat<Real>::Zero(m, n), CMat<Real>::Zero(n, n)};
  if (m == 0 || n == 0) return out;
  const CMat<Real> Te = T.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMat<Real>> svd(Te, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RVec<Real> s = svd.singularValues();
  const Index r = retained_count(s, tol);
  if (r == 0) return out;
  CMat<Real> U = svd.matrixU().leftCols(r);
  CMat<Real> W = svd.matrixV().leftCols(r);
  const Real floor = std::sqrt(Eigen::NumTraits<Real>::epsilon());
  for (Index i = 0; i < r; ++i) {
    Index j = 0;
    while (j + 1 < n && std::abs(W(j, i)) <= floor) ++j;
    const std::complex<Real> w = W(j, i);
    if (std::abs(w) > Real(0)) {
      const std::complex<Real> ph = std::conj(w) / std::abs(w);
      U.col(i) *= ph;
      W.col(i) *= ph;
    }
  }
  out.V = U * W.adjoint();
  CMat<Real> absT =
      W * s.head(r).template cast<std::complex<Real>>().asDiagonal() * W.adjoint();
  out.absT = (absT + absT.adjoint()) / Real(2);
  return out;
}

/// Orthonormal basis of the column space at the relative rank cutoff.
template <typename Derived>
Subspace<RealOf<Derived>> range_space(const Eigen::MatrixBase<Derived>& T,
                                      const Tolerances<RealOf<Derived>>& tol = {}) {
  using Real = RealOf<Derived>;
  tol.validate();
  check_finite(T, "range_space");
  const Index m = T.rows();
  if (m == 0 || T.cols() == 0) return {m, CMat<Real>::Zero(m, 0)};
  const CMat<Real> Te = T.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMat<Real>> svd(Te, Eigen::ComputeThinU);
  RVec<Real> s = svd.singularValues();
  const Index r = retained_count(s, tol);
  return {m, svd.matrixU().leftCols(r)};
}

/// Orthonormal basis of the null space: right-singular vectors of the
/// discarded singular values.
template <typename Derived>
Subspace<RealOf<Derived>> null_space(const Eigen::MatrixBase<Derived>& T,
                                     const Tolerances<RealOf<Derived>>& tol = {}) {
  using Real = RealOf<Derived>;
  tol.validate();
  check_finite(T, "null_space");
  const Index n = T.cols();
  if (n == 0) return {0, CMat<Real>::Zero(0, 0)};
  if (T.rows() == 0) return {n, CMat<Real>::Identity(n, n)};
  const CMat<Real> Te = T.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<CMat<Real>> svd(Te, Eigen::ComputeFullV);
  RVec<Real> s = svd.singularValues();
  const Index r = retained_count(s, tol);
  return {n, svd.matrixV().rightCols(n - r)};
}

/// Returns M unchanged unless its norm sits at or below the given rounding
/// floor, in which case the exact zero matrix is returned. Derived operators
/// that vanish identically come out of floating-point cancellation with norm
/// ~eps * scale; a relative rank cutoff would otherwise promote that noise to
/// full rank.
template <typename Real>
CMat<Real> snap_zero(const CMat<Real>& M, Real noise_floor) {
  if (M.size() == 0 || M.cwiseAbs().maxCoeff() > noise_floor) return M;
  return CMat<Real>::Zero(M.rows(), M.cols());
}

/// Orthogonal projection matrix basis * basis^*.
template <typename Real>
CMat<Real> projector(const Subspace<Real>& S) {
  if (S.dim() == 0) return CMat<Real>::Zero(S.ambient, S.ambient);
  return S.basis * S.basis.adjoint();
}

/// Intersection of two subspaces as the near-1 spectral cluster of
/// P_A P_B P_A. Symmetric in A and B and stable near small principal angles.
template <typename Real>
Subspace<Real> subspace_meet(const Subspace<Real>& A, const Subspace<Real>& B,
                             const Tolerances<Real>& tol = {}) {
  tol.validate();
  if (A.ambient != B.ambient)
    throw InputError("subspace_meet: ambient dimensions differ");
  const Index n = A.ambient;
  if (A.dim() == 0 || B.dim() == 0) return {n, CMat<Real>::Zero(n, 0)};
  CMat<Real> G = projector(A) * projector(B) * projector(A);
  G = (G + G.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMat<Real>> eig(G);
  const RVec<Real>& lam = eig.eigenvalues();  // ascending
  Index k = 0;
  while (k < n && lam(n - 1 - k) >= Real(1) - tol.cluster_tol) ++k;
  return {n, eig.eigenvectors().rightCols(k)};
}

/// Span of the union of the given subspaces.
template <typename Real>
Subspace<Real> subspace_sum(const Subspace<Real>& A, const Subspace<Real>& B,
                            const Tolerances<Real>& tol = {}) {
  if (A.ambient != B.ambient)
    throw InputError("subspace_sum: ambient dimensions differ");
  CMat<Real> cat(A.ambient, A.dim() + B.dim());
  cat << A.basis, B.basis;
  return range_space(cat, tol);
}

template <typename Real>
Subspace<Real> subspace_sum(const Subspace<Real>& A, const Subspace<Real>& B,
                            const Subspace<Real>& C,
                            const Tolerances<Real>& tol = {}) {
  return subspace_sum(subspace_sum(A, B, tol), C, tol);
}

/// Orthogonal complement.
template <typename Real>
Subspace<Real> complement(const Subspace<Real>& S, const Tolerances<Real>& tol = {}) {
  if (S.dim() == 0)
    return {S.ambient, CMat<Real>::Identity(S.ambient, S.ambient)};
  return null_space(S.basis.adjoint(), tol);
}

/// Distance between two subspaces as the operator norm of the projector
/// difference (the sine of the largest principal angle when dimensions agree).
template <typename Real>
Real subspace_gap(const Subspace<Real>& A, const Subspace<Real>& B) {
  if (A.ambient != B.ambient)
    throw InputError("subspace_gap: ambient dimensions differ");
  return op_norm(projector(A) - projector(B));
}

/// Residual of S against the orthonormal-basis invariant.
template <typename Real>
Real orthonormality_gap(const Subspace<Real>& S) {
  if (S.dim() == 0) return Real(0);
  return op_norm(S.basis.adjoint() * S.basis -
                 CMat<Real>::Identity(S.dim(), S.dim()));
}

}  // namespace qpp::numlin
