#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "qpp/numlin.hpp"
#include "qpp/types.hpp"

namespace qpp::rng {

/// Deterministic random source. The raw engine is std::mt19937_64; the
/// uniform and normal variates are derived here rather than through
/// std::*_distribution so that equal seeds give equal streams on every
/// standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  double uniform() {  // [0, 1)
    return double(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {  // Box-Muller with one cached variate
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> cnormal() {
    const double s = 0.70710678118654752440;
    return {normal() * s, normal() * s};
  }

  Index index(Index n) {  // uniform in [0, n)
    return Index(eng_() % std::uint64_t(n));
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline CMatd gaussian(Index m, Index n, Rng& rng) {
  CMatd G(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) G(i, j) = rng.cnormal();
  return G;
}

/// Haar-distributed unitary via QR of a Gaussian matrix with the R-diagonal
/// phase fix.
inline CMatd haar_unitary(Index n, Rng& rng) {
  CMatd G = gaussian(n, n, rng);
  Eigen::HouseholderQR<CMatd> qr(G);
  CMatd Q = qr.householderQ() * CMatd::Identity(n, n);
  CMatd R = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    const std::complex<double> d = R(i, i);
    if (std::abs(d) > 0.0) Q.col(i) *= d / std::abs(d);
  }
  return Q;
}

/// Orthonormal basis of a Haar-random k-dimensional subspace of C^n.
inline CMatd haar_basis(Index n, Index k, Rng& rng) {
  if (k == 0) return CMatd::Zero(n, 0);
  CMatd G = gaussian(n, k, rng);
  Eigen::HouseholderQR<CMatd> qr(G);
  return qr.householderQ() * CMatd::Identity(n, k);
}

inline CMatd haar_projection(Index n, Index k, Rng& rng) {
  CMatd B = haar_basis(n, k, rng);
  return B * B.adjoint();
}

/// Haar projection with rank drawn uniformly from {0, ..., n}.
inline CMatd haar_projection_any_rank(Index n, Rng& rng) {
  return haar_projection(n, rng.index(n + 1), rng);
}

inline Subspace<double> random_subspace(Index n, Rng& rng) {
  const Index k = rng.index(n + 1);
  return {n, haar_basis(n, k, rng)};
}

/// Random rank-k idempotent S diag(I_k, 0) S^{-1}, with the similarity kept
/// well conditioned so residual noise in downstream identities stays bounded.
inline CMatd random_idempotent(Index n, Index k, Rng& rng, double max_cond = 50.0) {
  if (k <= 0) return CMatd::Zero(n, n);
  if (k >= n) return CMatd::Identity(n, n);
  for (;;) {
    CMatd S = gaussian(n, n, rng);
    Eigen::JacobiSVD<CMatd> svd(S);
    const auto& s = svd.singularValues();
    if (s(n - 1) <= 0.0 || s(0) / s(n - 1) > max_cond) continue;
    CMatd E = CMatd::Zero(n, n);
    E.topLeftCorner(k, k).setIdentity();
    return S * E * S.inverse();
  }
}

inline CMatd random_idempotent_any_rank(Index n, Rng& rng, double max_cond = 50.0) {
  return random_idempotent(n, 1 + rng.index(std::max<Index>(n - 1, 1)), rng, max_cond);
}

/// Hermitian A with spectrum outside (0, 1), so that A^2 - A >= 0. Exact
/// eigenvalues 1 and 0 are planted with positive probability to exercise
/// nontrivial intersections downstream.
inline CMatd random_hermitian_unit_gap(Index m, Rng& rng, bool plant_endpoints = true) {
  RVec<double> d(m);
  for (Index i = 0; i < m; ++i) {
    const double u = rng.uniform();
    if (plant_endpoints && u < 0.20)
      d(i) = 1.0;
    else if (plant_endpoints && u < 0.40)
      d(i) = 0.0;
    else if (rng.uniform() < 0.5)
      d(i) = -(0.2 + 1.8 * rng.uniform());
    else
      d(i) = 1.2 + 1.8 * rng.uniform();
  }
  CMatd U = haar_unitary(m, rng);
  CMatd A = U * d.cast<std::complex<double>>().asDiagonal() * U.adjoint();
  return (A + A.adjoint()) / 2.0;
}

struct GeneratedPair {
  CMatd P, Q;
  std::string kind;
};

namespace detail {

// Rejects pairs whose subspace geometry sits inside the ambiguous spectral
// band: cluster decisions and rank cutoffs must not be borderline for the
// generated ensemble.
inline bool meet_spectra_clean(const CMatd& P, const CMatd& Q) {
  using numlin::null_space;
  using numlin::projector;
  using numlin::range_space;
  const Subspace<double> parts[4] = {range_space(P), null_space(P),
                                     range_space(Q), null_space(Q)};
  const std::pair<int, int> combos[4] = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
  for (const auto& [a, b] : combos) {
    if (parts[a].dim() == 0 || parts[b].dim() == 0) continue;
    CMatd G = projector(parts[a]) * projector(parts[b]) * projector(parts[a]);
    G = (G + G.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatd> eig(G);
    for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
      const double gap = 1.0 - eig.eigenvalues()(i);
      if (gap > 1e-6 && gap < 1e-3) return false;
    }
  }
  const CMatd ops[2] = {P * (CMatd::Identity(P.rows(), P.cols()) - Q),
                        (CMatd::Identity(P.rows(), P.cols()) - P) * Q};
  for (const auto& T : ops) {
    Eigen::JacobiSVD<CMatd> svd(T);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) continue;
    for (Index i = 0; i < s.size(); ++i) {
      const double rel = s(i) / s(0);
      if (rel > 1e-9 && rel < 1e-5) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Weighted projection for the symmetry with J-eigenbasis split (p, n-p):
/// an oblique block pairing min(p, n-p) coordinates of each sign plus
/// ordinary projections on the leftovers. Returned in the J-eigenbasis.
inline CMatd random_weighted_projection(Index p, Index q, Rng& rng) {
  const Index n = p + q;
  const Index m = std::min(p, q);
  CMatd Qh = CMatd::Zero(n, n);
  if (m > 0) {
    CMatd A = random_hermitian_unit_gap(m, rng);
    CMatd L = numlin::psd_sqrt((A * A - A));
    Qh.block(0, 0, m, m) = A;
    Qh.block(0, p, m, m) = -L;
    Qh.block(p, 0, m, m) = L;
    Qh.block(p, p, m, m) = CMatd::Identity(m, m) - A;
  }
  if (p > m) Qh.block(m, m, p - m, p - m) = haar_projection(p - m, rng.index(p - m + 1), rng);
  if (q > m)
    Qh.block(p + m, p + m, q - m, q - m) = haar_projection(q - m, rng.index(q - m + 1), rng);
  return Qh;
}

/// Random quasi-projection pair: an oblique-block construction from a
/// Hermitian generator, a matched pair of a random idempotent, or a
/// Krein-style weighted projection pair, conjugated by a Haar unitary.
inline GeneratedPair random_quasi_pair(Index n, Rng& rng) {
  using numlin::psd_sqrt;
  for (;;) {
    GeneratedPair out;
    const int pick = int(rng.index(3));
    if (pick == 0 && n % 2 == 0 && n >= 2) {
      const Index m = n / 2;
      CMatd A = random_hermitian_unit_gap(m, rng);
      CMatd L = psd_sqrt((A * A - A));
      CMatd P = CMatd::Zero(n, n), Q = CMatd::Zero(n, n);
      P.topLeftCorner(m, m).setIdentity();
      Q.topLeftCorner(m, m) = A;
      Q.topRightCorner(m, m) = -L;
      Q.bottomLeftCorner(m, m) = L;
      Q.bottomRightCorner(m, m) = CMatd::Identity(m, m) - A;
      out = {P, Q, "hermitian_block"};
    } else if (pick == 1) {
      const Index p = 1 + rng.index(std::max<Index>(n - 1, 1));
      CMatd Qh = random_weighted_projection(p, n - p, rng);
      CMatd Ph = CMatd::Zero(n, n);
      Ph.topLeftCorner(p, p).setIdentity();
      out = {Ph, Qh, "krein"};
    } else {
      // matched pair of a random idempotent, with an orthogonal summand so
      // the intersections H1..H4 are not always trivial
      const Index k = 1 + rng.index(std::max<Index>(n - 1, 1));
      CMatd Q = random_idempotent(n, k, rng);
      if (n >= 4 && rng.uniform() < 0.5) {
        const Index half = n / 2;
        CMatd Q1 = random_idempotent(half, std::max<Index>(1, rng.index(half)), rng);
        CMatd P2 = haar_projection(n - half, rng.index(n - half + 1), rng);
        Q = CMatd::Zero(n, n);
        Q.topLeftCorner(half, half) = Q1;
        Q.bottomRightCorner(n - half, n - half) = P2;
      }
      // m(Q) = (1/2)(|Q*|+Q*) |Q*|^dag (|Q*|+I)^{-1} (|Q*|+Q)
      CMatd absQs = psd_sqrt((Q * Q.adjoint()));
      CMatd I = CMatd::Identity(n, n);
      CMatd mQ = 0.5 * (absQs + Q.adjoint()) * numlin::pinv(absQs) *
                 (absQs + I).llt().solve(I) * (absQs + Q);
      mQ = (mQ + mQ.adjoint()) / 2.0;
      out = {mQ, Q, "matched"};
    }
    CMatd U = haar_unitary(n, rng);
    out.P = U * out.P * U.adjoint();
    out.Q = U * out.Q * U.adjoint();
    out.P = (out.P + out.P.adjoint()) / 2.0;
    if (detail::meet_spectra_clean(out.P, out.Q)) return out;
  }
}

}  // namespace qpp::rng
