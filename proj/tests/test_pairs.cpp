#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "qpp/pairs.hpp"
#include "qpp/rng.hpp"

using namespace qpp;
using namespace qpp::pairs;
using std::complex;

namespace {
const double SQ2 = std::sqrt(2.0);

CMatd closed_form_m_of_Q_a1() {
  // (1/(2*sqrt(2))) [[sqrt(2)+1, 1], [1, sqrt(2)-1]]
  CMatd P(2, 2);
  P << SQ2 + 1.0, 1.0, 1.0, SQ2 - 1.0;
  return P / (2.0 * SQ2);
}
}  // namespace

TEST_CASE("verify_pair accepts (P, P) for any projection") {
  rng::Rng gen(5);
  for (int t = 0; t < 8; ++t) {
    CMatd P = rng::haar_projection(5, Index(t % 6), gen);
    PairCheck<double> chk = verify_pair(P, P);
    CHECK(chk.accepted);
    CHECK(chk.pair->char_residual < 1e-12);
  }
}

TEST_CASE("verify_pair accepts the 2x2 closed-form pair") {
  CMatd Q(2, 2);
  Q << 1, 1, 0, 0;
  PairCheck<double> chk = verify_pair(closed_form_m_of_Q_a1(), Q);
  CHECK(chk.accepted);
}

TEST_CASE("verify_pair rejects with the exact characterization defect") {
  CMatd P = CMatd::Zero(2, 2);
  P(0, 0) = 1.0;
  CMatd Q(2, 2);
  Q << 1, 1, 0, 0;
  PairCheck<double> chk = verify_pair(P, Q);
  CHECK(!chk.accepted);
  CHECK(chk.failed_invariant == "characterization");
  // (2P-I) Q (2P-I) = [[1,-1],[0,0]] vs Q^* = [[1,0],[1,0]]
  CMatd diff(2, 2);
  diff << 0, -1, -1, 0;
  CHECK(chk.sym_residual == doctest::Approx(numlin::op_norm(diff)).epsilon(1e-12));
  CHECK(chk.sym_residual > 0.5);
}

TEST_CASE("verify_pair typed rejections") {
  CMatd I = CMatd::Identity(2, 2);
  CMatd notproj(2, 2);
  notproj << 1, 1, 0, 0;  // idempotent but not Hermitian
  CHECK(verify_pair(notproj, I).failed_invariant == "P is not a projection");
  CMatd notidem = 2.0 * I;
  CHECK(verify_pair(I, notidem).failed_invariant == "Q is not idempotent");
  CHECK_THROWS_AS(verify_pair(I, CMatd::Zero(3, 3)), InputError);
}

TEST_CASE("sigma closure yields eight valid pairs") {
  rng::Rng gen(11);
  CMatd P = rng::haar_projection(4, 2, gen);
  auto eight = sigma_closure(*verify_pair(P, P).pair);
  for (const auto& pr : eight) CHECK(pr.char_residual < 1e-10);

  CMatd Q(2, 2);
  Q << 1, 1, 0, 0;
  auto eight2 = sigma_closure(*verify_pair(closed_form_m_of_Q_a1(), Q).pair);
  for (const auto& pr : eight2) CHECK(pr.char_residual < 1e-10);

  for (int t = 0; t < 10; ++t) {
    const Index n = 2 + Index(gen.index(9));
    auto gp = rng::random_quasi_pair(n, gen);
    auto chk = verify_pair(gp.P, gp.Q);
    REQUIRE(chk.accepted);
    auto eight3 = sigma_closure(*chk.pair);
    for (const auto& pr : eight3) CHECK(pr.char_residual < 1e-8);
  }
}

TEST_CASE("matched projection of a projection is itself") {
  rng::Rng gen(13);
  CMatd P = rng::haar_projection(5, 3, gen);
  MatchedResult<double> m = matched_projection(P);
  CHECK(numlin::op_norm((m.mQ - P).eval()) < 1e-10);
}

TEST_CASE("matched projection closed form for a = 1") {
  CMatd Q(2, 2);
  Q << 1, 1, 0, 0;
  MatchedResult<double> m = matched_projection(Q);
  CHECK(numlin::op_norm((m.mQ - closed_form_m_of_Q_a1()).eval()) < 1e-12);
  CHECK(m.pinv_crosscheck < 1e-10);
  CHECK(m.projection_residual < 1e-12);
}

TEST_CASE("range of m(Q) equals the ranges of |Q^*|+Q^* and |Q|+Q") {
  rng::Rng gen(17);
  for (int t = 0; t < 12; ++t) {
    const Index n = 2 + Index(gen.index(7));
    CMatd Q = rng::random_idempotent_any_rank(n, gen);
    MatchedResult<double> m = matched_projection(Q);
    CMatd absQ = numlin::psd_sqrt(Q.adjoint() * Q);
    Subspace<double> RmQ = numlin::range_space(m.mQ);
    Subspace<double> R1 = numlin::range_space(m.absQstar + Q.adjoint());
    Subspace<double> R2 = numlin::range_space(absQ + Q);
    CHECK(numlin::subspace_gap(RmQ, R1) < 1e-8);
    CHECK(numlin::subspace_gap(RmQ, R2) < 1e-8);
    // R(|Q^*|) = R(Q)
    CHECK(numlin::subspace_gap(numlin::range_space(m.absQstar),
                               numlin::range_space(Q)) < 1e-8);
  }
}

TEST_CASE("matched projection functional identities") {
  rng::Rng gen(19);
  for (int t = 0; t < 12; ++t) {
    const Index n = 2 + Index(gen.index(7));
    CMatd Q = rng::random_idempotent_any_rank(n, gen);
    const CMatd I = CMatd::Identity(n, n);
    CMatd m1 = matched_projection(Q).mQ;
    CHECK(numlin::op_norm((matched_projection(Q.adjoint().eval()).mQ - m1).eval()) < 1e-8);
    CHECK(numlin::op_norm((matched_projection((I - Q).eval()).mQ - (I - m1)).eval()) < 1e-8);
  }
  // edge cases: the trivial idempotents
  const CMatd Z = CMatd::Zero(3, 3);
  CHECK(numlin::op_norm(matched_projection(Z).mQ) < 1e-14);
  const CMatd I3 = CMatd::Identity(3, 3);
  CHECK(numlin::op_norm((matched_projection(I3).mQ - I3).eval()) < 1e-14);
}

TEST_CASE("range projection of an idempotent") {
  rng::Rng gen(23);
  CMatd P = rng::haar_projection(4, 2, gen);
  CHECK(numlin::op_norm((range_projection_of_idempotent(P) - P).eval()) < 1e-10);

  CMatd Q(2, 2);
  Q << 1, 1, 0, 0;
  CMatd D = CMatd::Zero(2, 2);
  D(0, 0) = 1.0;
  CHECK(numlin::op_norm((range_projection_of_idempotent(Q) - D).eval()) < 1e-12);

  for (int t = 0; t < 12; ++t) {
    const Index n = 2 + Index(gen.index(8));
    CMatd R = rng::random_idempotent_any_rank(n, gen);
    CMatd via_inverse = range_projection_of_idempotent(R);
    CMatd via_svd = numlin::projector(numlin::range_space(R));
    CHECK(numlin::op_norm((via_inverse - via_svd).eval()) < 1e-9);
  }
  CHECK_THROWS_AS(range_projection_of_idempotent((2.0 * P).eval()), InputError);
}

TEST_CASE("build_from_A on fixed generators") {
  const CMatd I1 = CMatd::Identity(1, 1);
  QuasiPair<double> trivial = build_from_A(I1);
  CHECK(numlin::op_norm((trivial.P - trivial.Q).eval()) < 1e-14);

  CMatd A(1, 1);
  A(0, 0) = 2.0;
  QuasiPair<double> pr = build_from_A(A);
  CMatd Qexp(2, 2);
  Qexp << 2.0, -SQ2, SQ2, -1.0;
  CHECK(numlin::op_norm((pr.Q - Qexp).eval()) < 1e-12);
  CHECK(numlin::op_norm((pr.Q * pr.Q - pr.Q).eval()) < 1e-12);

  CMatd bad(1, 1);
  bad(0, 0) = 0.5;
  CHECK_THROWS_AS(build_from_A(bad), NumericalError);
}

TEST_CASE("build_krein acceptance logic") {
  rng::Rng gen(29);
  const CMatd I = CMatd::Identity(3, 3);
  // J = I: accepted exactly when Q is a projection
  CMatd Pproj = rng::haar_projection(3, 1, gen);
  CHECK(build_krein(I, Pproj).accepted);
  CMatd Qobl = rng::random_idempotent(3, 1, gen);
  while (numlin::herm_gap(Qobl) < 1e-3) Qobl = rng::random_idempotent(3, 1, gen);
  CHECK(!build_krein(I, Qobl).accepted);

  // J = diag(1, -1), Q = [[1,0],[1,0]]: JQ is not Hermitian
  CMatd J2 = CMatd::Zero(2, 2);
  J2(0, 0) = 1.0;
  J2(1, 1) = -1.0;
  CMatd Q2(2, 2);
  Q2 << 1, 0, 1, 0;
  KreinResult<double> kr = build_krein(J2, Q2);
  CHECK(!kr.accepted);
  CHECK(kr.weighted_residual > 0.5);

  CHECK_THROWS_AS(build_krein(Q2, Q2), InputError);  // J not a symmetry

  // random weighted projections are accepted and agree with verify_pair
  for (int t = 0; t < 10; ++t) {
    const Index p = 1 + Index(gen.index(3)), q = 1 + Index(gen.index(3));
    const Index n = p + q;
    CMatd U = rng::haar_unitary(n, gen);
    CMatd D = CMatd::Identity(n, n);
    D.bottomRightCorner(q, q) *= -1.0;
    CMatd J = U * D * U.adjoint();
    J = (J + J.adjoint()) / 2.0;
    CMatd Qw = U * rng::random_weighted_projection(p, q, gen) * U.adjoint();
    KreinResult<double> res = build_krein(J, Qw);
    CHECK(res.accepted);
    CHECK(res.pair->char_residual < 1e-9);
  }
}

TEST_CASE("two_by_two_family closed forms for a = 1") {
  TwoByTwoFamily<double> fam = two_by_two_family<double>(1.0);
  const CMatd I = CMatd::Identity(2, 2);
  CHECK(numlin::op_norm((fam.P[0] - closed_form_m_of_Q_a1()).eval()) < 1e-14);
  CHECK(numlin::op_norm((fam.P[2] - (I - fam.P[0])).eval()) < 1e-14);
  CHECK(numlin::op_norm((fam.P[3] - (I - fam.P[1])).eval()) < 1e-14);
  // the family consists of m(Q) and its complement, each listed twice
  CHECK(numlin::op_norm((fam.P[1] - (I - fam.P[0])).eval()) < 1e-14);
  CHECK(fam.matched_gap < 1e-12);
  for (const auto& P : fam.P) CHECK(verify_pair(P, fam.Q).accepted);
}

TEST_CASE("two_by_two_family validates for complex a") {
  TwoByTwoFamily<double> fam = two_by_two_family<double>({0.0, 2.0});
  for (const auto& P : fam.P) {
    PairCheck<double> chk = verify_pair(P, fam.Q);
    CHECK(chk.accepted);
    CHECK(chk.sym_residual < 1e-10);
  }
  CHECK_THROWS_AS(two_by_two_family<double>(0.0), InputError);
}

TEST_CASE("no fifth projection exists for the 2x2 idempotent") {
  // sweep all rank-1 projections of C^2 over a spherical grid, plus the two
  // trivial projections; every near-solution must sit next to a closed form
  TwoByTwoFamily<double> fam = two_by_two_family<double>(1.0);
  const CMatd I = CMatd::Identity(2, 2);
  const CMatd Q = fam.Q;
  auto char_residual = [&](const CMatd& P) {
    const CMatd S = 2.0 * P - I;
    return numlin::op_norm((Q.adjoint() - S * Q * S).eval());
  };
  CHECK(char_residual(CMatd::Zero(2, 2)) > 1e-6);
  CHECK(char_residual(I) > 1e-6);
  const int nth = 100, nph = 100;  // 10^4 grid points on the sphere
  int near_solutions_off_family = 0;
  for (int it = 0; it < nth; ++it)
    for (int ip = 0; ip < nph; ++ip) {
      const double th = 3.14159265358979323846 * (it + 0.5) / nth;
      const double ph = 2.0 * 3.14159265358979323846 * ip / nph;
      // P = (I + n . sigma)/2, a rank-1 projection
      const double x = std::sin(th) * std::cos(ph), y = std::sin(th) * std::sin(ph),
                   z = std::cos(th);
      CMatd P(2, 2);
      P << 1.0 + z, complex<double>(x, -y), complex<double>(x, y), 1.0 - z;
      P /= 2.0;
      if (char_residual(P) < 1e-6) {
        double dmin = 1e9;
        for (const auto& Pf : fam.P)
          dmin = std::min(dmin, numlin::op_norm((P - Pf).eval()));
        if (dmin > 0.05) ++near_solutions_off_family;
      }
    }
  CHECK(near_solutions_off_family == 0);
}

TEST_CASE("distance extremality probe") {
  rng::Rng gen(31);
  // Q a projection: the lower bound is attained at zero distance
  CMatd P = rng::haar_projection(4, 2, gen);
  ProbeReport rp = distance_extremality_probe(P, 500, 7);
  CHECK(rp.lower_bound < 1e-10);
  CHECK(rp.violations == 0);
  CHECK(rp.min_dist >= -1e-12);

  CMatd Q(2, 2);
  Q << 1, 1, 0, 0;
  ProbeReport rq = distance_extremality_probe(Q, 10000, 42);
  CHECK(rq.violations == 0);
  CHECK(rq.min_dist >= rq.lower_bound - 1e-9);
  CHECK(rq.max_dist <= rq.upper_bound + 1e-9);

  CMatd Q6 = rng::random_idempotent(6, 3, gen);
  ProbeReport r6 = distance_extremality_probe(Q6, 2000, 9);
  CHECK(r6.violations == 0);
}

TEST_CASE("verdicts of the three characterizations agree") {
  rng::Rng gen(37);
  int accepts = 0;
  for (int t = 0; t < 60; ++t) {
    const Index n = 2 + Index(gen.index(5));
    CMatd P = rng::haar_projection_any_rank(n, gen);
    CMatd Q = rng::random_idempotent_any_rank(n, gen);
    PairCheck<double> chk = verify_pair(P, Q);
    const bool def_ok = chk.def_residual < 1e-8;
    const bool sym_ok = chk.sym_residual < 1e-8;
    const bool abs_ok = chk.abs_residual < 1e-8;
    CHECK(def_ok == sym_ok);
    CHECK(sym_ok == abs_ok);
    if (chk.accepted) ++accepts;
  }
  // independent draws are essentially never quasi-projection pairs
  CHECK(accepts <= 1);
}

TEST_CASE("probe rejects a non-idempotent") {
  CMatd M = 2.0 * CMatd::Identity(2, 2);
  CHECK_THROWS_AS(distance_extremality_probe(M, 10, 1), InputError);
}
