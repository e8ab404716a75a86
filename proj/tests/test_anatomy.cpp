#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qpp/anatomy.hpp"
#include "qpp/rng.hpp"

using namespace qpp;
using namespace qpp::anatomy;
using pairs::QuasiPair;
using pairs::verify_pair;

namespace {
const double SQ2 = std::sqrt(2.0);

QuasiPair<double> matched_2x2_pair() {
  CMatd Q(2, 2);
  Q << 1, 1, 0, 0;
  return pairs::matched_projection(Q).pair;
}

QuasiPair<double> a_family_scalar_2() {
  CMatd A(1, 1);
  A(0, 0) = 2.0;
  return pairs::build_from_A(A);
}
}  // namespace

TEST_CASE("anatomy of the diagonal pair (P, P)") {
  rng::Rng gen(3);
  CMatd P = rng::haar_projection(5, 2, gen);
  PairAnatomy<double> a = anatomize(*verify_pair(P, P).pair);
  CHECK(numlin::op_norm(a.T1) < 1e-12);
  CHECK(numlin::op_norm(a.T2) < 1e-12);
  CHECK(numlin::op_norm(a.T3) < 1e-12);
  CHECK(numlin::op_norm(a.T4) < 1e-12);
  CHECK(numlin::subspace_gap(a.H1, numlin::range_space(P)) < 1e-10);
  CHECK(numlin::subspace_gap(a.H4, numlin::null_space(P)) < 1e-10);
  CHECK(a.H2.dim() == 0);
  CHECK(a.H3.dim() == 0);
  CHECK(a.H5.dim() == 0);
  CHECK(a.H6.dim() == 0);
  CHECK(a.M.dim() == 0);
}

TEST_CASE("anatomy of the doubled scalar generator") {
  PairAnatomy<double> a = anatomize(a_family_scalar_2());
  CMatd T1(2, 2), T2(2, 2), T3(2, 2), T4(2, 2);
  T1 << -1, SQ2, 0, 0;
  T2 << 0, 0, SQ2, -1;
  T3 << 0, -SQ2, 0, 0;
  T4 << 0, 0, SQ2, 0;
  CHECK(numlin::op_norm((a.T1 - T1).eval()) < 1e-12);
  CHECK(numlin::op_norm((a.T2 - T2).eval()) < 1e-12);
  CHECK(numlin::op_norm((a.T3 - T3).eval()) < 1e-12);
  CHECK(numlin::op_norm((a.T4 - T4).eval()) < 1e-12);
  CHECK(a.H1.dim() == 0);  // 2 is not an eigenvalue-1 generator
  CHECK(a.h1_cross_gap < 1e-10);
  CHECK(a.h4_cross_gap < 1e-10);
}

TEST_CASE("adjoint formulas and featured identities on random pairs") {
  rng::Rng gen(7);
  for (int t = 0; t < 12; ++t) {
    const Index n = 2 + Index(gen.index(7));
    auto gp = rng::random_quasi_pair(n, gen);
    QuasiPair<double> pr = *verify_pair(gp.P, gp.Q).pair;
    PairAnatomy<double> a = anatomize(pr);
    const CMatd I = CMatd::Identity(n, n);
    const CMatd S = 2.0 * pr.P - I;
    CHECK(numlin::op_norm((a.T3.adjoint() + a.T4).eval()) < 1e-10);
    CHECK(numlin::op_norm((a.T4.adjoint() + a.T3).eval()) < 1e-10);
    CHECK(numlin::op_norm((a.T1.adjoint() - S * (I - pr.Q) * pr.P).eval()) < 1e-10);
    CHECK(numlin::op_norm((a.T1tilde.adjoint() - (I - pr.Q) * pr.P).eval()) < 1e-10);
    CHECK(numlin::op_norm((a.T2.adjoint() + S * pr.Q * (I - pr.P)).eval()) < 1e-10);
    CHECK(numlin::op_norm((a.T2tilde.adjoint() - pr.Q * (I - pr.P)).eval()) < 1e-10);
    // T1 + T2 self-adjoint
    CHECK(numlin::herm_gap(a.T1 + a.T2) < 1e-10);
    // commutation family |Ti| |Tj^*|^2 = |Ti|^2 |Tj^*|
    const CMatd absT[2] = {numlin::psd_sqrt(a.T1.adjoint() * a.T1),
                           numlin::psd_sqrt(a.T2.adjoint() * a.T2)};
    const CMatd absTs[2] = {numlin::psd_sqrt(a.T1 * a.T1.adjoint()),
                            numlin::psd_sqrt(a.T2 * a.T2.adjoint())};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(numlin::op_norm((absT[i] * absTs[j] * absTs[j] -
                               absT[i] * absT[i] * absTs[j])
                                  .eval()) < 1e-8);
    // H identities against the adjoint idempotent
    CHECK(a.h1_cross_gap < 1e-8);
    CHECK(a.h4_cross_gap < 1e-8);
    // M = cl R(P - Q) = cl R(T1 + T2) = cl R(T1 - T2)
    CHECK(numlin::subspace_gap(a.M, numlin::range_space(a.T1 + a.T2)) < 1e-8);
    CHECK(numlin::subspace_gap(a.M, numlin::range_space(a.T1 - a.T2)) < 1e-8);
  }
}

TEST_CASE("semiharmony certificate on the diagonal pair") {
  rng::Rng gen(11);
  CMatd P = rng::haar_projection(4, 2, gen);
  QuasiPair<double> pr = *verify_pair(P, P).pair;
  CertReport<double> rep = certify_semiharmony(anatomize(pr), pr);
  CHECK(rep.pass());
  CHECK(rep.worst() < 1e-12);
}

TEST_CASE("semiharmony certificate on the 2x2 matched pair") {
  QuasiPair<double> pr = matched_2x2_pair();
  CertReport<double> rep = certify_semiharmony(anatomize(pr), pr);
  CHECK(rep.pass());
  CHECK(rep.worst() < 1e-9);
}

TEST_CASE("harmony certificate on fixed pairs") {
  rng::Rng gen(13);
  CMatd P = rng::haar_projection(4, 1, gen);
  QuasiPair<double> pp = *verify_pair(P, P).pair;
  CertReport<double> rep = certify_harmony(anatomize(pp), pp);
  CHECK(rep.pass());

  QuasiPair<double> pr = a_family_scalar_2();
  CertReport<double> rep2 = certify_harmony(anatomize(pr), pr);
  CHECK(rep2.pass());
  CHECK(rep2.worst() < 1e-9);
}

TEST_CASE("both certificates pass on random pairs") {
  rng::Rng gen(17);
  for (int t = 0; t < 15; ++t) {
    const Index n = 2 + Index(gen.index(9));
    auto gp = rng::random_quasi_pair(n, gen);
    QuasiPair<double> pr = *verify_pair(gp.P, gp.Q).pair;
    PairAnatomy<double> a = anatomize(pr);
    CertReport<double> s = certify_semiharmony(a, pr);
    CertReport<double> h = certify_harmony(a, pr);
    INFO("kind=", gp.kind, " n=", n, " worst_semi=", s.worst(), " worst_harm=", h.worst());
    CHECK(s.pass());
    CHECK(h.pass());
  }
}

TEST_CASE("certificates are stable across the sigma closure") {
  rng::Rng gen(19);
  auto gp = rng::random_quasi_pair(6, gen);
  QuasiPair<double> pr = *verify_pair(gp.P, gp.Q).pair;
  for (const auto& member : pairs::sigma_closure(pr)) {
    PairAnatomy<double> a = anatomize(member);
    CHECK(certify_semiharmony(a, member).pass());
    CHECK(certify_harmony(a, member).pass());
  }
}

TEST_CASE("certify rejects a mismatched anatomy") {
  rng::Rng gen(23);
  CMatd P = rng::haar_projection(4, 2, gen);
  CMatd P2 = rng::haar_projection(4, 2, gen);
  QuasiPair<double> pr = *verify_pair(P, P).pair;
  QuasiPair<double> other = *verify_pair(P2, P2).pair;
  PairAnatomy<double> a = anatomize(pr);
  CHECK_THROWS_AS(certify_semiharmony(a, other), InputError);
}

TEST_CASE("restriction to M") {
  rng::Rng gen(29);
  // (P, P): M is trivial
  CMatd P = rng::haar_projection(4, 2, gen);
  Restriction<double> r0 = restrict_to_M(*verify_pair(P, P).pair);
  CHECK(r0.degenerate);
  CHECK(r0.compressed.size() == 0);

  // 2x2 matched pair: P0 - Q has full rank, so M is the whole space
  QuasiPair<double> pr = matched_2x2_pair();
  Restriction<double> r1 = restrict_to_M(pr);
  CHECK(!r1.degenerate);
  CHECK(r1.compressed.size() == 2);
  CHECK(numlin::rank_of((pr.P - pr.Q).eval()) == 2);

  for (int t = 0; t < 10; ++t) {
    const Index n = 2 + Index(gen.index(8));
    auto gp = rng::random_quasi_pair(n, gen);
    QuasiPair<double> rp = *verify_pair(gp.P, gp.Q).pair;
    Restriction<double> rr = restrict_to_M(rp);
    if (rr.degenerate) continue;
    CHECK(rr.compressed.char_residual < 1e-8);
    CHECK(rr.rank_T3_M == rr.rank_T3);
    CHECK(rr.rank_T4_M == rr.rank_T4);
    CHECK(numlin::op_norm((rr.isometry.adjoint() * rr.isometry -
                           CMatd::Identity(rr.compressed.size(), rr.compressed.size()))
                              .eval()) < 1e-12);
  }
}

TEST_CASE("matched pair witness") {
  rng::Rng gen(31);
  // Q a projection: the defect vanishes
  CMatd P = rng::haar_projection(4, 2, gen);
  MatchedWitness<double> w0 = matched_pair_witness(P);
  CHECK(numlin::op_norm(w0.defect) < 1e-10);
  CHECK(numlin::op_norm(w0.polar.V) < 1e-9);

  CMatd Q(2, 2);
  Q << 1, 1, 0, 0;
  MatchedWitness<double> w1 = matched_pair_witness(Q);
  CMatd Dexp(2, 2);
  Dexp << 0, -1, 0, 0;
  CHECK(numlin::op_norm((w1.defect - Dexp).eval()) < 1e-12);

  for (int t = 0; t < 10; ++t) {
    const Index n = 2 + Index(gen.index(7));
    CMatd Qr = rng::random_idempotent_any_rank(n, gen);
    MatchedWitness<double> w = matched_pair_witness(Qr);
    CHECK(w.t1_range_gap < 1e-8);
    CHECK(w.t2tilde_range_gap < 1e-8);
    CHECK(numlin::op_norm((w.defect - w.polar.V * w.polar.absT).eval()) < 1e-9);
  }
}
