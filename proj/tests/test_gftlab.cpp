#include <catch_amalgamated.hpp>

#include <cmath>

#include "aforge/gftlab.hpp"

using namespace aforge;
using Catch::Approx;

namespace {

template <class F>
UnivalentSample<F> certified(F f, Disk d) {
  UnivalentSample<F> s{std::move(f), d, false, {}};
  certify(s);
  REQUIRE(s.injectivity_certified);
  return s;
}

// root of M rho (2r - rho) / (r (r - rho)^2) = eta, then the 5% slack
double closed_form_rho(double M, double r, double eta) { return 0.95 * r * (1.0 - 1.0 / std::sqrt(1.0 + eta * r / M)); }

}  // namespace

TEST_CASE("injectivity radius matches the closed-form root") {
  CHECK(injectivity_radius(1, 1, 1) == Approx(0.95 * (1 - std::sqrt(2.0) / 2)).epsilon(1e-12));
  CHECK(injectivity_radius(1, 1, 1) == Approx(0.2782).margin(1e-4));
  for (double M : {0.5, 1.0, 3.0}) {
    for (double r : {0.1, 1.0}) {
      for (double eta : {0.01, 0.3, 2.0}) CHECK(injectivity_radius(M, r, eta) == Approx(closed_form_rho(M, r, eta)).epsilon(1e-12));
    }
  }
  CHECK(injectivity_radius(2, 1, 1) < injectivity_radius(1, 1, 1));
  CHECK(injectivity_radius(1, 1, 1e30) == Approx(0.95).epsilon(1e-6));
  CHECK(injectivity_radius(1, 1, 0) == 0.0);
  CHECK_THROWS_AS(injectivity_radius(0, 1, 1), PreconditionError);
}

TEST_CASE("koebe coverage on explicit univalent maps") {
  const auto id = certified(AnalyticMap::affine(1.0, 0.0), Disk(0.0, 1.0));
  const auto r1 = verify_koebe_coverage(id, 0.1);
  CHECK(r1.passed);
  CHECK(r1.worst == 0.0);
  CHECK(r1.checks > 0);

  const auto quad = certified(AnalyticMap({0.0, 1.0, 0.3}), Disk(0.0, 1.0));
  CHECK(verify_koebe_coverage(quad, {0.0, 0.1}).passed);

  // z / (1 - 0.9 z)^2 truncated at degree 12 on a small disk
  std::vector<CPoint> co(13, 0.0);
  for (int n = 1; n <= 12; ++n) co[n] = n * std::pow(0.9, n - 1);
  const auto koebe = certified(AnalyticMap(co), Disk(0.0, 0.1));
  CHECK(verify_koebe_coverage(koebe, 0.01).passed);

  CHECK_THROWS_AS(verify_koebe_coverage(id, 0.5), PreconditionError);
}

TEST_CASE("lipschitz bound ratios on explicit maps") {
  const auto id = certified(AnalyticMap::affine(1.0, 0.0), Disk(0.0, 1.0));
  const auto r1 = verify_lipschitz_bound(id, 0.0, 1.0);
  CHECK(r1.passed);
  CHECK(r1.worst == Approx(0.81).epsilon(1e-12));

  const auto half = certified(AnalyticMap::affine(0.5, 0.0), Disk(0.0, 1.0));
  CHECK(verify_lipschitz_bound(half, 0.0, 2.0).worst == Approx(0.81).epsilon(1e-12));

  // max of |1 + 0.3 z| on |z| = 0.1 is 1.03
  const auto quad = certified(AnalyticMap({0.0, 1.0, 0.3}), Disk(0.0, 1.0));
  const auto r3 = verify_lipschitz_bound(quad, 0.0, 1.0);
  CHECK(r3.passed);
  CHECK(r3.worst == Approx(0.81 * 1.03).epsilon(1e-6));
  CHECK(r3.worst <= 0.81 * 1.03 + 1e-15);

  CHECK_THROWS_AS(verify_lipschitz_bound(id, 0.0, 2.0), PreconditionError);
}

TEST_CASE("annulus distortion on explicit maps") {
  const auto id = certified(AnalyticMap::affine(1.0, 0.0), Disk(0.0, 20.0));
  const auto r1 = verify_annulus_distortion(id, 1.0, 10.0);
  CHECK(r1.passed);
  CHECK(r1.worst == Approx(9.0));  // (R'/r') / (R/9r) = 10 / (10/9)

  const auto dbl = certified(AnalyticMap::affine(2.0, 0.0), Disk(0.0, 1.0));
  CHECK(verify_annulus_distortion(dbl, 0.01, 0.1).worst == Approx(9.0));

  const auto quad = certified(AnalyticMap({0.0, 1.0, 0.3}), Disk(0.0, 1.0));
  const auto r3 = verify_annulus_distortion(quad, 0.001, 0.05);
  CHECK(r3.passed);
  CHECK(r3.worst * (0.05 / (9 * 0.001)) >= 50.0 / 9.0);

  CHECK_THROWS_AS(verify_annulus_distortion(id, 1.0, 5.0), PreconditionError);
}

TEST_CASE("certification rejects maps that fold the disk") {
  UnivalentSample<AnalyticMap> sq{AnalyticMap::monomial(1.0, 2), Disk(0.0, 1.0), false, {}};
  certify(sq);
  CHECK_FALSE(sq.injectivity_certified);
  CHECK_THROWS_AS(verify_koebe_coverage(sq, 0.01), PreconditionError);

  // Mobius map with its pole inside the disk
  UnivalentSample<MobiusMap> m{MobiusMap(1.0, 0.0, 1.0, -0.5), Disk(0.0, 1.0), false, {}};
  certify(m);
  CHECK_FALSE(m.injectivity_certified);
}

TEST_CASE("a corpus slice passes every lemma check") {
  const auto corpus = univalent_corpus(40, 20240601);
  REQUIRE(corpus.size() == 40);
  const auto results = verify_corpus(corpus);
  for (const auto& r : results) {
    INFO("sample " << r.index << " " << r.kind << " " << r.coverage.detail << r.lipschitz.detail << r.distortion.detail);
    CHECK(r.passed());
  }
  // deterministic
  const auto again = verify_corpus(univalent_corpus(40, 20240601));
  for (std::size_t i = 0; i < results.size(); ++i) CHECK(again[i].lipschitz.worst == results[i].lipschitz.worst);
}
