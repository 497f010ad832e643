#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "aforge/attractor.hpp"
#include "aforge/gallery.hpp"

using namespace aforge;
using Catch::Approx;

namespace {

// Left and right endpoints of the depth-d intervals of the middle-thirds set.
std::vector<CPoint> cantor_endpoints(int depth) {
  std::vector<double> lo = {0.0};
  double len = 1.0;
  for (int d = 0; d < depth; ++d) {
    len /= 3.0;
    std::vector<double> next;
    for (double x : lo) {
      next.push_back(x);
      next.push_back(x + 2.0 * len);
    }
    lo = std::move(next);
  }
  std::vector<CPoint> out;
  for (double x : lo) {
    out.emplace_back(x, 0.0);
    out.emplace_back(x + len, 0.0);
  }
  return out;
}

}  // namespace

TEST_CASE("deterministic Cantor cloud sits on the middle-thirds set") {
  const auto e = build_entry("cantor3");
  const double cell = 0.7 * std::pow(3.0, -8);
  const auto a = iterate_attractor(e.system, cell);
  const auto oracle = cantor_endpoints(10);
  // every stored point is an exact image of an endpoint, and every endpoint is near a stored point
  CHECK(directed_hausdorff(a.cloud.points, KdTree(oracle)) < 1e-12);
  CHECK(directed_hausdorff(oracle, KdTree(a.cloud.points)) <= 2.0 * cell);
  for (const CPoint& z : a.cloud.points) CHECK(z.imag() == 0.0);
  CHECK(a.method == Method::deterministic);
  CHECK_FALSE(a.residual_history.empty());
}

TEST_CASE("residuals are eventually non-increasing and contract geometrically") {
  const auto e = build_entry("cantor3");
  const auto a = iterate_attractor(e.system, 1e-5);
  const auto& h = a.residual_history;
  REQUIRE(h.size() >= 4);
  for (std::size_t i = 2; i + 1 < h.size(); ++i) CHECK(h[i + 1] <= h[i] + 1e-15);
  // Euclidean Lipschitz constant 1/3: each round shrinks the new-point offset
  for (std::size_t m = 1; m < h.size(); ++m) CHECK(h[m] <= std::pow(1.0 / 3.0, m) * h[0] / (1.0 - 1.0 / 3.0) + 1e-5);
  CHECK(a.residual == h.back());
  CHECK_FALSE(a.warning);
}

TEST_CASE("iteration and chaos game are bit-reproducible") {
  const auto e = build_entry("ex41");
  const auto a = iterate_attractor(e.system, 4e-3);
  const auto b = iterate_attractor(e.system, 4e-3);
  CHECK(a.cloud.points == b.cloud.points);
  const auto c1 = chaos_game(e.system, 7, 20000, 64, 4e-3);
  const auto c2 = chaos_game(e.system, 7, 20000, 64, 4e-3);
  const auto c3 = chaos_game(e.system, 8, 20000, 64, 4e-3);
  CHECK(c1.cloud.points == c2.cloud.points);
  CHECK(c1.cloud.points != c3.cloud.points);
  CHECK(c1.rng_seed == 7u);
  CHECK_THROWS_AS(chaos_game(e.system, 1, 10, 64, 4e-3), PreconditionError);
}

TEST_CASE("chaos game agrees with the deterministic cloud on the Cantor set") {
  const auto e = build_entry("cantor3");
  const double cell = 1e-3;
  const auto det = iterate_attractor(e.system, cell);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto cg = chaos_game(e.system, seed, 100000, 64, cell);
    CHECK(hausdorff_distance(cg.cloud.points, det.cloud.points) <= 2.0 * cell);
  }
}

TEST_CASE("invariance residual is at the cell scale") {
  const auto e = build_entry("cantor3");
  const auto a = iterate_attractor(e.system, 1e-4);
  const auto rep = invariance_residual(e.system, a);
  CHECK(rep.residual <= 2e-4);
  CHECK(rep.words_checked > 0);
}

TEST_CASE("finite attractors are detected with their exact points") {
  for (int n : {1, 3}) {
    const auto e = build_entry("ex46-n" + std::to_string(n));
    const auto k = detect_finite(e.system);
    REQUIRE(k);
    CHECK(*k == static_cast<std::size_t>(n));
    const auto a = iterate_attractor(e.system, 1e-6);
    REQUIRE(a.cloud.size() == static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const CPoint w = std::polar(0.1, 2.0 * std::numbers::pi * j / n);
      double best = INFINITY;
      for (const CPoint& z : a.cloud.points) best = std::min(best, std::abs(z - w));
      CHECK(best < 1e-9);
    }
  }
  CHECK_FALSE(detect_finite(build_entry("cantor3").system));
}

TEST_CASE("log shadow carries points below the linear threshold") {
  const auto e = build_entry("ex44");
  const auto a = iterate_attractor(e.system, 1e-8, 200, 0.0, e.plan.shadows.back());
  REQUIRE_FALSE(a.shadow.empty());
  for (const auto& p : a.shadow) {
    CHECK(p.log10_modulus < std::log10(4e-8));
    CHECK(p.log10_modulus >= e.plan.shadows.back()->log10_floor);
  }
  // the origin is a seed of the linear cloud
  CHECK(std::find(a.cloud.points.begin(), a.cloud.points.end(), CPoint{}) != a.cloud.points.end());
}

TEST_CASE("bad cells are rejected") {
  const auto e = build_entry("cantor3");
  CHECK_THROWS_AS(iterate_attractor(e.system, 0.0), PreconditionError);
  CHECK_THROWS_AS(iterate_attractor(e.system, -1.0), PreconditionError);
}
