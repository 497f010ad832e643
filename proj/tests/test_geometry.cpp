#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "aforge/geometry.hpp"
#include "aforge/rng.hpp"

using namespace aforge;
using Catch::Approx;

namespace {

std::vector<CPoint> random_points(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  Xorshift64Star rng(seed);
  std::vector<CPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(scale * (2 * rng.uniform() - 1), scale * (2 * rng.uniform() - 1));
  return pts;
}

// Simpson integral of the density along the straight segment z -> w.
double path_length(const Disk& u, CPoint z, CPoint w, int n = 20000) {
  double sum = 0.0;
  const double h = 1.0 / n;
  for (int k = 0; k <= n; ++k) {
    const double wgt = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    sum += wgt * hyperbolic_density(u, z + (w - z) * (k * h));
  }
  return sum * h / 3.0 * std::abs(w - z);
}

}  // namespace

TEST_CASE("hyperbolic distance equals the density integral along a diameter") {
  const Disk unit(0.0, 1.0);
  CHECK(hyperbolic_distance(unit, 0.0, 0.5) == Approx(path_length(unit, 0.0, 0.5)).epsilon(1e-10));
  CHECK(hyperbolic_distance(unit, -0.3, 0.6) == Approx(path_length(unit, -0.3, 0.6)).epsilon(1e-10));
  // scaled and shifted disk: geodesics through the centre are still diameters
  const Disk d({0.5, -0.2}, 0.8);
  const CPoint a = d.center + std::polar(0.7, 1.1);
  CHECK(hyperbolic_distance(d, d.center, a) == Approx(path_length(d, d.center, a)).epsilon(1e-10));
  CHECK(hyperbolic_density(d, d.center) == Approx(2.0 / 0.8));
}

TEST_CASE("hyperbolic distance is symmetric and satisfies the triangle inequality") {
  const Disk d({0.1, 0.2}, 0.9);
  Xorshift64Star rng(5);
  auto sample = [&] { return d.center + std::polar(0.89 * std::sqrt(rng.uniform()), 6.283 * rng.uniform()); };
  for (int i = 0; i < 200; ++i) {
    const CPoint x = sample(), y = sample(), z = sample();
    CHECK(hyperbolic_distance(d, x, y) == Approx(hyperbolic_distance(d, y, x)));
    CHECK(hyperbolic_distance(d, x, z) <= hyperbolic_distance(d, x, y) + hyperbolic_distance(d, y, z) + 1e-12);
  }
  CHECK_THROWS_AS(hyperbolic_distance(d, d.center, d.center + 0.9), DomainError);
}

TEST_CASE("annulus keeps linear and log radii") {
  const auto a = Annulus::linear(0.0, 0.25, 2.5);
  CHECK(a.log10_ratio() == Approx(1.0));
  CHECK(a.ratio() == Approx(10.0));
  CHECK(a.contains_strictly(1.0));
  CHECK_FALSE(a.contains_strictly(0.25));
  CHECK_FALSE(a.contains_strictly(2.5));
  CHECK_THROWS_AS(Annulus::linear(0.0, 1.0, 1.0), PreconditionError);

  const auto deep = Annulus::from_log10(0.0, -1520.1, -159.2);
  CHECK_FALSE(deep.linear_representable);
  CHECK(deep.r_inner == 0.0);
  CHECK(deep.log10_ratio() == Approx(1360.9));

  const auto mid = Annulus::from_log10(0.0, 529 * std::log10(0.75), -23 * std::log10(2.0));
  CHECK(mid.linear_representable);
  CHECK(mid.log10_r_inner == Approx(-66.092).margin(1e-3));
}

TEST_CASE("log-radial points round-trip") {
  const CPoint z = std::polar(3e-7, -2.0);
  const auto p = LogRadialPoint::from_point(z);
  CHECK(std::abs(p.to_point() - z) < 1e-20);
  CHECK(LogRadialPoint::from_point(0.0).is_origin());
  CHECK(wrap_angle(7.0) == Approx(7.0 - 2 * std::numbers::pi));
}

TEST_CASE("kd-tree nearest agrees with brute force") {
  const auto pts = random_points(2000, 11);
  const KdTree tree(pts);
  const auto queries = random_points(300, 12, 1.5);
  for (const CPoint& q : queries) {
    double best = INFINITY;
    for (const CPoint& p : pts) best = std::min(best, std::norm(p - q));
    const auto [d2, idx] = tree.nearest(q);
    CHECK(d2 == best);
    CHECK(std::norm(pts[idx] - q) == best);
  }
  const auto [d2, idx] = tree.nearest_excluding(pts[7], 7);
  CHECK(idx != 7);
  CHECK(d2 > 0.0);
  CHECK(tree.any_within(pts[3], 1e-20));
  CHECK_FALSE(tree.any_within(CPoint(5, 5), 1.0));
}

TEST_CASE("hausdorff distance on explicit sets") {
  const std::vector<CPoint> a = {0.0, 1.0};
  const std::vector<CPoint> b = {0.0, 1.0, 3.0};
  CHECK(hausdorff_distance(a, b) == Approx(2.0));
  CHECK(directed_hausdorff(a, KdTree(b)) == 0.0);
  CHECK(directed_hausdorff(b, KdTree(a)) == Approx(2.0));
  CHECK(hausdorff_distance(a, a) == 0.0);
}

TEST_CASE("grid dedup keeps the first point of each cell") {
  PointCloud p;
  for (int i = 0; i < 10000; ++i) p.points.emplace_back(i / 9999.0, 0.0);
  const auto d = dedup_grid(p, 0.01);
  CHECK(d.size() <= 101);
  CHECK(d.size() >= 100);
  CHECK(d.points.front() == CPoint(0.0, 0.0));
  CHECK(d.resolution == 0.01);

  GridDeduper g(0.1);
  CHECK(g.insert({0.01, 0.0}));
  CHECK_FALSE(g.insert({-0.01, 0.0}));  // same lattice-centred cell
  CHECK_FALSE(g.insert({0.0, 1e-30}));
  CHECK_FALSE(g.insert({0.0, -1e-30}));
  CHECK(g.insert({0.06, 0.0}));
  CHECK_THROWS_AS(GridDeduper(0.0), PreconditionError);
}

TEST_CASE("convex hull and diameter") {
  const std::vector<CPoint> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}};
  const auto h = convex_hull(pts);
  CHECK(h.size() == 4);
  double area = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const CPoint a = h[i], b = h[(i + 1) % h.size()];
    area += a.real() * b.imag() - b.real() * a.imag();
  }
  CHECK(area / 2 == Approx(1.0));  // positive: counter-clockwise
  CHECK(diameter(pts) == Approx(std::sqrt(2.0)));
  CHECK(segment_distance({0.5, 2.0}, {0, 0}, {1, 0}) == Approx(2.0));
  CHECK(segment_distance({2.0, 0.0}, {0, 0}, {1, 0}) == Approx(1.0));
}

TEST_CASE("cloud CSV round-trips bit for bit") {
  PointCloud c;
  c.points = random_points(500, 3, 1e-3);
  c.points.push_back({0.1, -1e-300});
  const auto text = cloud_to_csv(c);
  CHECK(text.rfind("re,im\n", 0) == 0);
  const auto back = cloud_from_csv(text);
  REQUIRE(back.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(back.points[i] == c.points[i]);
  CHECK_THROWS_AS(cloud_from_csv("x,y\n1,2\n"), IoError);
  CHECK_THROWS_AS(cloud_from_csv("re,im\n1;2\n"), IoError);
}
