#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "aforge/attractor.hpp"
#include "aforge/gallery.hpp"
#include "aforge/perfectness.hpp"

using namespace aforge;
using Catch::Approx;

namespace {

std::vector<CPoint> cantor_points(int depth) {
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

// Largest consecutive-distance ratio over all centres, inner radius >= floor.
double brute_max_ratio(const std::vector<CPoint>& pts, double floor) {
  const double diam = diameter(pts);
  double best = 0.0;
  for (std::size_t c = 0; c < pts.size(); ++c) {
    std::vector<double> d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i != c) d.push_back(std::abs(pts[i] - pts[c]));
    }
    std::sort(d.begin(), d.end());
    for (std::size_t j = 0; j + 1 < d.size(); ++j) {
      if (d[j] >= floor && d[j] > 0 && d[j + 1] <= diam) best = std::max(best, d[j + 1] / d[j]);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("largest gap about the Cantor left endpoint is the middle third") {
  const auto e = build_entry("cantor3");
  const auto a = iterate_attractor(e.system, 0.7 * std::pow(3.0, -7));
  const auto certs = separating_annuli(a.cloud, 0.0, 4 * a.cloud.resolution);
  REQUIRE_FALSE(certs.empty());
  // ratio-2 gaps tie at every scale; the larger outer radius wins
  CHECK(certs.front().annulus.r_inner == Approx(1.0 / 3.0));
  CHECK(certs.front().annulus.r_outer == Approx(2.0 / 3.0));
  CHECK(certs.front().ratio_log10 == Approx(std::log10(2.0)));
  for (std::size_t i = 1; i < certs.size(); ++i) CHECK(certs[i].ratio_log10 <= certs[i - 1].ratio_log10);
  for (const auto& c : certs) {
    CHECK(c.verified_empty);
    CHECK(verify_separation(a.cloud, c.annulus));
    CHECK(std::abs(c.inner_witness - c.annulus.center) <= c.annulus.r_inner);
    CHECK(std::abs(c.outer_witness - c.annulus.center) >= c.annulus.r_outer);
  }
  CHECK_FALSE(verify_separation(a.cloud, Annulus::linear(0.0, 0.1, 0.5)));
}

TEST_CASE("separating annuli preconditions") {
  PointCloud c;
  c.points = {0.0, 1.0, 3.0};
  c.resolution = 0.01;
  CHECK_THROWS_AS(separating_annuli(c, 0.5, 0.1), UsageError);
  CHECK_THROWS_AS(separating_annuli(c, 0.0, 0.001), PreconditionError);
  const auto certs = separating_annuli(c, 0.0, 0.1);
  REQUIRE(certs.size() == 1);
  CHECK(certs.front().annulus.ratio() == Approx(3.0));
}

TEST_CASE("Cantor uniform-perfectness estimate matches the all-centres oracle") {
  const auto e = build_entry("cantor3");
  std::vector<AttractorApprox> clouds;
  for (double cell : e.plan.cells) clouds.push_back(iterate_attractor(e.system, cell));
  const auto rep = up_estimate(clouds, e.plan.centers_per_cloud, 4.0);
  CHECK(rep.verdict == Verdict::bounded);
  REQUIRE(rep.M_estimate);
  const auto pts = cantor_points(8);
  const double oracle = brute_max_ratio(pts, 4.0 * std::pow(3.0, -8));
  CHECK(oracle == Approx(2.5).epsilon(1e-9));
  CHECK(*rep.M_estimate == Approx(oracle).epsilon(0.01));
  CHECK(rep.per_resolution.size() == e.plan.cells.size());
}

TEST_CASE("verdict classification") {
  const auto e = build_entry("ex43");
  std::vector<AttractorApprox> clouds;
  for (double cell : e.plan.cells) clouds.push_back(iterate_attractor(e.system, cell));
  const auto rep = up_estimate(clouds, 0, 4.0);
  CHECK(rep.verdict == Verdict::growing);
  CHECK_FALSE(rep.M_estimate);

  // finite sets never get a bounded verdict
  const auto f = build_entry("ex46-n5");
  std::vector<AttractorApprox> fin;
  for (double cell : f.plan.cells) fin.push_back(iterate_attractor(f.system, cell));
  const auto frep = up_estimate(fin, 0, 4.0);
  CHECK(frep.verdict == Verdict::inconclusive);
  CHECK_FALSE(frep.warnings.empty());

  std::reverse(clouds.begin(), clouds.end());
  CHECK_THROWS_AS(up_estimate(clouds, 0, 4.0), PreconditionError);
}

TEST_CASE("canonical non-perfect gaps have decreasing outer radii") {
  const auto e = build_entry("ex43");
  const auto a = iterate_attractor(e.system, e.plan.cells.back());
  double prev = INFINITY;
  for (std::size_t n = 0; n < e.expected.canonical_annuli.size(); ++n) {
    const auto& ann = e.expected.canonical_annuli[n];
    CHECK(verify_separation(a.cloud, ann));
    CHECK(ann.ratio() == Approx(std::pow(4.0, 2.0 * (n + 1) + 1) / 2.0));
    CHECK(ann.r_outer < prev);
    prev = ann.r_outer;
  }
}

TEST_CASE("fixed-depth pullback on the Cantor set is an exact rescaling") {
  const auto e = build_entry("cantor3");
  const auto a = iterate_attractor(e.system, 1e-4);
  const auto L = theorem_constants(e.system, a.cloud);
  SeparationCertificate cert;
  const int k = 5;
  cert.annulus = Annulus::linear(0.0, std::pow(3.0, -k), 2 * std::pow(3.0, -k));
  cert.ratio_log10 = cert.annulus.log10_ratio();
  PullbackOptions opt;
  opt.mode = PullbackMode::fixed_depth;
  opt.steps = k - 1;
  const auto p = pullback_annulus(e.system, Word{{0}}, cert, L, a.cloud, opt);
  CHECK(p.expanded.r_inner == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p.expanded.r_outer == Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p.ratio_ok);
  CHECK(p.separation_ok);
  CHECK(p.m_star == static_cast<std::size_t>(k - 1));
}

TEST_CASE("proof-mode pullback lands in the outer-radius window") {
  const auto e = build_entry("cantor3");
  const auto a = iterate_attractor(e.system, 1e-4);
  const auto L = theorem_constants(e.system, a.cloud);
  SeparationCertificate cert;
  const double r = std::pow(3.0, -12);
  cert.annulus = Annulus::linear(0.0, r, 10 * r);
  REQUIRE(cert.annulus.r_outer < L.delta / (10 * L.C));
  const auto p = pullback_annulus(e.system, Word{{0}}, cert, L, a.cloud);
  CHECK(p.mode == PullbackMode::proof);
  CHECK(p.m_star >= 1);
  CHECK(p.ratio_ok);
  CHECK(p.outer_window_ok);
  CHECK(p.expanded.r_outer >= p.outer_radius_bounds.first * (1 - 1e-9));
  CHECK(p.expanded.r_outer <= p.outer_radius_bounds.second * (1 + 1e-9));
  // affine branches: the ratio is preserved exactly
  CHECK(p.expanded.log10_ratio() == Approx(1.0).epsilon(1e-9));

  cert.annulus = Annulus::linear(0.0, r, 5 * r);
  CHECK_THROWS_AS(pullback_annulus(e.system, Word{{0}}, cert, L, a.cloud), HypothesisError);
  cert.annulus = Annulus::linear(0.5, r, 10 * r);
  CHECK_THROWS_AS(pullback_annulus(e.system, Word{{0}}, cert, L, a.cloud), PreconditionError);
}

TEST_CASE("pullback through a nonlinear word keeps the ratio bound") {
  const auto e = build_entry("ex41");
  const auto a = iterate_attractor(e.system, 4e-3);
  const auto L = theorem_constants(e.system, a.cloud);
  const Word w{{0, 1}};
  const CPoint fp = fixed_point(e.system, w);
  SeparationCertificate cert;
  const double R = 0.5 * L.delta / (10 * L.C);
  cert.annulus = Annulus::linear(fp, R / 20, R);
  const auto p = pullback_annulus(e.system, w, cert, L, a.cloud);
  CHECK(p.ratio_ok);
  CHECK(p.outer_window_ok);
  CHECK(p.expanded.log10_ratio() >= std::log10(20.0 / 9.0));
}
