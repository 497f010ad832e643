#pragma once

// Built-in systems: the worked example families plus a Cantor baseline,
// each with the verdicts the analysis is expected to reproduce and the
// resolution schedule used to reproduce them.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "aforge/attractor.hpp"
#include "aforge/error.hpp"
#include "aforge/geometry.hpp"
#include "aforge/maps.hpp"
#include "aforge/perfectness.hpp"
#include "aforge/system.hpp"

namespace aforge {

struct Expected {
  std::optional<std::size_t> finite_cardinality;
  std::optional<Verdict> up_verdict;
  std::optional<bool> eta_positive;
  std::vector<Annulus> canonical_annuli;  // outer radii decreasing
};

/// How to reproduce the expected verdict: one deterministic cloud per
/// resolution (finest last), each optionally with a log shadow.
struct AnalysisPlan {
  std::vector<double> cells;
  std::vector<std::optional<ShadowOptions>> shadows;  // empty or same length as cells
  double floor_factor = 4.0;
  std::size_t centers_per_cloud = 256;
  double default_cell = 1e-4;
};

struct GalleryEntry {
  std::string id;
  IFSystem system;
  Expected expected;
  AnalysisPlan plan;
  std::string notes;
};

inline std::vector<std::string> gallery_ids() {
  return {"ex41", "ex42", "ex43", "ex44", "ex46-n<k>", "cantor3"};
}

namespace detail {

/// z^2 + c
inline AnalyticMap quadratic(CPoint c) { return AnalyticMap({c, 0.0, 1.0}, "z^2+c"); }

inline GalleryEntry ex41() {
  GalleryEntry e;
  e.id = "ex41";
  const double eps = 0.4;
  const std::vector<CPoint> c = {0.2, std::polar(0.2, std::numbers::pi / 8), std::polar(0.2, -std::numbers::pi / 8)};
  for (const auto& ci : c) e.system.generators.push_back(quadratic(ci));
  // Images lie in Disk(c_i, eps^2 = 0.16); margin 0.18 keeps the closure in
  // Disk(0, 0.38) and in Re z > 0.2 cos(pi/8) - 0.18 > 0.
  e.system.domain = DomainSpec::make_hull(c, eps * eps + 0.02);
  e.system.name = "ex41 (eps=0.4, three quadratics)";
  e.expected.up_verdict = Verdict::bounded;
  e.expected.eta_positive = true;
  e.plan.cells = {4e-3, 2e-3, 1e-3};
  e.plan.default_cell = 1e-3;
  e.plan.centers_per_cloud = 512;
  return e;
}

inline GalleryEntry ex42() {
  GalleryEntry e;
  e.id = "ex42";
  // eps = 0.4, rho = 0.02: c_i in Ann(0; 0.18, 0.22), domain Disk(0, eps).
  const std::vector<CPoint> c = {std::polar(0.20, 0.1), std::polar(0.18, 1.7), std::polar(0.22, 3.3),
                                 std::polar(0.21, 4.8)};
  for (const auto& ci : c) e.system.generators.push_back(quadratic(ci));
  e.system.domain = DomainSpec::make_disk(Disk(0.0, 0.4));
  e.system.name = "ex42 (eps=0.4, rho=0.02, truncated to 4 maps)";
  e.expected.up_verdict = Verdict::bounded;
  e.expected.eta_positive = true;
  e.plan.cells = {4e-3, 2e-3, 1e-3};
  e.plan.default_cell = 2e-3;
  e.notes = "index set truncated to 4 maps; expected eta >= 2 rho = 0.04";
  return e;
}

inline double ex43_b(int n) { return std::pow(4.0, -static_cast<double>(n) * n); }
inline double ex43_a(int n) { return ex43_b(n) / 2.0; }

inline GalleryEntry ex43() {
  GalleryEntry e;
  e.id = "ex43";
  constexpr int N = 4;
  for (int n = 1; n <= N; ++n) {
    e.system.generators.push_back(AnalyticMap::affine(ex43_b(n) - ex43_a(n), ex43_a(n), "g" + std::to_string(n)));
  }
  e.system.domain = DomainSpec::make_hull({0.0, 0.3}, 0.05);
  e.system.name = "ex43 (b_n = 4^-n^2, a_n = b_n/2, truncated at N=4)";
  e.expected.up_verdict = Verdict::growing;
  e.expected.eta_positive = true;
  for (int n = 1; n <= 3; ++n) e.expected.canonical_annuli.push_back(Annulus::linear(0.0, ex43_b(n + 1), ex43_a(n)));
  e.plan.cells = {1e-4, 1e-7, 1e-12};
  e.plan.default_cell = 1e-7;
  e.plan.centers_per_cloud = 0;
  e.notes = "family truncated at N=4; canonical annuli for n = 1..3 only";
  return e;
}

inline GalleryEntry ex44() {
  GalleryEntry e;
  e.id = "ex44";
  e.system.generators.push_back(AnalyticMap::monomial(1.0, 23, "z^23"));
  e.system.generators.push_back(AnalyticMap({0.75, -1.0, 1.0}, "(z-1/2)^2+1/2"));
  e.system.domain = DomainSpec::make_union({DomainSpec::make_hull({0.0, 0.75}, 0.1), DomainSpec::make_disk(Disk(0.5, 0.37))});
  e.system.name = "ex44 (z^23 and (z-1/2)^2+1/2)";
  e.expected.up_verdict = Verdict::growing;
  e.expected.eta_positive = false;
  const double l34 = std::log10(0.75), l2 = std::log10(2.0);
  for (int n = 0; n <= 2; ++n) {
    const double p = std::pow(23.0, n);
    e.expected.canonical_annuli.push_back(Annulus::from_log10(0.0, 23.0 * p * l34, -p * l2));
  }
  const double cell = 1e-8;
  e.plan.cells = {cell, cell, cell};
  for (double fl : {-50.0, -1000.0, -20000.0}) {
    ShadowOptions so;
    so.threshold = 4.0 * cell;
    so.log_cell = 1e-3;
    so.angle_cell = 1e-3;
    so.log10_floor = fl;
    e.plan.shadows.push_back(so);
  }
  e.plan.default_cell = cell;
  e.plan.centers_per_cloud = 64;
  return e;
}

inline GalleryEntry ex46(int n) {
  GalleryEntry e;
  e.id = "ex46-n" + std::to_string(n);
  const double c = 0.1;
  // f_0(z) = c + (z^n - c^n)^2 = z^{2n} - 2 c^n z^n + (c + c^{2n})
  std::vector<CPoint> base(2 * n + 1);
  base[0] = c + std::pow(c, 2 * n);
  base[n] += -2.0 * std::pow(c, n);
  base[2 * n] += 1.0;
  for (int k = 0; k < n; ++k) {
    const CPoint alpha = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    std::vector<CPoint> co = base;
    for (auto& x : co) x *= alpha;
    e.system.generators.emplace_back(co, "f" + std::to_string(k));
  }
  e.system.domain = DomainSpec::make_disk(Disk(0.0, 0.4));
  e.system.name = "ex46 (n=" + std::to_string(n) + ", c=0.1)";
  e.expected.finite_cardinality = static_cast<std::size_t>(n);
  e.expected.up_verdict = Verdict::inconclusive;
  e.expected.eta_positive = false;
  e.plan.cells = {1e-3, 5e-4, 2.5e-4};
  e.plan.default_cell = 1e-4;
  return e;
}

inline GalleryEntry cantor3() {
  GalleryEntry e;
  e.id = "cantor3";
  e.system.generators.push_back(AnalyticMap::affine(1.0 / 3.0, 0.0, "z/3"));
  e.system.generators.push_back(AnalyticMap::affine(1.0 / 3.0, 2.0 / 3.0, "(z+2)/3"));
  e.system.domain = DomainSpec::make_disk(Disk(0.5, 0.8));
  e.system.name = "cantor3";
  e.expected.up_verdict = Verdict::bounded;
  e.expected.eta_positive = true;
  // cells off the 3-adic grid so that endpoints never straddle a cell edge
  for (int d = 6; d <= 10; ++d) e.plan.cells.push_back(0.7 * std::pow(3.0, -d));
  e.plan.default_cell = 3e-5;
  e.plan.centers_per_cloud = 256;
  return e;
}

}  // namespace detail

/// Validated gallery entry. Ids: ex41, ex42, ex43, ex44, ex46-n<k>, cantor3.
inline GalleryEntry build_entry(const std::string& id) {
  GalleryEntry e;
  if (id == "ex41") e = detail::ex41();
  else if (id == "ex42") e = detail::ex42();
  else if (id == "ex43") e = detail::ex43();
  else if (id == "ex44") e = detail::ex44();
  else if (id == "cantor3") e = detail::cantor3();
  else if (id.rfind("ex46-n", 0) == 0) {
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(id.substr(6), &used);
      if (used != id.size() - 6) n = 0;
    } catch (const std::exception&) {
      n = 0;
    }
    if (n < 1 || n > 64) throw UsageError("gallery", "build_entry", "ex46-n<k> needs 1 <= k <= 64");
    e = detail::ex46(n);
  } else {
    std::string ids;
    for (const auto& s : gallery_ids()) ids += (ids.empty() ? "" : ", ") + s;
    throw UsageError("gallery", "build_entry", "unknown gallery id '" + id + "' (known: " + ids + ")");
  }
  e.system = validated(std::move(e.system));
  return e;
}

}  // namespace aforge
