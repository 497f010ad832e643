#pragma once

// Attractor approximation: deterministic set iteration from the generator
// fixed points, chaos game, invariance residuals and finite-attractor
// detection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aforge/error.hpp"
#include "aforge/geometry.hpp"
#include "aforge/maps.hpp"
#include "aforge/parallel.hpp"
#include "aforge/rng.hpp"
#include "aforge/system.hpp"

namespace aforge {

enum class Method { deterministic, chaos_game };

inline const char* to_string(Method m) { return m == Method::deterministic ? "deterministic" : "chaos-game"; }

/// Points with 0 < |z| < threshold are kept in log-polar form. Monomial
/// generators act on them exactly (log|a z^k| = log|a| + k log|z|), which
/// keeps gaps that doubles cannot hold. Shadow points whose log10 modulus
/// falls below log10_floor are identified with the origin.
struct ShadowOptions {
  double threshold = 0.0;  // 0 disables the shadow
  double log_cell = 1e-3;
  double angle_cell = 1e-3;
  double log10_floor = -1e4;
};

struct AttractorApprox {
  PointCloud cloud;
  std::size_t iterations = 0;
  double residual = 0.0;
  Method method = Method::deterministic;
  std::optional<std::uint64_t> rng_seed;
  std::vector<double> residual_history;
  std::optional<std::string> warning;

  std::vector<LogRadialPoint> shadow;
  std::optional<ShadowOptions> shadow_options;
};

namespace detail {

class ShadowSet {
 public:
  explicit ShadowSet(const ShadowOptions& o) : opt_(o), grid_(1.0) {}

  bool insert(const LogRadialPoint& p) {
    return grid_.insert(CPoint{p.log10_modulus / opt_.log_cell, wrap_angle(p.argument) / opt_.angle_cell});
  }

 private:
  ShadowOptions opt_;
  GridDeduper grid_;
};

/// g applied to a shadow point. Result is either linear (representable, or
/// computed by evaluating g) or stays in the shadow.
struct ShadowImage {
  bool in_shadow = false;
  bool origin = false;
  LogRadialPoint log;
  CPoint linear{};
};

inline ShadowImage shadow_apply(const AnalyticMap& g, const LogRadialPoint& p, const ShadowOptions& opt) {
  ShadowImage out;
  if (g.is_monomial()) {
    const CPoint a = g.coefficients().back();
    const auto k = static_cast<double>(g.degree());
    const double L = std::log10(std::abs(a)) + k * p.log10_modulus;
    const double th = wrap_angle(std::arg(a) + k * p.argument);
    if (L < opt.log10_floor) {
      out.origin = true;
      return out;
    }
    if (L < std::log10(opt.threshold)) {
      out.in_shadow = true;
      out.log = {L, th};
      return out;
    }
    out.linear = LogRadialPoint{L, th}.to_point();
    return out;
  }
  out.linear = g(p.to_point());
  return out;
}

inline void check_cell(double cell, const char* op) {
  if (!(cell > 0.0) || !std::isfinite(cell)) throw PreconditionError("attractor", op, "cell must be positive");
}

}  // namespace detail

/// Forward closure S_{m+1} = dedup(S_m u g_1(S_m) u ... u g_N(S_m)) starting
/// from the generator fixed points. Only newly opened cells are mapped in the
/// next round, so every stored point is an exact image of a fixed point.
/// `residual` is the Hausdorff distance between the last two iterates.
inline AttractorApprox iterate_attractor(const IFSystem& s, double cell, std::size_t max_iters = 200,
                                         double stop_residual = 0.0, const std::optional<ShadowOptions>& shadow = {}) {
  require_validated(s, "attractor", "iterate_attractor");
  detail::check_cell(cell, "iterate_attractor");
  const bool use_shadow = shadow && shadow->threshold > 0.0;

  AttractorApprox out;
  out.method = Method::deterministic;
  out.cloud.resolution = cell;
  if (use_shadow) out.shadow_options = shadow;

  GridDeduper grid(cell);
  std::optional<detail::ShadowSet> shadow_set;
  if (use_shadow) shadow_set.emplace(*shadow);

  std::vector<CPoint> frontier;
  std::vector<LogRadialPoint> shadow_frontier;
  auto add_linear = [&](CPoint z, std::vector<CPoint>& next, std::vector<LogRadialPoint>& next_shadow) {
    if (use_shadow && z != CPoint{} && std::abs(z) < shadow->threshold) {
      const auto p = LogRadialPoint::from_point(z);
      if (p.log10_modulus < shadow->log10_floor) return;  // origin is already seeded
      if (shadow_set->insert(p)) {
        out.shadow.push_back(p);
        next_shadow.push_back(p);
      }
      return;
    }
    if (grid.insert(z)) {
      out.cloud.points.push_back(z);
      next.push_back(z);
    }
  };

  // Seeds always go to the linear cloud (the origin may be one of them).
  for (std::size_t i = 0; i < s.generators.size(); ++i) {
    const CPoint z = fixed_point(s, Word{{i}});
    if (grid.insert(z)) {
      out.cloud.points.push_back(z);
      frontier.push_back(z);
    }
  }

  const std::size_t n_gen = s.generators.size();
  std::size_t stalls = 0;
  double prev_residual = std::numeric_limits<double>::infinity();
  while ((!frontier.empty() || !shadow_frontier.empty()) && out.iterations < max_iters) {
    std::vector<CPoint> images(frontier.size() * n_gen);
    parallel_for(frontier.size(), [&](std::size_t k) {
      for (std::size_t i = 0; i < n_gen; ++i) images[k * n_gen + i] = s.generators[i](frontier[k]);
    });

    const std::size_t before = out.cloud.points.size();
    const KdTree previous(std::span<const CPoint>(out.cloud.points.data(), before));

    std::vector<CPoint> next;
    std::vector<LogRadialPoint> next_shadow;
    for (const CPoint& z : images) {
      if (!is_finite(z)) throw DivergenceError("attractor", "iterate_attractor", "generator image escaped to infinity");
      add_linear(z, next, next_shadow);
    }
    for (const LogRadialPoint& p : shadow_frontier) {
      for (const auto& g : s.generators) {
        const auto img = detail::shadow_apply(g, p, *shadow);
        if (img.origin) continue;
        if (img.in_shadow) {
          if (shadow_set->insert(img.log)) {
            out.shadow.push_back(img.log);
            next_shadow.push_back(img.log);
          }
        } else {
          add_linear(img.linear, next, next_shadow);
        }
      }
    }

    // S_m is a subset of S_{m+1}, so the Hausdorff distance is one-sided.
    const double residual =
        before == 0 ? 0.0
                    : directed_hausdorff(std::span<const CPoint>(out.cloud.points.data() + before,
                                                                 out.cloud.points.size() - before),
                                         previous);
    out.residual = residual;
    out.residual_history.push_back(residual);
    ++out.iterations;
    stalls = residual < prev_residual ? 0 : stalls + 1;
    prev_residual = residual;
    if (stalls >= 10 && !out.warning && residual > 0.0) {
      out.warning = "residual did not decrease for 10 consecutive iterations; the system may not contract";
    }
    frontier = std::move(next);
    shadow_frontier = std::move(next_shadow);
    if (residual <= stop_residual && frontier.empty() && shadow_frontier.empty()) break;
    if (stop_residual > 0.0 && residual <= stop_residual) break;
  }
  return out;
}

/// Random compositions from the domain centre; the first burn_in points are
/// discarded. A single xorshift64* stream, so the result does not depend on
/// the worker count.
inline AttractorApprox chaos_game(const IFSystem& s, std::uint64_t seed, std::size_t samples, std::size_t burn_in,
                                  double cell) {
  require_validated(s, "attractor", "chaos_game");
  detail::check_cell(cell, "chaos_game");
  if (samples <= burn_in) throw PreconditionError("attractor", "chaos_game", "samples must exceed burn_in");
  Xorshift64Star rng(seed);
  AttractorApprox out;
  out.method = Method::chaos_game;
  out.rng_seed = seed;
  out.cloud.resolution = cell;
  GridDeduper grid(cell);
  CPoint z = s.domain.center();
  for (std::size_t k = 0; k < samples; ++k) {
    z = s.generators[rng.below(s.generators.size())](z);
    if (k < burn_in) continue;
    if (grid.insert(z)) out.cloud.points.push_back(z);
  }
  out.iterations = samples;
  return out;
}

struct InvarianceReport {
  double residual = 0.0;        // Hausdorff(dedup(union g_i(cloud)), cloud)
  double forward_defect = 0.0;  // max over sampled words of sup dist(w(cloud), cloud)
  std::size_t words_checked = 0;
};

inline InvarianceReport invariance_residual(const IFSystem& s, const AttractorApprox& a, std::size_t max_words = 24) {
  InvarianceReport rep;
  const auto& pts = a.cloud.points;
  if (pts.empty()) return rep;
  const double cell = a.cloud.resolution > 0.0 ? a.cloud.resolution : 0.0;
  PointCloud image;
  image.resolution = cell;
  std::vector<CPoint> raw(pts.size() * s.generators.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    for (std::size_t i = 0; i < s.generators.size(); ++i) raw[k * s.generators.size() + i] = s.generators[i](pts[k]);
  });
  image.points = std::move(raw);
  if (cell > 0.0) image = dedup_grid(image, cell);
  const KdTree tree(pts);
  rep.residual = hausdorff_distance(image.points, pts);

  // Words of length 1..3 in lexicographic order, truncated to max_words.
  std::vector<Word> words;
  const std::size_t n = s.generators.size();
  for (std::size_t len = 1; len <= 3 && words.size() < max_words; ++len) {
    std::vector<std::size_t> idx(len, 0);
    while (words.size() < max_words) {
      words.push_back(Word{idx});
      std::size_t p = len;
      while (p > 0 && ++idx[p - 1] == n) idx[--p] = 0;
      if (p == 0) break;
    }
  }
  for (const Word& w : words) {
    std::vector<CPoint> img(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) { img[k] = evaluate_word(s, w, pts[k]).value; });
    rep.forward_defect = std::max(rep.forward_defect, directed_hausdorff(img, tree));
  }
  rep.words_checked = words.size();
  return rep;
}

struct FiniteDetectOptions {
  std::size_t levels = 16;
  std::size_t stable_levels = 3;
  std::size_t max_points = 50000;
};

/// Refines the dedup cell by halves; reports k when the occupied-cell count
/// is k on three consecutive levels, the candidate set is invariant under
/// every generator to `tol`, and fixed points of probe words land on it.
inline std::optional<std::size_t> detect_finite(const IFSystem& s, double tol = 1e-9, std::size_t probe_words = 16,
                                                const FiniteDetectOptions& opt = {}) {
  require_validated(s, "attractor", "detect_finite");
  double cell = 2.0 * s.domain.bounding_disk().radius / 64.0;
  std::size_t last = 0, run = 0;
  std::vector<CPoint> candidates;
  for (std::size_t level = 0; level < opt.levels; ++level, cell *= 0.5) {
    const auto a = iterate_attractor(s, cell, 400);
    if (a.cloud.size() > opt.max_points) return std::nullopt;
    run = a.cloud.size() == last ? run + 1 : 1;
    last = a.cloud.size();
    candidates = a.cloud.points;
    if (run >= opt.stable_levels) break;
  }
  if (run < opt.stable_levels) return std::nullopt;

  const KdTree tree(candidates);
  const double tol2 = tol * tol;
  std::vector<bool> hit(candidates.size(), false);
  for (const auto& g : s.generators) {
    for (const CPoint& z : candidates) {
      const auto [d2, j] = tree.nearest(g(z));
      if (d2 > tol2) return std::nullopt;
      hit[j] = true;
    }
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) return std::nullopt;

  Xorshift64Star rng(0xF1A17E);
  for (std::size_t k = 0; k < probe_words; ++k) {
    Word w;
    const std::size_t len = 1 + rng.below(4);
    for (std::size_t j = 0; j < len; ++j) w.indices.push_back(rng.below(s.generators.size()));
    CPoint z;
    try {
      z = fixed_point(s, w, tol * 1e-3);
    } catch (const DivergenceError&) {
      return std::nullopt;
    }
    if (tree.nearest(z).first > tol2) return std::nullopt;
  }
  return candidates.size();
}

}  // namespace aforge
