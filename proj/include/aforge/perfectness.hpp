#pragma once

// Separating annuli on point clouds, uniform-perfectness estimates across
// resolutions, and annulus pullback through inverse branches of a fixed
// word.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "aforge/attractor.hpp"
#include "aforge/error.hpp"
#include "aforge/geometry.hpp"
#include "aforge/maps.hpp"
#include "aforge/parallel.hpp"
#include "aforge/system.hpp"

namespace aforge {

struct SeparationCertificate {
  Annulus annulus;
  CPoint inner_witness{};
  CPoint outer_witness{};
  double resolution = 0.0;
  bool verified_empty = false;
  double ratio_log10 = 0.0;
};

namespace detail {

inline std::size_t locate_center(const PointCloud& cloud, CPoint center, const char* op) {
  std::size_t best = KdTree::npos;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const double d = std::abs(cloud.points[i] - center);
    if (d < bd) bd = d, best = i;
  }
  if (best == KdTree::npos || bd > 1e-12 * std::max(1.0, std::abs(center))) {
    throw UsageError("perfectness", op, "center is not a cloud point");
  }
  return best;
}

struct Gap {
  double r = 0.0, R = 0.0;
  std::size_t inner = 0, outer = 0;
};

/// Gaps between consecutive distances from points[c], inner radius >= floor,
/// outer radius <= diam.
inline std::vector<Gap> distance_gaps(std::span<const CPoint> pts, std::size_t c, double floor, double diam) {
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i != c) d.emplace_back(std::abs(pts[i] - pts[c]), i);
  }
  std::sort(d.begin(), d.end());
  std::vector<Gap> out;
  for (std::size_t j = 0; j + 1 < d.size(); ++j) {
    const auto& [r, ir] = d[j];
    const auto& [R, iR] = d[j + 1];
    if (r >= floor && r > 0.0 && R > r && R <= diam) out.push_back({r, R, ir, iR});
  }
  return out;
}

inline bool cert_before(const SeparationCertificate& a, const SeparationCertificate& b) {
  if (a.ratio_log10 != b.ratio_log10) return a.ratio_log10 > b.ratio_log10;
  return a.annulus.log10_r_outer > b.annulus.log10_r_outer;
}

inline SeparationCertificate make_cert(const PointCloud& cloud, std::size_t c, const Gap& g) {
  SeparationCertificate s;
  s.annulus = Annulus::linear(cloud.points[c], g.r, g.R);
  s.inner_witness = cloud.points[g.inner];
  s.outer_witness = cloud.points[g.outer];
  s.resolution = cloud.resolution;
  s.verified_empty = true;  // consecutive sorted distances
  s.ratio_log10 = s.annulus.log10_ratio();
  return s;
}

}  // namespace detail

/// Every gap in the sorted distances from `center` above `floor` and below
/// the cloud diameter, by descending ratio (ties: larger outer radius first).
inline std::vector<SeparationCertificate> separating_annuli(const PointCloud& cloud, CPoint center, double floor) {
  if (cloud.empty()) throw PreconditionError("perfectness", "separating_annuli", "empty cloud");
  if (floor < cloud.resolution) {
    throw PreconditionError("perfectness", "separating_annuli", "floor must be at least the cloud resolution");
  }
  const std::size_t c = detail::locate_center(cloud, center, "separating_annuli");
  const double diam = diameter(cloud.points);
  std::vector<SeparationCertificate> out;
  for (const auto& g : detail::distance_gaps(cloud.points, c, floor, diam)) out.push_back(detail::make_cert(cloud, c, g));
  std::stable_sort(out.begin(), out.end(), detail::cert_before);
  return out;
}

/// Independent full scan: no cloud point strictly inside the annulus and
/// cloud points on both sides. Needs linear radii.
inline bool verify_separation(const PointCloud& cloud, const Annulus& a) {
  if (!a.linear_representable) return false;
  bool in = false, out = false;
  for (const CPoint& z : cloud.points) {
    if (a.contains_strictly(z)) return false;
    const double d = std::abs(z - a.center);
    if (d <= a.r_inner * (1.0 + 1e-12)) in = true;
    if (d >= a.r_outer * (1.0 - 1e-12)) out = true;
  }
  return in && out;
}

// ---------------------------------------------------------------------------
// Log-modulus scan about the origin (clouds with a log shadow)

/// Gaps between consecutive log10 moduli of linear and shadow points,
/// centred at the origin. Certificates carry log radii; linear fields are
/// flagged unrepresentable when they underflow.
inline std::vector<SeparationCertificate> separating_annuli_log(const AttractorApprox& a, double floor_log10) {
  const auto& pts = a.cloud.points;
  detail::locate_center(a.cloud, CPoint{}, "separating_annuli_log");
  struct Entry {
    double L;
    CPoint witness;
  };
  std::vector<Entry> e;
  for (const CPoint& z : pts) {
    if (z != CPoint{}) e.push_back({std::log10(std::abs(z)), z});
  }
  for (const auto& p : a.shadow) e.push_back({p.log10_modulus, p.to_point()});
  std::sort(e.begin(), e.end(), [](const Entry& x, const Entry& y) { return x.L < y.L; });
  const double top = std::log10(diameter(pts));
  std::vector<SeparationCertificate> out;
  for (std::size_t j = 0; j + 1 < e.size(); ++j) {
    if (e[j].L < floor_log10 || !(e[j + 1].L > e[j].L) || e[j + 1].L > top) continue;
    SeparationCertificate s;
    s.annulus = Annulus::from_log10(CPoint{}, e[j].L, e[j + 1].L);
    s.inner_witness = e[j].witness;
    s.outer_witness = e[j + 1].witness;
    s.resolution = a.cloud.resolution;
    s.verified_empty = true;
    s.ratio_log10 = s.annulus.log10_ratio();
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), detail::cert_before);
  return out;
}

// ---------------------------------------------------------------------------
// Uniform perfectness estimate

enum class Verdict { bounded, growing, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded:
      return "bounded";
    case Verdict::growing:
      return "growing";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct ResolutionEntry {
  double resolution = 0.0;
  double resolution_log10 = 0.0;  // log10 of the effective resolution (shadow floor if any)
  double max_ratio_log10 = 0.0;
  std::optional<SeparationCertificate> certificate;
  std::size_t centers_scanned = 0;
};

struct UPReport {
  std::vector<ResolutionEntry> per_resolution;
  Verdict verdict = Verdict::inconclusive;
  std::optional<double> M_estimate;
  std::vector<std::string> warnings;
};

inline constexpr double kBoundedVariation = 0.10;

/// Max-ratio certificate over a deterministic subsample of centres (every
/// k-th point in cloud order; 0 = all), ties to the smaller centre index.
inline std::optional<SeparationCertificate> max_ratio_certificate(const PointCloud& cloud, std::size_t centers,
                                                                   double floor, std::size_t* scanned = nullptr) {
  const auto& pts = cloud.points;
  if (pts.size() < 3) return std::nullopt;
  const std::size_t step = centers == 0 || centers >= pts.size() ? 1 : (pts.size() + centers - 1) / centers;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pts.size(); i += step) idx.push_back(i);
  if (scanned) *scanned = idx.size();
  const double diam = diameter(pts);
  std::vector<std::optional<detail::Gap>> best(idx.size());
  parallel_for(idx.size(), [&](std::size_t k) {
    for (const auto& g : detail::distance_gaps(pts, idx[k], floor, diam)) {
      if (!best[k] || g.R / g.r > best[k]->R / best[k]->r) best[k] = g;
    }
  });
  std::optional<SeparationCertificate> top;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (!best[k]) continue;
    auto c = detail::make_cert(cloud, idx[k], *best[k]);
    if (!top || c.ratio_log10 > top->ratio_log10) top = c;
  }
  return top;
}

inline Verdict classify(const std::vector<double>& log_ratios) {
  const std::size_t n = log_ratios.size();
  if (n < 3) return Verdict::inconclusive;
  double lo = std::pow(10.0, log_ratios[n - 3]), hi = lo;
  for (std::size_t i = n - 3; i < n; ++i) {
    lo = std::min(lo, std::pow(10.0, log_ratios[i]));
    hi = std::max(hi, std::pow(10.0, log_ratios[i]));
  }
  if ((hi - lo) / lo < kBoundedVariation) return Verdict::bounded;
  bool increasing = true;
  for (std::size_t i = 1; i < n; ++i) increasing = increasing && log_ratios[i] > log_ratios[i - 1];
  return increasing ? Verdict::growing : Verdict::inconclusive;
}

/// Clouds must come at strictly decreasing (effective) resolution. Clouds
/// carrying a log shadow are additionally scanned in log modulus about the
/// origin, with the shadow floor as effective resolution.
inline UPReport up_estimate(const std::vector<AttractorApprox>& clouds, std::size_t centers_per_cloud,
                            double floor_factor = 4.0) {
  if (floor_factor < 2.0) throw PreconditionError("perfectness", "up_estimate", "floor_factor must be >= 2");
  UPReport rep;
  std::vector<double> ratios;
  for (const auto& a : clouds) {
    ResolutionEntry e;
    e.resolution = a.cloud.resolution;
    e.resolution_log10 = a.cloud.resolution > 0.0 ? std::log10(a.cloud.resolution) : -std::numeric_limits<double>::infinity();
    auto cert = max_ratio_certificate(a.cloud, centers_per_cloud, floor_factor * a.cloud.resolution, &e.centers_scanned);
    if (a.shadow_options && a.shadow_options->threshold > 0.0) {
      e.resolution_log10 = std::min(e.resolution_log10, a.shadow_options->log10_floor);
      const auto logs = separating_annuli_log(a, a.shadow_options->log10_floor + std::log10(floor_factor));
      if (!logs.empty() && (!cert || logs.front().ratio_log10 > cert->ratio_log10)) cert = logs.front();
    }
    if (cert) {
      e.max_ratio_log10 = cert->ratio_log10;
      e.certificate = cert;
    } else {
      rep.warnings.push_back("no separating gap above the floor at resolution " + format_real(e.resolution) +
                             " (finite or very sparse cloud)");
    }
    if (!rep.per_resolution.empty() && !(e.resolution_log10 < rep.per_resolution.back().resolution_log10)) {
      throw PreconditionError("perfectness", "up_estimate", "resolutions must be strictly decreasing");
    }
    rep.per_resolution.push_back(e);
    ratios.push_back(e.max_ratio_log10);
  }
  if (clouds.size() < 3) rep.warnings.push_back("fewer than 3 resolutions; verdict is inconclusive");
  bool all_certified = true;
  for (const auto& e : rep.per_resolution) all_certified = all_certified && e.certificate.has_value();
  // A cloud that does not grow under refinement stands for a finite set;
  // uniform perfectness is a statement about perfect sets.
  bool finite = clouds.size() >= 2;
  for (const auto& a : clouds) finite = finite && a.cloud.size() == clouds.front().cloud.size() && a.shadow.empty();
  if (finite) {
    rep.warnings.push_back("cloud size is constant under refinement (" + std::to_string(clouds.front().cloud.size()) +
                           " points): finite set, uniform perfectness does not apply");
  }
  rep.verdict = all_certified && !finite ? classify(ratios) : Verdict::inconclusive;
  if (rep.verdict == Verdict::bounded) rep.M_estimate = std::pow(10.0, *std::max_element(ratios.begin(), ratios.end()));
  return rep;
}

// ---------------------------------------------------------------------------
// Pullback

enum class PullbackMode { proof, fixed_depth };

struct PullbackOptions {
  PullbackMode mode = PullbackMode::proof;
  std::size_t steps = 0;  // fixed_depth only
  std::size_t boundary_samples = 256;
  std::size_t max_m = 256;
  double center_tol = 1e-9;
};

struct PullbackCertificate {
  Word word_used;
  std::size_t m_star = 0;
  CPoint expanded_center{};
  Annulus expanded;
  double ratio_bound_log10 = 0.0;
  bool ratio_ok = false;
  bool separation_ok = false;
  std::pair<double, double> outer_radius_bounds{0.0, 0.0};
  bool outer_window_ok = false;
  PullbackMode mode = PullbackMode::proof;
};

namespace detail {

/// Index of the j-th letter (1-based) of the infinitely repeated word.
inline std::size_t cyclic_letter(const Word& w, std::size_t j) { return w.indices[(j - 1) % w.size()]; }

/// F_m = g_{i_1} o ... o g_{i_m} on the cyclic word.
inline CPoint forward_Fm(const IFSystem& s, const Word& w, std::size_t m, CPoint z) {
  for (std::size_t j = m; j >= 1; --j) z = s.generators[cyclic_letter(w, j)](z);
  return z;
}

/// H_j(a) for j = 0..m: H_0(a) = a, H_j(a) = (g_{i_{j+1}} o ... o g_{i_k})(a)
/// along the cycle.
inline std::vector<CPoint> base_chain(const IFSystem& s, const Word& w, CPoint a, std::size_t m) {
  const std::size_t k = w.size();
  std::vector<CPoint> tail(k + 1);  // tail[j] = (g_{i_{j+1}} o ... o g_{i_k})(a)
  tail[k] = a;
  for (std::size_t j = k; j-- > 0;) tail[j] = s.generators[w.indices[j]](tail[j + 1]);
  std::vector<CPoint> chain(m + 1);
  for (std::size_t j = 0; j <= m; ++j) chain[j] = j % k == 0 ? a : tail[j % k];
  return chain;
}

/// Applies H_m to a path starting at `a`: each letter's inverse branch is
/// continued along the image of the previous one.
inline std::vector<CPoint> pull_path(const IFSystem& s, const Word& w, const std::vector<CPoint>& chain,
                                     std::vector<CPoint> path, std::size_t m) {
  BranchOptions opt;
  for (std::size_t j = 1; j <= m; ++j) {
    const AnalyticMap& g = s.generators[cyclic_letter(w, j)];
    std::vector<CPoint> next(path.size());
    next[0] = chain[j];
    for (std::size_t t = 1; t < path.size(); ++t) {
      try {
        next[t] = continue_with_refinement(g, next[t - 1], path[t - 1], path[t], opt, 24);
      } catch (const Error& e) {
        std::string prefix;
        for (std::size_t q = 1; q <= j; ++q) prefix += (q > 1 ? "," : "") + std::to_string(cyclic_letter(w, q));
        throw ContinuationStepError("perfectness", "pullback_annulus",
                                    std::string("inverse branch failed on word prefix (") + prefix + "): " + e.what());
      }
    }
    path = std::move(next);
  }
  return path;
}

/// Radial segment from a out to radius rho, then the full circle.
inline std::vector<CPoint> ray_then_circle(CPoint a, double rho, std::size_t n) {
  std::vector<CPoint> p;
  const std::size_t radial = 16;
  for (std::size_t t = 0; t <= radial; ++t) p.push_back(a + rho * static_cast<double>(t) / radial);
  for (std::size_t t = 1; t < n; ++t) p.push_back(a + std::polar(rho, 2.0 * std::numbers::pi * static_cast<double>(t) / n));
  return p;
}

}  // namespace detail

/// Expands `cert` (centred at the fixed point a of `fixed_word`) by the
/// inverse-branch composition H_m of the cyclic word. In proof mode m is the
/// least m with F_m(circle(H_m(a), delta/(10C))) inside Disk(a, R), and the
/// standing assumptions R > 9r, R < delta/(10C) are enforced. In fixed-depth
/// mode m = opt.steps and those gates are skipped. The ratio bound
/// R'/r' >= R/(9r) is asserted in both modes.
inline PullbackCertificate pullback_annulus(const IFSystem& s, const Word& fixed_word, const SeparationCertificate& cert,
                                            const ConstantsLedger& ledger, const PointCloud& cloud,
                                            const PullbackOptions& opt = {}) {
  require_validated(s, "perfectness", "pullback_annulus");
  check_word(fixed_word, s.generators.size(), "pullback_annulus");
  const Annulus& ann = cert.annulus;
  if (!ann.linear_representable) {
    throw PreconditionError("perfectness", "pullback_annulus", "certificate radii must be representable");
  }
  const CPoint a = ann.center;
  const CPoint fp = fixed_point(s, fixed_word);
  if (std::abs(fp - a) > opt.center_tol * std::max(1.0, std::abs(a))) {
    throw PreconditionError("perfectness", "pullback_annulus", "certificate centre is not the fixed point of the word");
  }
  const double r = ann.r_inner, R = ann.r_outer;
  const double lo = ledger.delta / (10.0 * ledger.C);
  const double hi = ledger.delta / 10.0;

  PullbackCertificate out;
  out.word_used = fixed_word;
  out.mode = opt.mode;
  out.outer_radius_bounds = {lo, hi};
  out.ratio_bound_log10 = std::log10(R / (9.0 * r));

  std::size_t m = 0;
  if (opt.mode == PullbackMode::proof) {
    if (!(R > 9.0 * r)) throw HypothesisError("perfectness", "pullback_annulus", "need R > 9r");
    if (!(ledger.C > 0.0) || !(R < lo)) throw HypothesisError("perfectness", "pullback_annulus", "need R < delta/(10C)");
    const auto chain = detail::base_chain(s, fixed_word, a, opt.max_m);
    for (m = 1; m <= opt.max_m; ++m) {
      std::size_t n = opt.boundary_samples;
      bool inside = true;
      double margin = std::numeric_limits<double>::infinity();
      for (int pass = 0; pass < 2; ++pass) {
        inside = true;
        margin = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
          const CPoint z = chain[m] + std::polar(lo, 2.0 * std::numbers::pi * static_cast<double>(t) / n);
          const double d = std::abs(detail::forward_Fm(s, fixed_word, m, z) - a);
          margin = std::min(margin, R - d);
          if (!(d < R)) inside = false;
        }
        if (std::abs(margin) >= 0.01 * R) break;
        n *= 2;  // one deterministic refinement near the boundary
      }
      if (inside) break;
    }
    if (m > opt.max_m) throw HypothesisError("perfectness", "pullback_annulus", "no m up to max_m satisfies the nesting");
  } else {
    if (opt.steps == 0) throw PreconditionError("perfectness", "pullback_annulus", "fixed-depth mode needs steps >= 1");
    m = opt.steps;
  }
  out.m_star = m;

  const auto chain = detail::base_chain(s, fixed_word, a, m);
  const CPoint ka = chain[m];
  const std::size_t n = opt.boundary_samples;
  const auto inner = detail::pull_path(s, fixed_word, chain, detail::ray_then_circle(a, r, n), m);
  const auto outer = detail::pull_path(s, fixed_word, chain, detail::ray_then_circle(a, R, n), m);
  double r_prime = 0.0, R_prime = std::numeric_limits<double>::infinity();
  for (std::size_t t = 16; t < inner.size(); ++t) r_prime = std::max(r_prime, std::abs(inner[t] - ka));
  for (std::size_t t = 16; t < outer.size(); ++t) R_prime = std::min(R_prime, std::abs(outer[t] - ka));

  out.expanded_center = ka;
  if (!(R_prime > r_prime)) {
    throw LemmaViolation("perfectness", "pullback_annulus", "expanded annulus is degenerate (R' <= r')");
  }
  out.expanded = Annulus::linear(ka, r_prime, R_prime);
  out.ratio_ok = out.expanded.log10_ratio() >= out.ratio_bound_log10 - 1e-12;
  if (!out.ratio_ok) {
    throw LemmaViolation("perfectness", "pullback_annulus",
                         "ratio bound R'/r' >= R/(9r) violated: R'/r' = " + format_real(R_prime / r_prime));
  }
  out.outer_window_ok = R_prime >= lo * (1.0 - 1e-9) && R_prime <= hi * (1.0 + 1e-9);
  if (opt.mode == PullbackMode::proof && std::isfinite(lo) && std::isfinite(hi) && !out.outer_window_ok) {
    throw LemmaViolation("perfectness", "pullback_annulus", "expanded outer radius outside [delta/(10C), delta/10]");
  }
  out.separation_ok = verify_separation(cloud, out.expanded);
  return out;
}

}  // namespace aforge
