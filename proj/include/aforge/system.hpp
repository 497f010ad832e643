#pragma once

// IFS definition, domain validation (images of the closed domain land inside
// the domain with positive slack, contraction estimate) and the constants
// ledger for the pullback construction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aforge/error.hpp"
#include "aforge/geometry.hpp"
#include "aforge/gftlab.hpp"
#include "aforge/maps.hpp"

namespace aforge {

/// {z : Re(conj(normal) z) > offset}, normal of unit length.
struct HalfPlane {
  CPoint normal{1.0, 0.0};
  double offset = 0.0;

  double slack(CPoint z) const { return (std::conj(normal) * z).real() - offset; }
};

class DomainSpec {
 public:
  enum class Kind { disk, hull, union_of };

  static DomainSpec make_disk(const Disk& d) {
    DomainSpec s;
    s.kind_ = Kind::disk;
    s.disk_ = d;
    return s;
  }

  static DomainSpec make_hull(std::vector<CPoint> points, double margin, std::optional<HalfPlane> hp = {}) {
    if (points.empty()) throw ConfigError("system", "DomainSpec", "hull needs at least one point");
    if (!(margin > 0.0) || !std::isfinite(margin)) throw ConfigError("system", "DomainSpec", "hull margin must be > 0");
    for (const CPoint& p : points) {
      if (!is_finite(p)) throw ConfigError("system", "DomainSpec", "non-finite hull point");
    }
    if (hp) {
      const double n = std::abs(hp->normal);
      if (!(n > 0.0) || !std::isfinite(hp->offset)) throw ConfigError("system", "DomainSpec", "bad half-plane");
      hp->normal /= n;
      hp->offset /= n;
    }
    DomainSpec s;
    s.kind_ = Kind::hull;
    s.points_ = std::move(points);
    s.hull_ = convex_hull(s.points_);
    s.margin_ = margin;
    s.half_plane_ = hp;
    return s;
  }

  /// Union of overlapping parts. Connectedness of the union is the caller's
  /// responsibility; a sampled check is done by validate_system.
  static DomainSpec make_union(std::vector<DomainSpec> parts) {
    if (parts.size() < 2) throw ConfigError("system", "DomainSpec", "union needs at least two parts");
    DomainSpec s;
    s.kind_ = Kind::union_of;
    s.parts_ = std::move(parts);
    return s;
  }

  Kind kind() const { return kind_; }
  const Disk& disk() const { return disk_; }
  std::span<const CPoint> hull_points() const { return points_; }
  double margin() const { return margin_; }
  const std::optional<HalfPlane>& half_plane() const { return half_plane_; }
  std::span<const DomainSpec> parts() const { return parts_; }

  bool convex() const { return kind_ != Kind::union_of; }

  /// Positive inside, a lower bound for the distance to the boundary there.
  /// Exact for disks and for hull neighbourhoods without a half-plane.
  double slack(CPoint z) const {
    switch (kind_) {
      case Kind::disk:
        return disk_.radius - std::abs(z - disk_.center);
      case Kind::hull: {
        double s = margin_ - hull_distance(z);
        if (half_plane_) s = std::min(s, half_plane_->slack(z));
        return s;
      }
      case Kind::union_of: {
        double s = -std::numeric_limits<double>::infinity();
        for (const auto& p : parts_) s = std::max(s, p.slack(z));
        return s;
      }
    }
    return 0.0;
  }

  bool contains(CPoint z) const { return slack(z) > 0.0; }

  CPoint center() const {
    switch (kind_) {
      case Kind::disk:
        return disk_.center;
      case Kind::hull: {
        CPoint c{};
        for (const CPoint& p : hull_) c += p;
        c /= static_cast<double>(hull_.size());
        return c;
      }
      case Kind::union_of:
        return parts_.front().center();
    }
    return {};
  }

  /// n points on the boundary curve (fewer for unions, where interior
  /// stretches of part boundaries are dropped).
  std::vector<CPoint> boundary_samples(std::size_t n) const {
    std::vector<CPoint> out;
    switch (kind_) {
      case Kind::disk:
        out.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
          out.push_back(disk_.center +
                        std::polar(disk_.radius, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n)));
        }
        return out;
      case Kind::hull: {
        out = offset_curve(n);
        if (half_plane_) {
          // Points cut off by the half-plane are projected onto its line.
          for (CPoint& z : out) {
            const double s = half_plane_->slack(z);
            if (s < 0.0) z -= s * half_plane_->normal;
          }
        }
        return out;
      }
      case Kind::union_of:
        for (std::size_t i = 0; i < parts_.size(); ++i) {
          for (const CPoint& z : parts_[i].boundary_samples(n)) {
            bool interior = false;
            for (std::size_t j = 0; j < parts_.size() && !interior; ++j) {
              if (j != i && parts_[j].slack(z) > 0.0) interior = true;
            }
            if (!interior) out.push_back(z);
          }
        }
        return out;
    }
    return out;
  }

  /// Roughly n points strictly inside, deterministic.
  std::vector<CPoint> interior_samples(std::size_t n) const {
    std::vector<CPoint> out;
    if (kind_ == Kind::disk) {
      const auto rings = static_cast<std::size_t>(std::max(2.0, std::sqrt(static_cast<double>(n) / 2.0)));
      const std::size_t per = std::max<std::size_t>(4, n / rings);
      out.push_back(disk_.center);
      for (std::size_t i = 1; i <= rings; ++i) {
        const double rad = disk_.radius * (static_cast<double>(i) - 0.5) / static_cast<double>(rings);
        for (std::size_t j = 0; j < per; ++j) {
          out.push_back(disk_.center + std::polar(rad, 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5 * (i % 2)) /
                                                           static_cast<double>(per)));
        }
      }
      return out;
    }
    const Disk box = bounding_disk();
    const auto side = static_cast<std::size_t>(std::max(4.0, std::ceil(std::sqrt(static_cast<double>(n) * 4.0 / std::numbers::pi))));
    for (std::size_t i = 0; i < side; ++i) {
      for (std::size_t j = 0; j < side; ++j) {
        const CPoint z = box.center + CPoint{box.radius * (2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(side) - 1.0),
                                             box.radius * (2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(side) - 1.0)};
        if (contains(z)) out.push_back(z);
      }
    }
    out.push_back(center());
    return out;
  }

  /// A disk containing the closed domain.
  Disk bounding_disk() const {
    if (kind_ == Kind::disk) return disk_;
    const auto b = boundary_samples(512);
    double xlo = b.front().real(), xhi = xlo, ylo = b.front().imag(), yhi = ylo;
    for (const CPoint& z : b) {
      xlo = std::min(xlo, z.real());
      xhi = std::max(xhi, z.real());
      ylo = std::min(ylo, z.imag());
      yhi = std::max(yhi, z.imag());
    }
    const CPoint c{0.5 * (xlo + xhi), 0.5 * (ylo + yhi)};
    double rad = 0.0;
    for (const CPoint& z : b) rad = std::max(rad, std::abs(z - c));
    // sample spacing on the offset arcs is at most perimeter/512
    return Disk(c, rad * (1.0 + 1e-2) + 1e-12);
  }

 private:
  double hull_distance(CPoint z) const {
    if (hull_.size() == 1) return std::abs(z - hull_[0]);
    if (hull_.size() == 2) return segment_distance(z, hull_[0], hull_[1]);
    bool inside = true;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull_.size(); ++i) {
      const CPoint a = hull_[i], b = hull_[(i + 1) % hull_.size()];
      const double cross = ((b - a) * std::conj(z - a)).imag();  // < 0 when z is left of a->b
      if (cross > 0.0) inside = false;
      best = std::min(best, segment_distance(z, a, b));
    }
    return inside ? -best : best;
  }

  std::vector<CPoint> offset_curve(std::size_t n) const {
    std::vector<CPoint> out;
    out.reserve(n);
    if (hull_.size() == 1) {
      for (std::size_t j = 0; j < n; ++j) {
        out.push_back(hull_[0] + std::polar(margin_, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n)));
      }
      return out;
    }
    // For k >= 2 vertices (k = 2 walks the segment both ways): an arc of
    // radius margin at each vertex, then the edge pushed out by margin.
    const std::size_t k = hull_.size();
    std::vector<double> turn(k), edge(k);
    std::vector<CPoint> normal(k);
    for (std::size_t i = 0; i < k; ++i) {
      const CPoint e = hull_[(i + 1) % k] - hull_[i];
      edge[i] = std::abs(e);
      normal[i] = CPoint{e.imag(), -e.real()} / edge[i];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double t = std::arg(normal[i] / normal[(i + k - 1) % k]);
      if (t <= 0.0) t += 2.0 * std::numbers::pi;
      turn[i] = t;
      total += margin_ * t + edge[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
      double s = total * static_cast<double>(j) / static_cast<double>(n);
      for (std::size_t i = 0; i < k; ++i) {
        const double arc = margin_ * turn[i];
        if (s <= arc) {
          out.push_back(hull_[i] + margin_ * normal[(i + k - 1) % k] * std::polar(1.0, s / margin_));
          break;
        }
        s -= arc;
        if (s <= edge[i] || i + 1 == k) {
          const CPoint dir = (hull_[(i + 1) % k] - hull_[i]) / edge[i];
          out.push_back(hull_[i] + std::min(s, edge[i]) * dir + margin_ * normal[i]);
          break;
        }
        s -= edge[i];
      }
    }
    return out;
  }

  Kind kind_ = Kind::disk;
  Disk disk_{CPoint{}, 1.0};
  std::vector<CPoint> points_;
  std::vector<CPoint> hull_;
  double margin_ = 0.0;
  std::optional<HalfPlane> half_plane_;
  std::vector<DomainSpec> parts_;
};

enum class ContractionMethod { schwarz_pick_disk, disk_sandwich, empirical_lipschitz };

inline const char* to_string(ContractionMethod m) {
  switch (m) {
    case ContractionMethod::schwarz_pick_disk:
      return "schwarz-pick-disk";
    case ContractionMethod::disk_sandwich:
      return "disk-sandwich";
    case ContractionMethod::empirical_lipschitz:
      return "empirical-lipschitz";
  }
  return "?";
}

struct ContainmentFailure {
  std::size_t generator = 0;
  CPoint sample{};
  CPoint image{};
  double slack = 0.0;
};

struct ValidationReport {
  double image_bound = 0.0;  // max |g_i(z) - center(U)| over samples
  double min_slack = 0.0;    // min slack of g_i(z) in U over samples
  bool containment_ok = false;
  double contraction_estimate = 0.0;
  std::optional<double> contraction_s;  // absent = unbounded (estimate >= 1)
  ContractionMethod contraction_method = ContractionMethod::schwarz_pick_disk;
  std::size_t samples_used = 0;
  std::optional<ContainmentFailure> failure;
};

struct IFSystem {
  std::vector<AnalyticMap> generators;
  DomainSpec domain;
  std::string name;
  std::optional<ValidationReport> validation;

  bool is_validated() const { return validation && validation->containment_ok; }
};

inline void require_validated(const IFSystem& s, const char* module, const char* op) {
  if (!s.is_validated()) {
    throw UsageError(module, op, "system '" + s.name + "' has not passed validate_system");
  }
}

namespace detail {

inline double schwarz_pick_ratio(const Disk& u, const Evaluation& e, CPoint z) {
  if (!u.contains(e.value)) return std::numeric_limits<double>::infinity();
  return std::abs(e.derivative) * hyperbolic_density(u, e.value) / hyperbolic_density(u, z);
}

}  // namespace detail

inline ValidationReport validate_system(const IFSystem& s, std::size_t boundary_samples = 256) {
  if (boundary_samples < 64) throw PreconditionError("system", "validate_system", "need at least 64 boundary samples");
  if (s.generators.empty()) throw ConfigError("system", "validate_system", "system has no generators");
  const DomainSpec& U = s.domain;
  const auto boundary = U.boundary_samples(boundary_samples);
  const auto interior = U.interior_samples(4 * boundary_samples);
  const CPoint c = U.center();

  ValidationReport rep;
  rep.samples_used = (boundary.size() + interior.size()) * s.generators.size();
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.generators.size(); ++i) {
    for (const auto* set : {&boundary, &interior}) {
      for (const CPoint& z : *set) {
        const CPoint w = s.generators[i](z);
        const double sl = is_finite(w) ? U.slack(w) : -std::numeric_limits<double>::infinity();
        rep.image_bound = std::max(rep.image_bound, std::abs(w - c));
        if (sl < rep.min_slack) {
          rep.min_slack = sl;
          if (!(sl > 0.0)) rep.failure = ContainmentFailure{i, z, w, sl};
        }
      }
    }
  }
  rep.containment_ok = rep.min_slack > 0.0;

  auto all_samples = interior;
  all_samples.insert(all_samples.end(), boundary.begin(), boundary.end());

  double est = 0.0;
  if (U.kind() == DomainSpec::Kind::disk) {
    rep.contraction_method = ContractionMethod::schwarz_pick_disk;
    for (const auto& g : s.generators) {
      for (const CPoint& z : interior) est = std::max(est, detail::schwarz_pick_ratio(U.disk(), g.evaluate(z), z));
    }
  } else {
    rep.contraction_method = ContractionMethod::disk_sandwich;
    const Disk outer = U.bounding_disk();
    for (const auto& g : s.generators) {
      for (const CPoint& z : interior) {
        const Evaluation e = g.evaluate(z);
        const double sl = U.slack(e.value);
        const double q = sl > 0.0 ? std::abs(e.derivative) * (2.0 / sl) / hyperbolic_density(outer, z)
                                  : std::numeric_limits<double>::infinity();
        est = std::max(est, q);
      }
    }
    if (!(est < 1.0)) {
      rep.contraction_method = ContractionMethod::empirical_lipschitz;
      est = 0.0;
      for (const auto& g : s.generators) {
        if (U.convex()) {
          for (const CPoint& z : all_samples) est = std::max(est, std::abs(g.evaluate(z).derivative));
        } else {
          // no straight segments to integrate |g'| along; use difference quotients
          std::vector<CPoint> img(all_samples.size());
          for (std::size_t k = 0; k < all_samples.size(); ++k) img[k] = g(all_samples[k]);
          for (std::size_t a = 0; a < all_samples.size(); ++a) {
            for (std::size_t b = a + 1; b < all_samples.size(); ++b) {
              est = std::max(est, std::abs(img[a] - img[b]) / std::abs(all_samples[a] - all_samples[b]));
            }
          }
        }
      }
    }
  }
  rep.contraction_estimate = est;
  if (est < 1.0) rep.contraction_s = est;
  return rep;
}

/// Copy of `s` with its validation report attached; throws when containment
/// fails.
inline IFSystem validated(IFSystem s, std::size_t boundary_samples = 256) {
  ValidationReport rep = validate_system(s, boundary_samples);
  if (!rep.containment_ok) {
    std::string msg = "generator images leave the domain";
    if (rep.failure) {
      const auto& f = *rep.failure;
      msg += ": generator " + std::to_string(f.generator) + " sends " + format_real(f.sample.real()) + "," +
             format_real(f.sample.imag()) + " to " + format_real(f.image.real()) + "," + format_real(f.image.imag()) +
             " (slack " + format_real(f.slack) + ")";
    }
    throw ValidationError("system", "validate_system", msg);
  }
  s.validation = std::move(rep);
  return s;
}

inline Evaluation evaluate_word(const IFSystem& s, const Word& w, CPoint z) {
  return evaluate_word(std::span<const AnalyticMap>(s.generators), w, z);
}

/// Fixed point of a word, Banach iteration started at the domain centre.
inline CPoint fixed_point(const IFSystem& s, const Word& w, double tol = 1e-13) {
  FixedPointOptions opt;
  opt.tol = tol;
  return fixed_point(std::span<const AnalyticMap>(s.generators), w, s.domain.center(), opt);
}

namespace detail {

/// Size of |g'(a)| that cannot be told apart from zero: Horner rounding in
/// g' plus g'' times the rounding already present in a.
inline double derivative_noise(const AnalyticMap& g, CPoint a) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const auto c = g.coefficients();
  const double r = std::abs(a);
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    d1 = d1 * r + static_cast<double>(k) * std::abs(c[k]);
    if (k >= 2) d2 = d2 * r + static_cast<double>(k * (k - 1)) * std::abs(c[k]);
  }
  return 64.0 * eps * (d1 + d2 * std::max(r, eps));
}

}  // namespace detail

/// min over generators and cloud points of |g_i'(a)|. Values at rounding
/// level count as zero, so a critical point on the attractor gives exactly 0.
inline double derivative_floor(const IFSystem& s, const PointCloud& cloud) {
  if (cloud.empty()) throw PreconditionError("system", "derivative_floor", "empty cloud");
  double eta = std::numeric_limits<double>::infinity();
  for (const auto& g : s.generators) {
    for (const CPoint& a : cloud.points) {
      double d = std::abs(g.evaluate(a).derivative);
      if (d <= detail::derivative_noise(g, a)) d = 0.0;
      eta = std::min(eta, d);
    }
  }
  return eta;
}

struct ConstantsLedger {
  double eta = 0.0;
  double bound_M = 0.0;
  double radius_r = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  double C = 0.0;
  std::optional<double> s;
  double cloud_diameter = 0.0;
  bool delta_exceeds_diameter = false;
  std::vector<std::pair<std::string, std::string>> provenance;
};

inline constexpr double kRadiusSafety = 0.1;

inline ConstantsLedger theorem_constants(const IFSystem& s, const PointCloud& cloud, std::size_t boundary_samples = 1024) {
  ConstantsLedger L;
  L.eta = derivative_floor(s, cloud);
  if (!(L.eta > 0.0)) {
    throw HypothesisError("system", "theorem_constants",
                          "derivative floor eta = 0 on the attractor; the positive-derivative-floor corollary cannot apply");
  }
  for (const CPoint& z : s.domain.boundary_samples(boundary_samples)) {
    for (const auto& g : s.generators) L.bound_M = std::max(L.bound_M, std::abs(g(z)));
  }
  double dist = std::numeric_limits<double>::infinity();
  for (const CPoint& a : cloud.points) dist = std::min(dist, s.domain.slack(a));
  if (!(dist > 0.0)) throw PreconditionError("system", "theorem_constants", "cloud touches the domain boundary");
  L.radius_r = dist * (1.0 - kRadiusSafety);
  L.rho = injectivity_radius(L.bound_M, L.radius_r, L.eta);
  L.delta = std::min(L.rho, L.rho * L.eta / 4.0);
  L.C = 100.0 / (81.0 * L.eta);
  if (s.validation) L.s = s.validation->contraction_s;
  L.cloud_diameter = diameter(cloud.points);
  L.delta_exceeds_diameter = L.delta >= L.cloud_diameter;
  L.provenance = {
      {"eta", "min |g_i'(a)| over generators and " + std::to_string(cloud.size()) + " cloud points"},
      {"bound_M", "max |g_i| over " + std::to_string(boundary_samples) + " boundary samples (maximum principle)"},
      {"radius_r", "0.9 x min distance from cloud to domain boundary"},
      {"rho", "bisection root of M rho (2r - rho) / (r (r - rho)^2) = eta, times 0.95"},
      {"delta", "min(rho, rho eta / 4)"},
      {"C", "100 / (81 eta)"},
      {"s", s.validation ? std::string(to_string(s.validation->contraction_method)) : std::string("not validated")},
  };
  return L;
}

}  // namespace aforge
