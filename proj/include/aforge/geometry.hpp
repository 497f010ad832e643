#pragma once

// Complex-plane primitives: disks, annuli, point clouds, nearest-neighbour
// search, Hausdorff distance, grid deduplication and the Poincare metric on a
// round disk.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aforge/error.hpp"

namespace aforge {

using CPoint = std::complex<double>;

inline bool is_finite(CPoint z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Linear radii outside this window are carried in log10 form only.
inline constexpr double kMinRepresentable = 1e-300;
inline constexpr double kMaxRepresentable = 1e300;

inline bool representable(double r) { return r >= kMinRepresentable && r <= kMaxRepresentable; }

struct Disk {
  CPoint center{};
  double radius = 1.0;

  Disk() = default;
  Disk(CPoint c, double r) : center(c), radius(r) {
    if (!(r > 0.0) || !std::isfinite(r) || !is_finite(c)) {
      throw PreconditionError("geometry", "Disk", "radius must be positive and finite");
    }
  }

  bool contains(CPoint z) const { return std::abs(z - center) < radius; }
};

/// Open round annulus {z : r_inner < |z - center| < r_outer}. Radii are kept in
/// both linear and log10 form; when a radius underflows the linear field is 0
/// and `linear_representable` is false.
struct Annulus {
  CPoint center{};
  double r_inner = 0.0;
  double r_outer = 0.0;
  double log10_r_inner = 0.0;
  double log10_r_outer = 0.0;
  bool linear_representable = true;

  static Annulus linear(CPoint center, double r_inner, double r_outer) {
    if (!(r_inner > 0.0) || !(r_outer > r_inner) || !std::isfinite(r_outer)) {
      throw PreconditionError("geometry", "Annulus", "need 0 < r_inner < r_outer");
    }
    Annulus a;
    a.center = center;
    a.r_inner = r_inner;
    a.r_outer = r_outer;
    a.log10_r_inner = std::log10(r_inner);
    a.log10_r_outer = std::log10(r_outer);
    a.linear_representable = representable(r_inner) && representable(r_outer);
    return a;
  }

  static Annulus from_log10(CPoint center, double log10_inner, double log10_outer) {
    if (!(log10_outer > log10_inner) || !std::isfinite(log10_inner) || !std::isfinite(log10_outer)) {
      throw PreconditionError("geometry", "Annulus", "need finite log10 radii with inner < outer");
    }
    Annulus a;
    a.center = center;
    a.log10_r_inner = log10_inner;
    a.log10_r_outer = log10_outer;
    const double ri = std::pow(10.0, log10_inner);
    const double ro = std::pow(10.0, log10_outer);
    a.linear_representable = representable(ri) && representable(ro);
    a.r_inner = representable(ri) ? ri : 0.0;
    a.r_outer = representable(ro) ? ro : 0.0;
    return a;
  }

  double log10_ratio() const { return log10_r_outer - log10_r_inner; }
  /// R/r evaluated in log space; +inf when the ratio itself overflows.
  double ratio() const { return std::pow(10.0, log10_ratio()); }

  /// Strict membership with a relative guard band so that points sitting on a
  /// boundary circle up to rounding are not reported as interior.
  bool contains_strictly(CPoint z, double rel_guard = 1e-12) const {
    const double d = std::abs(z - center);
    return d > r_inner * (1.0 + rel_guard) && d < r_outer * (1.0 - rel_guard);
  }
};

/// Finite point set standing in for a compact set. `resolution` is the grid
/// cell used to deduplicate it (0 means exact).
struct PointCloud {
  std::vector<CPoint> points;
  double resolution = 0.0;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

/// Point in log-polar form. The origin has log10_modulus == -inf.
struct LogRadialPoint {
  double log10_modulus = -std::numeric_limits<double>::infinity();
  double argument = 0.0;

  static LogRadialPoint from_point(CPoint z) {
    if (z == CPoint{}) return {};
    return {std::log10(std::abs(z)), std::arg(z)};
  }

  bool is_origin() const { return std::isinf(log10_modulus) && log10_modulus < 0; }

  CPoint to_point() const {
    if (is_origin()) return {};
    return std::polar(std::pow(10.0, log10_modulus), argument);
  }
};

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

// ---------------------------------------------------------------------------
// Nearest-neighbour search

/// Static 2-d tree over a point set. Built once, queried many times.
class KdTree {
 public:
  explicit KdTree(std::span<const CPoint> points) : points_(points.begin(), points.end()) {
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    build(0, order_.size(), 0);
  }

  std::size_t size() const { return points_.size(); }

  /// Squared distance to and index of the nearest stored point.
  std::pair<double, std::size_t> nearest(CPoint q) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    if (!points_.empty()) search(0, order_.size(), 0, q, best, best_idx, npos);
    return {best, best_idx};
  }

  /// Nearest point other than the one stored at `exclude`.
  std::pair<double, std::size_t> nearest_excluding(CPoint q, std::size_t exclude) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = npos;
    if (!points_.empty()) search(0, order_.size(), 0, q, best, best_idx, exclude);
    return {best, best_idx};
  }

  /// True when some stored point lies strictly within sqrt(bound2) of q.
  bool any_within(CPoint q, double bound2) const {
    double best = bound2;
    std::size_t idx = npos;
    if (!points_.empty()) search(0, order_.size(), 0, q, best, idx, npos);
    return idx != npos;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  static constexpr std::size_t kLeaf = 8;

  static double coord(CPoint z, int axis) { return axis == 0 ? z.real() : z.imag(); }

  void build(std::size_t lo, std::size_t hi, int depth) {
    if (hi - lo <= kLeaf) return;
    const int axis = depth & 1;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::size_t a, std::size_t b) {
                       return coord(points_[a], axis) < coord(points_[b], axis);
                     });
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  void search(std::size_t lo, std::size_t hi, int depth, CPoint q, double& best,
              std::size_t& best_idx, std::size_t exclude) const {
    if (hi - lo <= kLeaf) {
      for (std::size_t k = lo; k < hi; ++k) {
        const std::size_t i = order_[k];
        if (i == exclude) continue;
        const double d2 = std::norm(points_[i] - q);
        if (d2 < best) {
          best = d2;
          best_idx = i;
        }
      }
      return;
    }
    const int axis = depth & 1;
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::size_t i = order_[mid];
    if (i != exclude) {
      const double d2 = std::norm(points_[i] - q);
      if (d2 < best) {
        best = d2;
        best_idx = i;
      }
    }
    const double diff = coord(q, axis) - coord(points_[i], axis);
    const bool left_first = diff < 0;
    if (left_first) {
      search(lo, mid, depth + 1, q, best, best_idx, exclude);
      if (diff * diff < best) search(mid + 1, hi, depth + 1, q, best, best_idx, exclude);
    } else {
      search(mid + 1, hi, depth + 1, q, best, best_idx, exclude);
      if (diff * diff < best) search(lo, mid, depth + 1, q, best, best_idx, exclude);
    }
  }

  std::vector<CPoint> points_;
  std::vector<std::size_t> order_;
};

/// sup over p in `from` of dist(p, to), with `to` pre-indexed.
inline double directed_hausdorff(std::span<const CPoint> from, const KdTree& to) {
  double cmax2 = 0.0;
  for (const CPoint& p : from) {
    // Points already within the running max cannot raise it.
    if (to.any_within(p, cmax2)) continue;
    cmax2 = std::max(cmax2, to.nearest(p).first);
  }
  return std::sqrt(cmax2);
}

inline double hausdorff_distance(std::span<const CPoint> p, std::span<const CPoint> q) {
  if (p.empty() || q.empty()) {
    throw PreconditionError("geometry", "hausdorff_distance", "both clouds must be nonempty");
  }
  const KdTree tp(p);
  const KdTree tq(q);
  return std::max(directed_hausdorff(p, tq), directed_hausdorff(q, tp));
}

inline double hausdorff_distance(const PointCloud& p, const PointCloud& q) {
  return hausdorff_distance(std::span<const CPoint>(p.points), std::span<const CPoint>(q.points));
}

// ---------------------------------------------------------------------------
// Grid deduplication

/// Incremental square-grid deduplicator. The first point inserted into a cell
/// is that cell's representative.
class GridDeduper {
 public:
  explicit GridDeduper(double cell) : cell_(cell) {
    if (!(cell > 0.0) || !std::isfinite(cell)) {
      throw PreconditionError("geometry", "dedup_grid", "cell must be positive and finite");
    }
  }

  double cell() const { return cell_; }

  /// Returns true if `z` opened a new cell.
  bool insert(CPoint z) { return cells_.try_emplace(key(z), 0).second; }

  bool occupied(CPoint z) const { return cells_.count(key(z)) != 0; }

  std::size_t size() const { return cells_.size(); }

 private:
  struct Key {
    std::int64_t x, y;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
      h ^= static_cast<std::uint64_t>(k.y) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
      h ^= h >> 31;
      h *= 0xBF58476D1CE4E5B9ull;
      h ^= h >> 29;
      return static_cast<std::size_t>(h);
    }
  };

  Key key(CPoint z) const {
    // cells are centred on lattice points, so values sitting on an axis
    // (real points, exact zeros) never straddle a cell edge
    const double kx = std::floor(z.real() / cell_ + 0.5);
    const double ky = std::floor(z.imag() / cell_ + 0.5);
    constexpr double lim = 4.0e18;
    if (!(std::abs(kx) < lim) || !(std::abs(ky) < lim)) {
      throw DomainError("geometry", "dedup_grid", "point outside the addressable grid");
    }
    return {static_cast<std::int64_t>(kx), static_cast<std::int64_t>(ky)};
  }

  double cell_;
  std::unordered_map<Key, char, KeyHash> cells_;
};

/// One representative per occupied cell, first-inserted in input order.
inline PointCloud dedup_grid(const PointCloud& p, double cell) {
  GridDeduper grid(cell);
  PointCloud out;
  out.resolution = cell;
  for (const CPoint& z : p.points) {
    if (grid.insert(z)) out.points.push_back(z);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hull and diameter

/// Convex hull, counter-clockwise, collinear points dropped. Degenerate inputs
/// give one or two vertices.
inline std::vector<CPoint> convex_hull(std::span<const CPoint> pts) {
  std::vector<CPoint> p(pts.begin(), pts.end());
  std::sort(p.begin(), p.end(), [](CPoint a, CPoint b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  auto cross = [](CPoint o, CPoint a, CPoint b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
  };
  std::vector<CPoint> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

inline double diameter(std::span<const CPoint> pts) {
  const auto hull = convex_hull(pts);
  double d2 = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) d2 = std::max(d2, std::norm(hull[i] - hull[j]));
  }
  return std::sqrt(d2);
}

/// Euclidean distance from z to segment [a, b].
inline double segment_distance(CPoint z, CPoint a, CPoint b) {
  const CPoint ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double t = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

// ---------------------------------------------------------------------------
// Poincare metric on a disk, curvature -1: density 2R / (R^2 - |z - c|^2).

inline double hyperbolic_density(const Disk& u, CPoint z) {
  const double rho = u.radius;
  const double d2 = std::norm(z - u.center);
  if (!(d2 < rho * rho)) {
    throw DomainError("geometry", "hyperbolic_density", "point not inside the disk");
  }
  return 2.0 * rho / (rho * rho - d2);
}

inline double hyperbolic_distance(const Disk& u, CPoint z, CPoint w) {
  const CPoint a = (z - u.center) / u.radius;
  const CPoint b = (w - u.center) / u.radius;
  if (!(std::norm(a) < 1.0) || !(std::norm(b) < 1.0)) {
    throw DomainError("geometry", "hyperbolic_distance", "point on or outside the disk boundary");
  }
  // pseudo-hyperbolic distance of the normalized points
  const double p = std::abs(a - b) / std::abs(1.0 - std::conj(a) * b);
  return std::log1p(p) - std::log1p(-p);
}

// ---------------------------------------------------------------------------
// CSV (header `re,im`, 17 significant digits)

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string cloud_to_csv(const PointCloud& cloud) {
  std::string out = "re,im\n";
  out.reserve(out.size() + cloud.points.size() * 48);
  for (const CPoint& z : cloud.points) {
    out += format_real(z.real());
    out += ',';
    out += format_real(z.imag());
    out += '\n';
  }
  return out;
}

inline PointCloud cloud_from_csv(const std::string& text, double resolution = 0.0) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("re,im", 0) != 0) {
    throw IoError("geometry", "read_csv", "missing `re,im` header");
  }
  PointCloud cloud;
  cloud.resolution = resolution;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw IoError("geometry", "read_csv", "row " + std::to_string(row) + " has no comma");
    }
    try {
      cloud.points.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw IoError("geometry", "read_csv", "row " + std::to_string(row) + " is not numeric");
    }
    if (!is_finite(cloud.points.back())) {
      throw IoError("geometry", "read_csv", "row " + std::to_string(row) + " is not finite");
    }
  }
  return cloud;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("io", "write", "cannot open " + path + " for writing");
  out << content;
  if (!out) throw IoError("io", "write", "failed writing " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("io", "read", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace aforge
