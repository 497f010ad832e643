#pragma once

// Deterministic SVG of a point cloud with annulus overlays. Coordinates are
// pixels (y pointing down), printed with fixed precision, no timestamps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "aforge/error.hpp"
#include "aforge/geometry.hpp"

namespace aforge {

/// Maps the cloud's bounding box plus 5% padding onto a pixel viewport.
class SvgFrame {
 public:
  static SvgFrame fit(std::span<const CPoint> pts, double width) {
    if (pts.empty()) throw PreconditionError("cli", "render_svg", "cloud is empty");
    double xlo = pts[0].real(), xhi = xlo, ylo = pts[0].imag(), yhi = ylo;
    for (const CPoint& z : pts) {
      xlo = std::min(xlo, z.real());
      xhi = std::max(xhi, z.real());
      ylo = std::min(ylo, z.imag());
      yhi = std::max(yhi, z.imag());
    }
    double extent = std::max(xhi - xlo, yhi - ylo);
    if (!(extent > 0.0)) extent = std::max(1.0, std::abs(pts[0])) * 1e-3;  // single point
    const double pad = 0.05 * extent;
    SvgFrame f;
    f.x0_ = xlo - pad;
    f.y1_ = yhi + pad;
    f.scale_ = width / (extent + 2.0 * pad);
    f.w_ = std::max(1.0, std::ceil((xhi - xlo + 2.0 * pad) * f.scale_));
    f.h_ = std::max(1.0, std::ceil((yhi - ylo + 2.0 * pad) * f.scale_));
    if (xhi == xlo) f.x0_ = xlo - 0.5 * f.w_ / f.scale_;
    if (yhi == ylo) f.y1_ = yhi + 0.5 * f.h_ / f.scale_;
    return f;
  }

  double px(CPoint z) const { return (z.real() - x0_) * scale_; }
  double py(CPoint z) const { return (y1_ - z.imag()) * scale_; }
  double scale() const { return scale_; }
  double width() const { return w_; }
  double height() const { return h_; }

 private:
  double x0_ = 0.0, y1_ = 0.0, scale_ = 1.0, w_ = 1.0, h_ = 1.0;
};

struct SvgOptions {
  double width = 800.0;
  std::vector<LogRadialPoint> shadow;  // drawn only in the log inset
  std::string title;
};

namespace detail {

inline std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

inline std::string px(double x) { return fmt("%.3f", x); }

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// True if the annulus is drawn as circles; otherwise it goes to the inset.
inline bool drawable_in_plane(const Annulus& a, const SvgFrame& f) {
  return a.linear_representable && a.r_inner * f.scale() >= 0.5;
}

inline std::string render_svg(const PointCloud& cloud, std::span<const Annulus> annuli, const SvgOptions& opt = {}) {
  const SvgFrame f = SvgFrame::fit(cloud.points, opt.width);
  std::vector<const Annulus*> inset;
  for (const auto& a : annuli) {
    if (!drawable_in_plane(a, f)) inset.push_back(&a);
  }
  const double strip_h = 90.0;
  const double W = f.width();
  const double H = f.height() + (inset.empty() ? 0.0 : strip_h * static_cast<double>(inset.size()));

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + detail::px(W) + " " + detail::px(H) + "\" width=\"" +
       detail::px(W) + "\" height=\"" + detail::px(H) + "\">\n";
  if (!opt.title.empty()) s += "<title>" + detail::xml_escape(opt.title) + "</title>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + detail::px(W) + "\" height=\"" + detail::px(H) + "\" fill=\"white\"/>\n";

  // rings under the points
  for (const auto& a : annuli) {
    if (!drawable_in_plane(a, f)) continue;
    const double cx = f.px(a.center), cy = f.py(a.center);
    const double ri = a.r_inner * f.scale(), ro = a.r_outer * f.scale();
    auto ring = [&](double r) {
      return "M " + detail::px(cx - r) + " " + detail::px(cy) + " a " + detail::px(r) + " " + detail::px(r) + " 0 1 0 " +
             detail::px(2 * r) + " 0 a " + detail::px(r) + " " + detail::px(r) + " 0 1 0 " + detail::px(-2 * r) + " 0 Z ";
    };
    s += "<path class=\"annulus\" d=\"" + ring(ro) + ring(ri) + "\" fill=\"#f4a261\" fill-opacity=\"0.35\" fill-rule=\"evenodd\"/>\n";
    s += "<circle class=\"annulus-edge\" cx=\"" + detail::px(cx) + "\" cy=\"" + detail::px(cy) + "\" r=\"" + detail::px(ri) +
         "\" fill=\"none\" stroke=\"#e76f51\" stroke-width=\"0.5\"/>\n";
    s += "<circle class=\"annulus-edge\" cx=\"" + detail::px(cx) + "\" cy=\"" + detail::px(cy) + "\" r=\"" + detail::px(ro) +
         "\" fill=\"none\" stroke=\"#e76f51\" stroke-width=\"0.5\"/>\n";
  }

  s += "<g class=\"points\" fill=\"#1d3557\">\n";
  for (const CPoint& z : cloud.points) {
    s += "<circle cx=\"" + detail::px(f.px(z)) + "\" cy=\"" + detail::px(f.py(z)) + "\" r=\"0.5\"/>\n";
  }
  s += "</g>\n";

  // log10|z - c| strips for annuli too thin or too deep for the plane view
  double y = f.height();
  for (const Annulus* a : inset) {
    std::vector<double> logs;
    for (const CPoint& z : cloud.points) {
      const double d = std::abs(z - a->center);
      if (d > 0.0) logs.push_back(std::log10(d));
    }
    if (a->center == CPoint{}) {
      for (const auto& p : opt.shadow) logs.push_back(p.log10_modulus);
    }
    const double span = a->log10_ratio();
    const double lo = a->log10_r_inner - 0.25 * span, hi = a->log10_r_outer + 0.25 * span;
    const double x0 = 40.0, x1 = std::max(x0 + 100.0, W - 40.0);
    auto X = [&](double L) { return x0 + (L - lo) / (hi - lo) * (x1 - x0); };
    const double axis = y + 50.0;
    s += "<g class=\"log-inset\">\n";
    s += "<rect x=\"" + detail::px(X(a->log10_r_inner)) + "\" y=\"" + detail::px(axis - 14.0) + "\" width=\"" +
         detail::px(X(a->log10_r_outer) - X(a->log10_r_inner)) + "\" height=\"14\" fill=\"#f4a261\" fill-opacity=\"0.35\"/>\n";
    s += "<line x1=\"" + detail::px(x0) + "\" y1=\"" + detail::px(axis) + "\" x2=\"" + detail::px(x1) + "\" y2=\"" +
         detail::px(axis) + "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    for (double L : logs) {
      if (L < lo || L > hi) continue;
      s += "<line x1=\"" + detail::px(X(L)) + "\" y1=\"" + detail::px(axis - 10.0) + "\" x2=\"" + detail::px(X(L)) + "\" y2=\"" +
           detail::px(axis) + "\" stroke=\"#1d3557\" stroke-width=\"0.5\"/>\n";
    }
    s += "<text x=\"" + detail::px(x0) + "\" y=\"" + detail::px(axis + 14.0) + "\" font-size=\"10\">" + detail::fmt("%.2f", lo) +
         "</text>\n";
    s += "<text x=\"" + detail::px(x1) + "\" y=\"" + detail::px(axis + 14.0) + "\" font-size=\"10\" text-anchor=\"end\">" +
         detail::fmt("%.2f", hi) + "</text>\n";
    s += "<text x=\"" + detail::px(0.5 * (x0 + x1)) + "\" y=\"" + detail::px(y + 20.0) +
         "\" font-size=\"11\" text-anchor=\"middle\">log10|z - c| gap [" + detail::fmt("%.2f", a->log10_r_inner) + ", " +
         detail::fmt("%.2f", a->log10_r_outer) + "]</text>\n";
    s += "</g>\n";
    y += strip_h;
  }
  s += "</svg>\n";
  return s;
}

inline void render_svg(const PointCloud& cloud, std::span<const Annulus> annuli, const std::string& path,
                       const SvgOptions& opt = {}) {
  write_text_file(path, render_svg(cloud, annuli, opt));
}

}  // namespace aforge
