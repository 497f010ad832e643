#pragma once

// JSON for reports and system configs. Key order is insertion order so that
// identical inputs give byte-identical files.

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "aforge/attractor.hpp"
#include "aforge/error.hpp"
#include "aforge/geometry.hpp"
#include "aforge/gftlab.hpp"
#include "aforge/maps.hpp"
#include "aforge/perfectness.hpp"
#include "aforge/system.hpp"

namespace aforge {

using Json = nlohmann::ordered_json;

namespace detail {

// JSON has no inf/nan; those become null.
inline Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json point(CPoint z) { return Json::array({num(z.real()), num(z.imag())}); }

inline CPoint read_point(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError("io", "parse", std::string(what) + " must be an [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline double read_number(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw ConfigError("io", "parse", std::string("missing number '") + key + "'");
  return j[key].get<double>();
}

}  // namespace detail

inline Json to_json(const Annulus& a) {
  Json j;
  j["center"] = detail::point(a.center);
  j["r"] = a.linear_representable ? detail::num(a.r_inner) : Json(nullptr);
  j["R"] = a.linear_representable ? detail::num(a.r_outer) : Json(nullptr);
  j["log10_r"] = detail::num(a.log10_r_inner);
  j["log10_R"] = detail::num(a.log10_r_outer);
  j["log10_ratio"] = detail::num(a.log10_ratio());
  j["linear_representable"] = a.linear_representable;
  return j;
}

inline Json to_json(const SeparationCertificate& c) {
  Json j = to_json(c.annulus);
  j["inner_witness"] = detail::point(c.inner_witness);
  j["outer_witness"] = detail::point(c.outer_witness);
  j["resolution"] = detail::num(c.resolution);
  j["verified_empty"] = c.verified_empty;
  j["ratio"] = detail::num(c.annulus.ratio());
  j["ratio_log10"] = detail::num(c.ratio_log10);
  return j;
}

inline Json to_json(const UPReport& r) {
  Json j;
  Json levels = Json::array();
  for (const auto& e : r.per_resolution) {
    Json l;
    l["resolution"] = detail::num(e.resolution);
    l["resolution_log10"] = detail::num(e.resolution_log10);
    l["max_ratio_log10"] = e.certificate ? detail::num(e.max_ratio_log10) : Json(nullptr);
    l["centers_scanned"] = e.centers_scanned;
    l["certificate"] = e.certificate ? to_json(*e.certificate) : Json(nullptr);
    levels.push_back(std::move(l));
  }
  j["per_resolution"] = std::move(levels);
  j["verdict"] = to_string(r.verdict);
  j["M_estimate"] = r.M_estimate ? detail::num(*r.M_estimate) : Json(nullptr);
  j["warnings"] = r.warnings;
  return j;
}

inline Json to_json(const ConstantsLedger& L) {
  Json j;
  j["eta"] = detail::num(L.eta);
  j["bound_M"] = detail::num(L.bound_M);
  j["radius_r"] = detail::num(L.radius_r);
  j["rho"] = detail::num(L.rho);
  j["delta"] = detail::num(L.delta);
  j["C"] = detail::num(L.C);
  j["s"] = L.s ? detail::num(*L.s) : Json(nullptr);
  j["cloud_diameter"] = detail::num(L.cloud_diameter);
  j["delta_exceeds_diameter"] = L.delta_exceeds_diameter;
  Json p;
  for (const auto& [k, v] : L.provenance) p[k] = v;
  j["provenance"] = std::move(p);
  return j;
}

inline Json to_json(const ValidationReport& v) {
  Json j;
  j["containment_ok"] = v.containment_ok;
  j["min_slack"] = detail::num(v.min_slack);
  j["image_bound"] = detail::num(v.image_bound);
  j["contraction_estimate"] = detail::num(v.contraction_estimate);
  j["contraction_s"] = v.contraction_s ? detail::num(*v.contraction_s) : Json(nullptr);
  j["contraction_method"] = to_string(v.contraction_method);
  j["samples_used"] = v.samples_used;
  if (v.failure) {
    j["failure"] = {{"generator", v.failure->generator},
                    {"sample", detail::point(v.failure->sample)},
                    {"image", detail::point(v.failure->image)},
                    {"slack", detail::num(v.failure->slack)}};
  }
  return j;
}

inline Json to_json(const PullbackCertificate& p) {
  Json j;
  j["word"] = p.word_used.indices;
  j["mode"] = p.mode == PullbackMode::proof ? "proof" : "fixed-depth";
  j["m_star"] = p.m_star;
  j["expanded"] = to_json(p.expanded);
  j["ratio_bound_log10"] = detail::num(p.ratio_bound_log10);
  j["ratio_ok"] = p.ratio_ok;
  j["outer_radius_bounds"] = Json::array({detail::num(p.outer_radius_bounds.first), detail::num(p.outer_radius_bounds.second)});
  j["outer_window_ok"] = p.outer_window_ok;
  j["separation_ok"] = p.separation_ok;
  return j;
}

inline Json to_json(const LemmaReport& r) {
  return {{"passed", r.passed}, {"worst", detail::num(r.worst)}, {"checks", r.checks}, {"detail", r.detail}};
}

/// Pass/fail matrix, one row per sample and one column per lemma check.
inline Json corpus_matrix(const std::vector<CorpusResult>& results) {
  Json rows = Json::array();
  std::size_t failures = 0;
  for (const auto& r : results) {
    Json row;
    row["index"] = r.index;
    row["kind"] = r.kind;
    row["certified"] = r.certified;
    row["koebe_coverage"] = to_json(r.coverage);
    row["lipschitz_bound"] = to_json(r.lipschitz);
    row["annulus_distortion"] = to_json(r.distortion);
    row["injectivity_radius"] = to_json(r.injectivity);
    if (!r.passed()) ++failures;
    rows.push_back(std::move(row));
  }
  Json j;
  j["samples"] = results.size();
  j["failures"] = failures;
  j["lemmas"] = {"koebe_coverage", "lipschitz_bound", "annulus_distortion", "injectivity_radius"};
  j["matrix"] = std::move(rows);
  return j;
}

// ---------------------------------------------------------------------------
// System configs

inline Json to_json(const DomainSpec& d) {
  switch (d.kind()) {
    case DomainSpec::Kind::disk:
      return {{"disk", {{"center", detail::point(d.disk().center)}, {"radius", d.disk().radius}}}};
    case DomainSpec::Kind::hull: {
      Json pts = Json::array();
      for (const CPoint& p : d.hull_points()) pts.push_back(detail::point(p));
      Json h = {{"points", pts}, {"margin", d.margin()}};
      if (d.half_plane()) h["half_plane"] = {{"normal", detail::point(d.half_plane()->normal)}, {"offset", d.half_plane()->offset}};
      return {{"hull", h}};
    }
    case DomainSpec::Kind::union_of: {
      Json parts = Json::array();
      for (const auto& p : d.parts()) parts.push_back(to_json(p));
      return {{"union", parts}};
    }
  }
  return nullptr;
}

inline DomainSpec domain_from_json(const Json& j) {
  if (!j.is_object() || j.size() != 1) throw ConfigError("io", "parse_domain", "domain needs exactly one of disk, hull, union");
  if (j.contains("disk")) {
    const Json& d = j["disk"];
    const double radius = detail::read_number(d, "radius");
    if (!(radius > 0.0)) throw ConfigError("io", "parse_domain", "disk radius must be > 0");
    return DomainSpec::make_disk(Disk(detail::read_point(d.value("center", Json::array({0.0, 0.0})), "disk center"), radius));
  }
  if (j.contains("hull")) {
    const Json& h = j["hull"];
    if (!h.contains("points") || !h["points"].is_array()) throw ConfigError("io", "parse_domain", "hull needs points");
    std::vector<CPoint> pts;
    for (const auto& p : h["points"]) pts.push_back(detail::read_point(p, "hull point"));
    std::optional<HalfPlane> hp;
    if (h.contains("half_plane")) {
      hp = HalfPlane{detail::read_point(h["half_plane"].value("normal", Json()), "half_plane normal"),
                     detail::read_number(h["half_plane"], "offset")};
    }
    return DomainSpec::make_hull(std::move(pts), detail::read_number(h, "margin"), hp);
  }
  if (j.contains("union")) {
    if (!j["union"].is_array()) throw ConfigError("io", "parse_domain", "union must be an array of domains");
    std::vector<DomainSpec> parts;
    for (const auto& p : j["union"]) parts.push_back(domain_from_json(p));
    return DomainSpec::make_union(std::move(parts));
  }
  throw ConfigError("io", "parse_domain", "unknown domain kind");
}

inline Json to_json(const IFSystem& s) {
  Json gens = Json::array();
  for (const auto& g : s.generators) {
    Json co = Json::array();
    for (const CPoint& c : g.coefficients()) co.push_back(detail::point(c));
    gens.push_back(std::move(co));
  }
  Json j;
  j["name"] = s.name;
  j["generators"] = std::move(gens);
  j["domain"] = to_json(s.domain);
  return j;
}

/// Unvalidated system from a config document.
inline IFSystem system_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("io", "parse_system", "system must be a JSON object");
  IFSystem s;
  s.name = j.value("name", std::string("unnamed"));
  if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty()) {
    throw ConfigError("io", "parse_system", "generators must be a non-empty array");
  }
  std::size_t idx = 0;
  for (const auto& g : j["generators"]) {
    if (!g.is_array()) throw ConfigError("io", "parse_system", "generator " + std::to_string(idx) + " is not a coefficient array");
    std::vector<CPoint> co;
    for (const auto& c : g) co.push_back(detail::read_point(c, "coefficient"));
    s.generators.emplace_back(std::move(co), "g" + std::to_string(idx++));
  }
  if (!j.contains("domain")) throw ConfigError("io", "parse_system", "missing domain");
  s.domain = domain_from_json(j["domain"]);
  return s;
}

inline Json parse_json(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("io", "parse", std::string(what) + ": " + e.what());
  }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace aforge
