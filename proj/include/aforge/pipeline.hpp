#pragma once

// validate -> attractor -> constants -> (optional) perfectness analysis ->
// artifacts. Artifacts are returned as (file name, bytes) so that callers
// decide where they go; nothing here reads the clock.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aforge/attractor.hpp"
#include "aforge/error.hpp"
#include "aforge/gallery.hpp"
#include "aforge/geometry.hpp"
#include "aforge/io.hpp"
#include "aforge/perfectness.hpp"
#include "aforge/svg.hpp"
#include "aforge/system.hpp"

namespace aforge {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitHypothesis = 3, kExitLemma = 4 };

struct ChaosConfig {
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  std::size_t burn_in = 64;
};

struct AnalysisConfig {
  std::optional<std::size_t> resolutions;  // unset: the gallery schedule, else 3
  double floor_factor = 4.0;
  std::optional<std::size_t> centers_per_cloud;
};

struct OutputPaths {
  std::string dir = ".";
  std::string prefix;
};

struct RunConfig {
  std::optional<std::string> gallery;
  std::optional<IFSystem> system;
  std::optional<double> cell;
  std::size_t max_iters = 200;
  double stop_residual = 0.0;
  std::optional<ChaosConfig> chaos;
  std::optional<AnalysisConfig> analysis;
  bool detect_finite = true;
  OutputPaths outputs;
};

inline void check_config(const RunConfig& c) {
  if (c.gallery.has_value() == c.system.has_value()) {
    throw ConfigError("cli", "run_config", "need exactly one of a gallery id or an inline system");
  }
  if (c.cell && !(*c.cell > 0.0 && std::isfinite(*c.cell))) throw ConfigError("cli", "run_config", "cell must be > 0");
  if (c.max_iters == 0) throw ConfigError("cli", "run_config", "max_iters must be > 0");
  if (!(c.stop_residual >= 0.0)) throw ConfigError("cli", "run_config", "stop_residual must be >= 0");
  if (c.chaos && (c.chaos->samples == 0 || c.chaos->samples <= c.chaos->burn_in)) {
    throw ConfigError("cli", "run_config", "chaos samples must be > burn_in");
  }
  if (c.analysis) {
    if (c.analysis->resolutions && *c.analysis->resolutions == 0) throw ConfigError("cli", "run_config", "resolutions must be > 0");
    if (!(c.analysis->floor_factor > 0.0)) throw ConfigError("cli", "run_config", "floor_factor must be > 0");
  }
}

inline RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("cli", "run_config", "config must be a JSON object");
  RunConfig c;
  auto count = [&](const Json& o, const char* key, std::size_t fallback) -> std::size_t {
    if (!o.contains(key)) return fallback;
    if (!o[key].is_number_integer() || o[key].get<long long>() < 0) {
      throw ConfigError("cli", "run_config", std::string(key) + " must be a non-negative integer");
    }
    return o[key].get<std::size_t>();
  };
  auto real = [&](const Json& o, const char* key) -> std::optional<double> {
    if (!o.contains(key)) return std::nullopt;
    if (!o[key].is_number()) throw ConfigError("cli", "run_config", std::string(key) + " must be a number");
    return o[key].get<double>();
  };
  if (j.contains("gallery")) c.gallery = j["gallery"].get<std::string>();
  if (j.contains("system")) c.system = system_from_json(j["system"]);
  c.cell = real(j, "cell");
  c.max_iters = count(j, "max_iters", c.max_iters);
  c.stop_residual = real(j, "stop_residual").value_or(0.0);
  if (j.contains("chaos")) {
    const Json& o = j["chaos"];
    ChaosConfig ch;
    ch.seed = count(o, "seed", ch.seed);
    ch.samples = count(o, "samples", ch.samples);
    ch.burn_in = count(o, "burn_in", ch.burn_in);
    c.chaos = ch;
  }
  if (j.contains("analysis")) {
    const Json& o = j["analysis"];
    AnalysisConfig a;
    if (o.contains("resolutions")) a.resolutions = count(o, "resolutions", 3);
    a.floor_factor = real(o, "floor_factor").value_or(a.floor_factor);
    if (o.contains("centers_per_cloud")) a.centers_per_cloud = count(o, "centers_per_cloud", 0);
    c.analysis = a;
  }
  if (j.contains("detect_finite")) c.detect_finite = j["detect_finite"].get<bool>();
  if (j.contains("outputs")) {
    c.outputs.dir = j["outputs"].value("dir", c.outputs.dir);
    c.outputs.prefix = j["outputs"].value("prefix", c.outputs.prefix);
  }
  return c;
}

struct PipelineResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::pair<std::string, std::string>> artifacts;  // file name, content
  Json run;                                                    // also stored as run.json

  const std::string* artifact(const std::string& name) const {
    for (const auto& [n, c] : artifacts) {
      if (n == name) return &c;
    }
    return nullptr;
  }
};

/// No point of the cloud or its shadow strictly inside the annulus (compared
/// in log10 modulus about the centre), points on both sides.
inline bool annulus_empty(const AttractorApprox& a, const Annulus& ann) {
  const double tol = 1e-12;
  bool in = false, out = false;
  auto visit = [&](double L) {
    if (L > ann.log10_r_inner + tol && L < ann.log10_r_outer - tol) return false;
    if (L <= ann.log10_r_inner + tol) in = true;
    if (L >= ann.log10_r_outer - tol) out = true;
    return true;
  };
  for (const CPoint& z : a.cloud.points) {
    const double d = std::abs(z - ann.center);
    if (!visit(d > 0.0 ? std::log10(d) : -std::numeric_limits<double>::infinity())) return false;
  }
  if (ann.center == CPoint{}) {
    for (const auto& p : a.shadow) {
      if (!visit(p.log10_modulus)) return false;
    }
  }
  return in && out;
}

namespace detail {

struct Schedule {
  std::vector<double> cells;
  std::vector<std::optional<ShadowOptions>> shadows;
};

inline std::optional<ShadowOptions> scaled_shadow(const std::optional<ShadowOptions>& base, double cell) {
  if (!base) return std::nullopt;
  ShadowOptions o = *base;
  o.threshold = 4.0 * cell;
  return o;
}

inline Schedule analysis_schedule(const RunConfig& cfg, const GalleryEntry* entry, double cell) {
  Schedule sc;
  const bool use_plan = entry && !entry->plan.cells.empty() && !cfg.cell && !(cfg.analysis && cfg.analysis->resolutions);
  if (use_plan) {
    sc.cells = entry->plan.cells;
    sc.shadows = entry->plan.shadows;
    sc.shadows.resize(sc.cells.size());
    return sc;
  }
  const std::size_t k = cfg.analysis && cfg.analysis->resolutions ? *cfg.analysis->resolutions : 3;
  const std::optional<ShadowOptions> base =
      entry && !entry->plan.shadows.empty() ? entry->plan.shadows.back() : std::optional<ShadowOptions>{};
  for (std::size_t j = 0; j < k; ++j) {
    const double c = cell * std::ldexp(1.0, static_cast<int>(k - 1 - j));
    sc.cells.push_back(c);
    sc.shadows.push_back(scaled_shadow(base, c));
  }
  return sc;
}

inline Json approx_json(const AttractorApprox& a) {
  Json j;
  j["method"] = to_string(a.method);
  j["cell"] = num(a.cloud.resolution);
  j["points"] = a.cloud.size();
  j["shadow_points"] = a.shadow.size();
  j["iterations"] = a.iterations;
  j["residual"] = num(a.residual);
  if (a.rng_seed) j["seed"] = *a.rng_seed;
  j["warning"] = a.warning ? Json(*a.warning) : Json(nullptr);
  return j;
}

}  // namespace detail

/// Exit status for an error escaping the pipeline or a subcommand. I/O
/// failures are not part of the analysis contract and get 1.
inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const HypothesisError*>(&e)) return kExitHypothesis;
  if (dynamic_cast<const LemmaViolation*>(&e)) return kExitLemma;
  if (dynamic_cast<const IoError*>(&e)) return 1;
  return kExitValidation;
}

inline std::string artifact_name(const RunConfig& cfg, const std::string& base) { return cfg.outputs.prefix + base; }

inline PipelineResult run_pipeline(const RunConfig& cfg) {
  PipelineResult res;
  Json& run = res.run;
  auto add = [&](const std::string& base, std::string content) {
    res.artifacts.emplace_back(artifact_name(cfg, base), std::move(content));
  };
  auto finish = [&](int code, std::string message) {
    res.exit_code = code;
    res.message = std::move(message);
    run["exit_code"] = code;
    run["message"] = res.message;
    add("run.json", dump(run));
    return res;
  };

  std::optional<GalleryEntry> entry;
  IFSystem sys;
  try {
    check_config(cfg);
    if (cfg.gallery) {
      entry = build_entry(*cfg.gallery);
      sys = entry->system;
      run["gallery"] = entry->id;
    } else {
      sys = *cfg.system;
      run["gallery"] = nullptr;
      ValidationReport rep = validate_system(sys);
      sys.validation = rep;
      if (!rep.containment_ok) {
        run["system"] = to_json(sys);
        run["validation"] = to_json(rep);
        return finish(kExitValidation, "system.validate_system: generator images leave the domain");
      }
    }
  } catch (const Error& e) {
    return finish(exit_code_for(e), e.what());
  }
  run["system"] = to_json(sys);
  run["validation"] = to_json(*sys.validation);
  if (entry && !entry->notes.empty()) run["notes"].push_back(entry->notes);

  const double cell = cfg.cell.value_or(entry ? entry->plan.default_cell : 1e-4);
  run["cell"] = cell;
  run["max_iters"] = cfg.max_iters;
  run["stop_residual"] = cfg.stop_residual;

  try {
    // attractor: the finest analysis cloud doubles as the main cloud
    std::vector<AttractorApprox> clouds;
    detail::Schedule sc;
    if (cfg.analysis) {
      sc = detail::analysis_schedule(cfg, entry ? &*entry : nullptr, cell);
      for (std::size_t j = 0; j < sc.cells.size(); ++j) {
        clouds.push_back(iterate_attractor(sys, sc.cells[j], cfg.max_iters, cfg.stop_residual, sc.shadows[j]));
      }
    } else {
      const std::optional<ShadowOptions> sh =
          entry && !entry->plan.shadows.empty() ? detail::scaled_shadow(entry->plan.shadows.back(), cell) : std::nullopt;
      clouds.push_back(iterate_attractor(sys, cell, cfg.max_iters, cfg.stop_residual, sh));
    }
    const AttractorApprox& main = clouds.back();
    run["attractor"] = detail::approx_json(main);
    add("cloud.csv", cloud_to_csv(main.cloud));

    if (cfg.chaos) {
      const auto cg = chaos_game(sys, cfg.chaos->seed, cfg.chaos->samples, cfg.chaos->burn_in, main.cloud.resolution);
      Json cj = detail::approx_json(cg);
      cj["burn_in"] = cfg.chaos->burn_in;
      const double h = hausdorff_distance(cg.cloud.points, main.cloud.points);
      cj["hausdorff_to_deterministic"] = detail::num(h);
      cj["hausdorff_over_cell"] = detail::num(h / main.cloud.resolution);
      run["chaos"] = std::move(cj);
      add("chaos.csv", cloud_to_csv(cg.cloud));
    }

    std::optional<std::size_t> finite;
    if (cfg.detect_finite) finite = detect_finite(sys);
    run["finite_cardinality"] = finite ? Json(*finite) : Json(nullptr);

    bool eta_zero = false;
    try {
      const ConstantsLedger L = theorem_constants(sys, main.cloud);
      add("ledger.json", dump(to_json(L)));
    } catch (const HypothesisError& e) {
      eta_zero = true;
      Json lj;
      lj["eta"] = 0.0;
      lj["note"] = e.what();
      add("ledger.json", dump(lj));
    }
    run["eta_positive"] = !eta_zero;
    if (eta_zero) {
      run["notes"].push_back(finite ? "finite attractor with " + std::to_string(*finite) +
                                          " points: eta = 0 (superattracting fixed points); uniform perfectness does not apply"
                                    : std::string("eta = 0: the positive-derivative-floor hypothesis fails on this attractor"));
    } else if (finite) {
      run["notes"].push_back("finite attractor with " + std::to_string(*finite) + " points");
    }

    std::vector<Annulus> overlay;
    if (cfg.analysis) {
      const std::size_t centers = cfg.analysis->centers_per_cloud.value_or(entry ? entry->plan.centers_per_cloud : 256);
      const UPReport up = up_estimate(clouds, centers, cfg.analysis->floor_factor);
      add("up_report.json", dump(to_json(up)));
      run["verdict"] = to_string(up.verdict);
      run["clouds"] = Json::array();
      for (const auto& a : clouds) run["clouds"].push_back(detail::approx_json(a));

      Json certs;
      certs["per_resolution"] = Json::array();
      for (const auto& e : up.per_resolution) certs["per_resolution"].push_back(e.certificate ? to_json(*e.certificate) : Json(nullptr));
      if (up.per_resolution.back().certificate) overlay.push_back(up.per_resolution.back().certificate->annulus);
      if (entry && !entry->expected.canonical_annuli.empty()) {
        certs["canonical"] = Json::array();
        for (const auto& ca : entry->expected.canonical_annuli) {
          Json cj = to_json(ca);
          cj["empty_in_cloud"] = annulus_empty(main, ca);
          certs["canonical"].push_back(std::move(cj));
          overlay.push_back(ca);
        }
      }
      add("certificates.json", dump(certs));
    }

    SvgOptions so;
    so.shadow = main.shadow;
    so.title = sys.name;
    add("cloud.svg", render_svg(main.cloud, overlay, so));

    if (eta_zero && cfg.analysis) return finish(kExitHypothesis, "eta = 0 with analysis requested; partial artifacts written");
    return finish(kExitOk, "ok");
  } catch (const Error& e) {
    return finish(exit_code_for(e), e.what());
  }
}

inline void write_artifacts(const PipelineResult& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cli", "write_artifacts", "cannot create " + dir + ": " + ec.message());
  for (const auto& [name, content] : r.artifacts) write_text_file((std::filesystem::path(dir) / name).string(), content);
}

}  // namespace aforge
