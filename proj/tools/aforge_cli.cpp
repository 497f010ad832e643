// attractor-forge command line: run, gallery, gft-verify, pullback, render.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aforge/aforge.hpp"

namespace {

using namespace aforge;

std::vector<std::size_t> parse_word(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError("cli", "pullback", "word must be comma-separated generator indices, got '" + text + "'");
    }
  }
  return out;
}

std::vector<double> parse_reals(const std::string& text, std::size_t n, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      out.clear();
      break;
    }
  }
  if (out.size() != n) throw UsageError("cli", "render", std::string(what) + " expects " + std::to_string(n) + " comma-separated numbers");
  return out;
}

IFSystem load_system(const std::string& gallery, const std::string& system_file) {
  if (gallery.empty() == system_file.empty()) throw UsageError("cli", "load_system", "give exactly one of --gallery or --system");
  if (!gallery.empty()) return build_entry(gallery).system;
  return validated(system_from_json(parse_json(read_text_file(system_file), "system file")));
}

struct RunFlags {
  std::string config, gallery, system_file, out_dir, prefix;
  double cell = 0.0, stop_residual = 0.0, floor_factor = 4.0;
  std::size_t max_iters = 0, resolutions = 0, centers = 0, samples = 0, burn_in = 0;
  std::uint64_t seed = 0;
  bool analyze = false, chaos = false, no_finite = false, quiet = false;
};

int cmd_run(CLI::App& sub, const RunFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = run_config_from_json(parse_json(read_text_file(f.config), "run config"));
  // flags override the config file
  if (sub.count("--gallery")) {
    cfg.gallery = f.gallery;
    cfg.system.reset();
  }
  if (sub.count("--system")) {
    cfg.system = system_from_json(parse_json(read_text_file(f.system_file), "system file"));
    cfg.gallery.reset();
  }
  if (sub.count("--cell")) cfg.cell = f.cell;
  if (sub.count("--max-iters")) cfg.max_iters = f.max_iters;
  if (sub.count("--stop-residual")) cfg.stop_residual = f.stop_residual;
  if (f.chaos || sub.count("--seed") || sub.count("--samples") || sub.count("--burn-in")) {
    if (!cfg.chaos) cfg.chaos = ChaosConfig{};
    if (sub.count("--seed")) cfg.chaos->seed = f.seed;
    if (sub.count("--samples")) cfg.chaos->samples = f.samples;
    if (sub.count("--burn-in")) cfg.chaos->burn_in = f.burn_in;
  }
  if (f.analyze || sub.count("--resolutions") || sub.count("--floor-factor") || sub.count("--centers")) {
    if (!cfg.analysis) cfg.analysis = AnalysisConfig{};
    if (sub.count("--resolutions")) cfg.analysis->resolutions = f.resolutions;
    if (sub.count("--floor-factor")) cfg.analysis->floor_factor = f.floor_factor;
    if (sub.count("--centers")) cfg.analysis->centers_per_cloud = f.centers;
  }
  if (f.no_finite) cfg.detect_finite = false;
  if (sub.count("--out-dir")) cfg.outputs.dir = f.out_dir;
  if (sub.count("--prefix")) cfg.outputs.prefix = f.prefix;

  const PipelineResult r = run_pipeline(cfg);
  write_artifacts(r, cfg.outputs.dir);
  if (!f.quiet) {
    std::cout << "exit " << r.exit_code << ": " << r.message << "\n";
    if (r.run.contains("verdict")) std::cout << "verdict " << r.run["verdict"].get<std::string>() << "\n";
    if (r.run.contains("finite_cardinality") && !r.run["finite_cardinality"].is_null()) {
      std::cout << "finite_cardinality " << r.run["finite_cardinality"] << "\n";
    }
    for (const auto& [name, content] : r.artifacts) std::cout << "wrote " << cfg.outputs.dir << "/" << name << "\n";
  } else if (r.exit_code != kExitOk) {
    std::cerr << r.message << "\n";
  }
  return r.exit_code;
}

int cmd_gallery(const std::string& id, const std::string& emit) {
  if (id.empty()) {
    for (const auto& s : gallery_ids()) std::cout << s << "\n";
    return 0;
  }
  const GalleryEntry e = build_entry(id);
  if (!emit.empty()) {
    write_text_file(emit, dump(to_json(e.system)));
    std::cout << "wrote " << emit << "\n";
    return 0;
  }
  Json j;
  j["id"] = e.id;
  j["system"] = to_json(e.system);
  j["validation"] = to_json(*e.system.validation);
  Json ex;
  ex["finite_cardinality"] = e.expected.finite_cardinality ? Json(*e.expected.finite_cardinality) : Json(nullptr);
  ex["up_verdict"] = e.expected.up_verdict ? Json(to_string(*e.expected.up_verdict)) : Json(nullptr);
  ex["eta_positive"] = e.expected.eta_positive ? Json(*e.expected.eta_positive) : Json(nullptr);
  ex["canonical_annuli"] = Json::array();
  for (const auto& a : e.expected.canonical_annuli) ex["canonical_annuli"].push_back(to_json(a));
  j["expected"] = std::move(ex);
  j["plan_cells"] = e.plan.cells;
  if (!e.notes.empty()) j["notes"] = e.notes;
  std::cout << dump(j);
  return 0;
}

int cmd_gft(std::size_t count, std::uint64_t seed, std::uint64_t verify_seed, const std::string& out) {
  const auto results = verify_corpus(univalent_corpus(count, seed), verify_seed);
  const Json m = corpus_matrix(results);
  if (out.empty()) std::cout << dump(m);
  else write_text_file(out, dump(m));
  const auto failures = m["failures"].get<std::size_t>();
  std::cerr << results.size() << " samples, " << failures << " failures\n";
  return failures == 0 ? kExitOk : kExitLemma;
}

struct PullbackFlags {
  std::string gallery, system_file, word = "0", mode = "proof", out;
  double cell = 1e-4, inner = 0.0, outer = 0.0;
  std::size_t steps = 0;
};

int cmd_pullback(const PullbackFlags& f) {
  const IFSystem s = load_system(f.gallery, f.system_file);
  const Word w{parse_word(f.word)};
  check_word(w, s.generators.size(), "pullback");
  PullbackOptions opt;
  if (f.mode == "fixed-depth") {
    opt.mode = PullbackMode::fixed_depth;
    opt.steps = f.steps;
  } else if (f.mode != "proof") {
    throw UsageError("cli", "pullback", "--mode must be proof or fixed-depth");
  }
  const auto approx = iterate_attractor(s, f.cell);
  ConstantsLedger L;
  if (opt.mode == PullbackMode::proof) {
    L = theorem_constants(s, approx.cloud);  // eta = 0 is a hypothesis failure here
  } else {
    try {
      L = theorem_constants(s, approx.cloud);
    } catch (const HypothesisError&) {
    }
  }
  SeparationCertificate cert;
  cert.annulus = Annulus::linear(fixed_point(s, w), f.inner, f.outer);
  cert.resolution = approx.cloud.resolution;
  cert.verified_empty = verify_separation(approx.cloud, cert.annulus);
  cert.ratio_log10 = cert.annulus.log10_ratio();
  const PullbackCertificate p = pullback_annulus(s, w, cert, L, approx.cloud, opt);
  Json j;
  j["input"] = to_json(cert);
  j["ledger"] = to_json(L);
  j["pullback"] = to_json(p);
  if (f.out.empty()) std::cout << dump(j);
  else write_text_file(f.out, dump(j));
  return kExitOk;
}

int cmd_render(const std::string& cloud_path, const std::vector<std::string>& annuli, const std::vector<std::string>& log_annuli,
               const std::string& out, double width) {
  const PointCloud cloud = cloud_from_csv(read_text_file(cloud_path));
  std::vector<Annulus> list;
  for (const auto& a : annuli) {
    const auto v = parse_reals(a, 4, "--annulus");
    list.push_back(Annulus::linear({v[0], v[1]}, v[2], v[3]));
  }
  for (const auto& a : log_annuli) {
    const auto v = parse_reals(a, 4, "--log-annulus");
    list.push_back(Annulus::from_log10({v[0], v[1]}, v[2], v[3]));
  }
  SvgOptions opt;
  opt.width = width;
  render_svg(cloud, list, out, opt);
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attractor-forge: attractors of analytic iterated function systems and their separating annuli"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "compute an attractor, its constants and (optionally) the perfectness analysis");
  run->add_option("--config", rf.config, "run config JSON");
  run->add_option("--gallery", rf.gallery, "built-in system id");
  run->add_option("--system", rf.system_file, "system config JSON");
  run->add_option("--cell", rf.cell, "dedup cell of the main cloud");
  run->add_option("--max-iters", rf.max_iters, "iteration cap");
  run->add_option("--stop-residual", rf.stop_residual, "stop once the residual drops below this");
  run->add_flag("--chaos", rf.chaos, "also run the chaos game");
  run->add_option("--seed", rf.seed, "chaos game seed");
  run->add_option("--samples", rf.samples, "chaos game samples");
  run->add_option("--burn-in", rf.burn_in, "chaos game burn-in");
  run->add_flag("--analyze", rf.analyze, "separating-annulus analysis across resolutions");
  run->add_option("--resolutions", rf.resolutions, "number of resolutions (halving up to --cell)");
  run->add_option("--floor-factor", rf.floor_factor, "discard gaps below this many cells");
  run->add_option("--centers", rf.centers, "centres scanned per cloud (0 = all)");
  run->add_flag("--no-finite-detect", rf.no_finite, "skip finite-attractor detection");
  run->add_option("--out-dir", rf.out_dir, "artifact directory");
  run->add_option("--prefix", rf.prefix, "artifact file name prefix");
  run->add_flag("--quiet", rf.quiet, "only report errors");

  std::string gid, emit;
  auto* gal = app.add_subcommand("gallery", "list or show built-in systems");
  gal->add_option("--id", gid, "entry id");
  gal->add_option("--emit-config", emit, "write the system config JSON to this path");

  std::size_t gcount = 200;
  std::uint64_t gseed = 20240601, vseed = 99;
  std::string gout;
  auto* gft = app.add_subcommand("gft-verify", "lemma verifiers over a univalent corpus");
  gft->add_option("--samples", gcount, "corpus size");
  gft->add_option("--seed", gseed, "corpus seed");
  gft->add_option("--verify-seed", vseed, "seed for witness and trial points");
  gft->add_option("--out", gout, "matrix JSON path (default stdout)");

  PullbackFlags pf;
  auto* pb = app.add_subcommand("pullback", "pull a separating annulus back through inverse branches");
  pb->add_option("--gallery", pf.gallery, "built-in system id");
  pb->add_option("--system", pf.system_file, "system config JSON");
  pb->add_option("--word", pf.word, "comma-separated generator indices");
  pb->add_option("--inner", pf.inner, "inner radius about the word's fixed point")->required();
  pb->add_option("--outer", pf.outer, "outer radius")->required();
  pb->add_option("--mode", pf.mode, "proof or fixed-depth");
  pb->add_option("--steps", pf.steps, "steps for fixed-depth mode");
  pb->add_option("--cell", pf.cell, "cloud cell for the separation check");
  pb->add_option("--out", pf.out, "certificate JSON path (default stdout)");

  std::string cloud_path, rout = "cloud.svg";
  std::vector<std::string> ann, log_ann;
  double width = 800.0;
  auto* rd = app.add_subcommand("render", "SVG of a cloud CSV with annulus overlays");
  rd->add_option("--cloud", cloud_path, "cloud CSV (re,im)")->required();
  rd->add_option("--annulus", ann, "re,im,r,R (repeatable)");
  rd->add_option("--log-annulus", log_ann, "re,im,log10 r,log10 R (repeatable)");
  rd->add_option("--out", rout, "SVG path");
  rd->add_option("--width", width, "viewport width in pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (run->parsed()) return cmd_run(*run, rf);
    if (gal->parsed()) return cmd_gallery(gid, emit);
    if (gft->parsed()) return cmd_gft(gcount, gseed, vseed, gout);
    if (pb->parsed()) return cmd_pullback(pf);
    if (rd->parsed()) return cmd_render(cloud_path, ann, log_ann, rout, width);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
