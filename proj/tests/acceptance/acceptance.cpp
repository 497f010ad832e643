// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "aforge/aforge.hpp"

using namespace aforge;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void need(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [fail: " << what << "]";
    }
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::vector<AttractorApprox> plan_clouds(const GalleryEntry& e) {
  std::vector<AttractorApprox> out;
  for (std::size_t i = 0; i < e.plan.cells.size(); ++i) {
    const auto sh = e.plan.shadows.empty() ? std::optional<ShadowOptions>{} : e.plan.shadows[i];
    out.push_back(iterate_attractor(e.system, e.plan.cells[i], 200, 0.0, sh));
  }
  return out;
}

// Left endpoints of the depth-d Cantor intervals plus right endpoints.
std::vector<CPoint> cantor_endpoints(int depth) {
  std::vector<double> lo = {0.0};
  double len = 1.0;
  for (int d = 0; d < depth; ++d) {
    len /= 3.0;
    std::vector<double> next;
    next.reserve(2 * lo.size());
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

// Largest ratio of consecutive distances from any centre, inner radius at
// least floor, outer radius at most the diameter. Points are real here.
double endpoint_oracle(const std::vector<CPoint>& pts, double floor) {
  std::vector<double> xs;
  for (const CPoint& z : pts) xs.push_back(z.real());
  std::sort(xs.begin(), xs.end());
  const double diam = xs.back() - xs.front();
  double best = 0.0;
  std::vector<double> d;
  for (double c : xs) {
    d.clear();
    for (double x : xs) {
      if (x != c) d.push_back(std::abs(x - c));
    }
    std::sort(d.begin(), d.end());
    for (std::size_t j = 0; j + 1 < d.size(); ++j) {
      if (d[j] >= floor && d[j + 1] <= diam) best = std::max(best, d[j + 1] / d[j]);
    }
  }
  return best;
}

void ac1(Outcome& o) {
  for (int n : {1, 3, 5, 8}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = build_entry("ex46-n" + std::to_string(n));
    const auto k = detect_finite(e.system);
    o.need(k && *k == static_cast<std::size_t>(n), "n=" + std::to_string(n) + " detect_finite");
    const auto a = iterate_attractor(e.system, 1e-4);
    std::vector<bool> hit(n, false);
    double worst = 0.0;
    for (const CPoint& z : a.cloud.points) {
      double best = INFINITY;
      int which = 0;
      for (int j = 0; j < n; ++j) {
        const double d = std::abs(z - std::polar(0.1, 2.0 * std::numbers::pi * j / n));
        if (d < best) best = d, which = j;
      }
      worst = std::max(worst, best);
      hit[which] = true;
    }
    o.need(worst <= 1e-9, "n=" + std::to_string(n) + " point off the circle");
    o.need(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }), "n=" + std::to_string(n) + " missing root");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.need(secs < 5.0, "n=" + std::to_string(n) + " runtime");
    o.detail << " n=" << n << ":" << (k ? std::to_string(*k) : "none") << " err=" << worst;
  }
}

void ac2(Outcome& o) {
  const auto e = build_entry("ex44");
  const auto clouds = plan_clouds(e);
  const auto& a0 = clouds.front();
  const double lo = 23.0 * std::log10(0.75), hi = std::log10(0.5);
  bool empty = true;
  for (const CPoint& z : a0.cloud.points) {
    const double L = std::log10(std::abs(z));
    if (z != CPoint{} && L > lo && L < hi) empty = false;
  }
  for (const auto& p : a0.shadow) {
    if (p.log10_modulus > lo && p.log10_modulus < hi) empty = false;
  }
  o.need(empty, "point inside ((3/4)^23, 1/2)");

  const auto certs = separating_annuli(a0.cloud, 0.0, 4.0 * a0.cloud.resolution);
  if (certs.empty()) {
    o.need(false, "no certificate at 0");
  } else {
    // the topmost genuine gap (ratio above 2); slivers between cloud points
    // on the outer arcs do not count
    Annulus top = certs.front().annulus;
    for (const auto& c : certs) {
      if (c.annulus.ratio() > 2.0 && c.annulus.r_outer > top.r_outer) top = c.annulus;
    }
    o.need(near(top.r_inner, 1.3373e-3, 1e-6), "top r");
    o.need(near(top.r_outer, 0.5, 1e-3), "top R");
    o.detail << " top=(" << top.r_inner << ", " << top.r_outer << ") ratio=" << top.ratio();
  }

  const auto logs = separating_annuli_log(clouds[1], clouds[1].shadow_options->log10_floor);
  const auto it = std::find_if(logs.begin(), logs.end(), [](const SeparationCertificate& c) {
    return near(c.annulus.log10_r_inner, -66.09, 0.01) && near(c.annulus.log10_r_outer, -6.92, 0.01);
  });
  o.need(it != logs.end(), "log gap at n=1");
  if (it != logs.end()) o.detail << " n=1 log10 ratio=" << it->ratio_log10;

  const auto rep = up_estimate(clouds, e.plan.centers_per_cloud, e.plan.floor_factor);
  o.need(rep.verdict == Verdict::growing, "verdict");
  o.detail << " verdict=" << to_string(rep.verdict);
}

void ac3(Outcome& o) {
  const auto e = build_entry("ex43");
  const auto a = iterate_attractor(e.system, e.plan.cells.back());
  const double ratios[] = {32, 512, 8192};
  // 0 is a limit point but not a cloud point; centre on the nearest one
  const CPoint c0 = *std::min_element(a.cloud.points.begin(), a.cloud.points.end(),
                                      [](CPoint x, CPoint y) { return std::abs(x) < std::abs(y); });
  const auto certs = separating_annuli(a.cloud, c0, 4.0 * a.cloud.resolution);
  double prev = INFINITY;
  for (int n = 1; n <= 3; ++n) {
    const Annulus want = Annulus::linear(0.0, detail::ex43_b(n + 1), detail::ex43_a(n));
    // the detected gap at c0 that contains Ann(0; b_{n+1}, a_n)
    const auto it = std::find_if(certs.begin(), certs.end(), [&](const SeparationCertificate& c) {
      return c.annulus.r_inner <= want.r_inner * 1.01 && c.annulus.r_outer >= want.r_outer * 0.99 &&
             c.annulus.r_outer < 2.0 * want.r_outer;
    });
    o.need(verify_separation(a.cloud, want), "n=" + std::to_string(n) + " canonical annulus not empty");
    const double r = want.ratio();
    o.need(std::abs(r / ratios[n - 1] - 1.0) <= 0.01, "n=" + std::to_string(n) + " ratio");
    if (it == certs.end()) {
      o.need(false, "n=" + std::to_string(n) + " not detected");
      continue;
    }
    o.need(it->annulus.r_outer < prev, "monotone outer radii");
    prev = it->annulus.r_outer;
    o.detail << " n=" << n << ":" << r << " (detected " << it->annulus.ratio() << ")";
  }
}

void ac4(Outcome& o) {
  for (const char* id : {"cantor3", "ex41"}) {
    RunConfig c;
    c.gallery = id;
    c.analysis = AnalysisConfig{};
    const auto r = run_pipeline(c);
    const auto up = Json::parse(*r.artifact("up_report.json"));
    o.need(r.exit_code == kExitOk && up["verdict"] == "bounded", std::string(id) + " verdict");
    o.detail << " " << id << "=" << up["verdict"].get<std::string>();
    if (std::string(id) == "cantor3") {
      const double M = up["M_estimate"].is_number() ? up["M_estimate"].get<double>() : NAN;
      const double oracle = endpoint_oracle(cantor_endpoints(10), 4.0 * std::pow(3.0, -10));
      o.detail << " M=" << M << " oracle=" << oracle;
      o.need(near(M, oracle, 0.01 * oracle), "M disagrees with oracle");
      o.need(M >= 1.8 && M <= 2.2, "M outside [1.8, 2.2]");
    }
  }
}

void ac5(Outcome& o) {
  const auto e = build_entry("ex41");
  const auto a = iterate_attractor(e.system, e.plan.default_cell);
  const auto L = theorem_constants(e.system, a.cloud);
  o.need(L.eta >= 0.08, "ex41 eta");
  o.need(std::isfinite(L.rho) && L.rho > 0 && std::isfinite(L.delta) && L.delta > 0, "ex41 rho/delta");
  o.need(std::abs(L.C - 100.0 / (81.0 * L.eta)) <= 1e-12 * L.C, "ex41 C formula");
  o.detail << " ex41 eta=" << L.eta << " rho=" << L.rho << " delta=" << L.delta << " C=" << L.C;

  RunConfig c44;
  c44.gallery = "ex44";
  c44.analysis = AnalysisConfig{};
  const auto r44 = run_pipeline(c44);
  const auto l44 = Json::parse(*r44.artifact("ledger.json"));
  o.need(r44.exit_code == kExitHypothesis, "ex44 exit code");
  o.need(l44["eta"] == 0.0, "ex44 eta");
  o.detail << " ex44 exit=" << r44.exit_code;

  RunConfig c46;
  c46.gallery = "ex46-n5";
  const auto r46 = run_pipeline(c46);
  const auto l46 = Json::parse(*r46.artifact("ledger.json"));
  o.need(l46["eta"] == 0.0, "ex46 eta");
  o.need(r46.run["notes"].dump().find("finite attractor") != std::string::npos, "ex46 note");
  o.detail << " ex46 exit=" << r46.exit_code;
}

void ac6(Outcome& o) {
  const auto results = verify_corpus(univalent_corpus(200, 20240601));
  std::size_t cert = 0, cov = 0, lip = 0, dist = 0, inj = 0;
  for (const auto& r : results) {
    cert += r.certified;
    cov += r.coverage.passed;
    lip += r.lipschitz.passed;
    dist += r.distortion.passed;
    inj += r.injectivity.passed;
  }
  const std::size_t n = results.size();
  o.need(n == 200, "corpus size");
  o.need(cert == n, "uncertified samples");
  o.need(cov == n, "koebe coverage");
  o.need(lip == n, "lipschitz");
  o.need(dist == n, "distortion");
  o.need(inj == n, "injectivity collisions");
  o.detail << " samples=" << n << " coverage=" << cov << " lipschitz=" << lip << " distortion=" << dist
           << " injectivity=" << inj;
}

void ac7(Outcome& o) {
  const auto e = build_entry("cantor3");
  const auto a = iterate_attractor(e.system, 1e-4);
  const auto L = theorem_constants(e.system, a.cloud);
  const int k = 8;
  SeparationCertificate cert;
  cert.annulus = Annulus::linear(0.0, std::pow(3.0, -k), 2.0 * std::pow(3.0, -k));
  cert.ratio_log10 = cert.annulus.log10_ratio();
  PullbackOptions opt;
  opt.mode = PullbackMode::fixed_depth;
  opt.steps = k - 1;
  const auto p = pullback_annulus(e.system, Word{{0}}, cert, L, a.cloud, opt);
  o.need(near(p.expanded.r_inner, 1.0 / 3.0, 1e-9) && near(p.expanded.r_outer, 2.0 / 3.0, 1e-9), "expanded radii");
  o.need(std::abs(p.expanded_center) <= 1e-9, "expanded centre");
  o.need(p.ratio_ok, "R'/r' >= R/(9r)");
  o.need(p.separation_ok && verify_separation(a.cloud, p.expanded), "separation");
  o.detail << " expanded=(" << p.expanded.r_inner << ", " << p.expanded.r_outer << ") steps=" << p.m_star;
}

void ac8(Outcome& o) {
  const double cell = 1e-3;
  for (const char* id : {"cantor3", "ex41", "ex46-n5"}) {
    const auto e = build_entry(id);
    const auto det = iterate_attractor(e.system, cell);
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto ch = chaos_game(e.system, seed, 100000, 64, cell);
      const double h = hausdorff_distance(det.cloud, ch.cloud);
      o.need(h <= 2.0 * cell, std::string(id) + " seed " + std::to_string(seed));
      o.detail << " " << id << "/" << seed << "=" << h / cell;
    }
  }
}

void ac9(Outcome& o) {
  for (const char* id : {"cantor3", "ex41", "ex43", "ex44", "ex46-n5"}) {
    RunConfig c;
    c.gallery = id;
    c.analysis = AnalysisConfig{};
    c.chaos = ChaosConfig{};
    const auto a = run_pipeline(c);
    const auto b = run_pipeline(c);
    bool same = a.artifacts.size() == b.artifacts.size();
    for (std::size_t i = 0; same && i < a.artifacts.size(); ++i) same = a.artifacts[i] == b.artifacts[i];
    o.need(same, std::string(id) + " artifacts differ");
    o.detail << " " << id << ":" << a.artifacts.size() << " files";
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"AC1 finite attractors", ac1},       {"AC2 ex44 gaps", ac2},         {"AC3 ex43 annuli", ac3},
      {"AC4 uniformly perfect", ac4},       {"AC5 hypothesis ledger", ac5}, {"AC6 univalent lemmas", ac6},
      {"AC7 pullback", ac7},                {"AC8 chaos vs deterministic", ac8},
      {"AC9 determinism", ac9},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.2fs)%s\n", o.ok ? "PASS" : "FAIL", name, secs, o.detail.str().c_str());
    std::fflush(stdout);
    failed += !o.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
