#pragma once

// Numerical verifiers for the Koebe-type estimates used by the pullback
// construction: injectivity radius from a derivative floor, 2R-coverage,
// the 100/(81 eta) Lipschitz bound and the R/(9r) annulus distortion bound.
// The verifiers work with any map type exposing `Evaluation evaluate(CPoint)`.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aforge/error.hpp"
#include "aforge/geometry.hpp"
#include "aforge/maps.hpp"
#include "aforge/rng.hpp"

namespace aforge {

template <class F>
concept HolomorphicMap = requires(const F& f, CPoint z) {
  { f.evaluate(z) } -> std::convertible_to<Evaluation>;
};

/// Largest radius on which every analytic f : Disk(a, r) -> Disk(0, M) with
/// |f'(a)| >= eta is one-to-one, from M rho (2r - rho) / (r (r - rho)^2) < eta.
/// Returns (1 - slack) times the root of the equality, found by bisection;
/// the bracket is capped at r (1 - 1e-9).
inline double injectivity_radius(double M, double r, double eta, double slack = 0.05) {
  if (!(M > 0.0) || !(r > 0.0) || !(eta >= 0.0) || !std::isfinite(M) || !std::isfinite(r)) {
    throw PreconditionError("gftlab", "injectivity_radius", "need M > 0, r > 0, eta >= 0");
  }
  if (eta == 0.0) return 0.0;
  auto lhs = [&](double rho) { return M * rho * (2.0 * r - rho) / (r * (r - rho) * (r - rho)); };
  const double cap = r * (1.0 - 1e-9);
  double root = cap;
  if (lhs(cap) > eta) {
    double lo = 0.0, hi = cap;
    for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (lhs(mid) < eta ? lo : hi) = mid;
    }
    root = lo;
  }
  return (1.0 - slack) * root;
}

/// z -> (a z + b) / (c z + d), ad - bc != 0.
class MobiusMap {
 public:
  MobiusMap(CPoint a, CPoint b, CPoint c, CPoint d) : a_(a), b_(b), c_(c), d_(d) {
    if (std::abs(a * d - b * c) < 1e-300) throw ConfigError("gftlab", "MobiusMap", "degenerate Mobius map");
  }

  /// alpha * phi(e^{i theta} z) + beta with phi(z) = (z - p) / (1 - conj(p) z).
  static MobiusMap disk_automorphism_affine(CPoint p, double theta, CPoint alpha, CPoint beta) {
    const CPoint rot = std::polar(1.0, theta);
    return MobiusMap(alpha * rot - beta * std::conj(p) * rot, beta - alpha * p, -std::conj(p) * rot, 1.0);
  }

  Evaluation evaluate(CPoint z) const {
    const CPoint den = c_ * z + d_;
    return {(a_ * z + b_) / den, (a_ * d_ - b_ * c_) / (den * den)};
  }

  std::optional<CPoint> pole() const {
    if (c_ == CPoint{}) return std::nullopt;
    return -d_ / c_;
  }

 private:
  CPoint a_, b_, c_, d_;
};

template <HolomorphicMap F>
struct UnivalentSample {
  F map;
  Disk disk;
  bool injectivity_certified = false;
  std::string certification;
};

/// Report of one lemma check on one sample.
struct LemmaReport {
  std::string lemma;
  bool passed = true;
  double worst = 0.0;  // lemma-specific figure of merit, see each verifier
  std::size_t checks = 0;
  std::string detail;
};

namespace detail {

template <HolomorphicMap F>
struct Normalized {
  const F* f;
  CPoint center;
  CPoint base;
  Evaluation evaluate(CPoint w) const {
    const Evaluation e = f->evaluate(center + w);
    return {e.value - base, e.derivative};
  }
};

template <HolomorphicMap F>
Normalized<F> normalize(const F& f, CPoint center) {
  return {&f, center, f.evaluate(center).value};
}

template <HolomorphicMap F>
std::optional<CPoint> newton_preimage(const F& f, CPoint target, CPoint seed, double tol, int budget = 80) {
  CPoint z = seed;
  for (int k = 0; k < budget; ++k) {
    const Evaluation e = f.evaluate(z);
    const CPoint r = e.value - target;
    if (std::abs(r) <= tol) return z;
    if (std::abs(e.derivative) < 1e-300) return std::nullopt;
    z -= r / e.derivative;
    if (!is_finite(z)) return std::nullopt;
  }
  return std::nullopt;
}

inline std::vector<CPoint> polar_grid(const Disk& d, std::size_t radial, std::size_t angular) {
  std::vector<CPoint> pts;
  pts.reserve(radial * angular + 1);
  pts.push_back(d.center);
  for (std::size_t i = 1; i <= radial; ++i) {
    const double rad = d.radius * (static_cast<double>(i) - 0.5) / static_cast<double>(radial);
    for (std::size_t j = 0; j < angular; ++j) {
      const double th = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5 * static_cast<double>(i % 2)) /
                        static_cast<double>(angular);
      pts.push_back(d.center + std::polar(rad, th));
    }
  }
  return pts;
}

}  // namespace detail

/// Minimum image separation on a 64 x 64 polar grid, relative to the image
/// spread. Zero (or rounding-level) separation means a detected collision.
template <HolomorphicMap F>
double grid_separation(const F& f, const Disk& d) {
  const auto grid = detail::polar_grid(d, 64, 64);
  std::vector<CPoint> img;
  img.reserve(grid.size());
  for (const CPoint& z : grid) img.push_back(f.evaluate(z).value);
  double spread = 0.0;
  for (const CPoint& w : img) spread = std::max(spread, std::abs(w - img.front()));
  const KdTree tree(img);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < img.size(); ++i) best = std::min(best, tree.nearest_excluding(img[i], i).first);
  return spread > 0.0 ? std::sqrt(best) / spread : 0.0;
}

inline constexpr double kCollisionThreshold = 1e-10;

/// Sufficient analytic criteria for univalence on the sample disk.
inline std::optional<std::string> analytic_univalence_criterion(const AnalyticMap& p, const Disk& d) {
  const AnalyticMap q = p.shifted(d.center);
  const auto b = q.coefficients();
  const double b1 = std::abs(b[1]);
  // sum_{k>=2} k |b_k| rho^{k-1} < |b_1| gives Re(q'/b_1) > 0 on the disk.
  double tail = 0.0;
  for (std::size_t k = 2; k < b.size(); ++k) tail += static_cast<double>(k) * std::abs(b[k]) * std::pow(d.radius, k - 1);
  if (tail < b1) return std::string("positive-real-part derivative bound");
  for (double factor : {1.5, 2.0, 3.0, 4.0}) {
    const double r = factor * d.radius;
    double M = 0.0;
    for (std::size_t k = 1; k < b.size(); ++k) M += std::abs(b[k]) * std::pow(r, k);
    if (b1 > 0.0 && injectivity_radius(M, r, b1) >= d.radius) return std::string("injectivity-radius criterion");
  }
  return std::nullopt;
}

inline std::optional<std::string> analytic_univalence_criterion(const MobiusMap& m, const Disk& d) {
  const auto pole = m.pole();
  if (!pole || std::abs(*pole - d.center) > d.radius) return std::string("Mobius map, pole outside closed disk");
  return std::nullopt;
}

/// Marks the sample certified when the grid shows no collision and an
/// analytic univalence criterion applies.
template <HolomorphicMap F>
UnivalentSample<F>& certify(UnivalentSample<F>& s) {
  s.injectivity_certified = false;
  const double sep = grid_separation(s.map, s.disk);
  if (!(sep > kCollisionThreshold)) {
    s.certification = "grid collision";
    return s;
  }
  if (auto why = analytic_univalence_criterion(s.map, s.disk)) {
    s.injectivity_certified = true;
    s.certification = *why;
  } else {
    s.certification = "no analytic criterion applies";
  }
  return s;
}

template <HolomorphicMap F>
void require_certified(const UnivalentSample<F>& s, const char* op) {
  if (!s.injectivity_certified) throw PreconditionError("gftlab", op, "sample is not certified univalent");
}

/// g(Disk(c, delta)) contains Disk(g(c), 2R) where R = |g(w) - g(c)| for a
/// witness with |w - c| <= delta/10. Checks 64 rays x 8 radii of targets.
/// `worst` is the largest uncovered target modulus over R (0 when covered).
template <HolomorphicMap F>
LemmaReport verify_koebe_coverage(const UnivalentSample<F>& s, CPoint z_witness, std::size_t trials = 64) {
  require_certified(s, "verify_koebe_coverage");
  const double delta = s.disk.radius;
  if (std::abs(z_witness - s.disk.center) > delta / 10.0 * (1.0 + 1e-12)) {
    throw PreconditionError("gftlab", "verify_koebe_coverage", "witness must satisfy |z - c| <= delta/10");
  }
  const auto g = detail::normalize(s.map, s.disk.center);
  const double R = std::abs(g.evaluate(z_witness - s.disk.center).value);
  LemmaReport rep{"koebe_coverage", true, 0.0, 0, {}};
  if (R == 0.0) {
    rep.detail = "witness image coincides with centre; nothing to cover";
    return rep;
  }
  const double tol = 1e-11 * R;
  constexpr std::size_t kRays = 64, kRadii = 8, kSub = 4;
  const auto seeds = detail::polar_grid(Disk({}, delta * (1.0 - 1e-9)), 8, std::max<std::size_t>(trials / 8, 1));
  for (std::size_t j = 0; j < kRays; ++j) {
    const CPoint dir = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / kRays);
    CPoint w{};
    bool tracking = true;
    for (std::size_t k = 1; k <= kRadii; ++k) {
      const double rad = 2.0 * R * static_cast<double>(k) / kRadii * (k == kRadii ? 1.0 - 1e-9 : 1.0);
      const CPoint t = rad * dir;
      std::optional<CPoint> pre;
      if (tracking) {
        CPoint cur = w;
        const double prev = 2.0 * R * static_cast<double>(k - 1) / kRadii;
        for (std::size_t sub = 1; sub <= kSub && tracking; ++sub) {
          const CPoint tt = (prev + (rad - prev) * static_cast<double>(sub) / kSub) * dir;
          auto z = detail::newton_preimage(g, tt, cur, tol);
          if (z && std::abs(*z) < delta) cur = *z;
          else tracking = false;
        }
        if (tracking) pre = cur;
      }
      if (!pre) {
        for (const CPoint& seed : seeds) {
          auto z = detail::newton_preimage(g, t, seed, tol);
          if (z && std::abs(*z) < delta) {
            pre = z;
            break;
          }
        }
      }
      ++rep.checks;
      if (pre) {
        w = *pre;
      } else {
        rep.passed = false;
        rep.worst = std::max(rep.worst, rad / R);
        tracking = false;
      }
    }
  }
  rep.detail = "R=" + format_real(R);
  return rep;
}

/// |g(z) - g(a)| <= 100 |z - a| / (81 eta) for |z - a| <= delta/10 when
/// |g'(a)| <= 1/eta. `worst` is the largest observed
/// |g(z) - g(a)| 81 eta / (100 |z - a|); the bound holds iff worst <= 1.
template <HolomorphicMap F>
LemmaReport verify_lipschitz_bound(const UnivalentSample<F>& s, CPoint a, double eta, std::size_t trials = 256,
                                   std::uint64_t seed = 7) {
  require_certified(s, "verify_lipschitz_bound");
  if (std::abs(a - s.disk.center) > 1e-12 * std::max(1.0, std::abs(a))) {
    throw PreconditionError("gftlab", "verify_lipschitz_bound", "sample disk must be centred at a");
  }
  const Evaluation ea = s.map.evaluate(a);
  if (!(eta > 0.0) || std::abs(ea.derivative) > (1.0 / eta) * (1.0 + 1e-12)) {
    throw PreconditionError("gftlab", "verify_lipschitz_bound", "need |g'(a)| <= 1/eta");
  }
  const double rad = s.disk.radius / 10.0;
  LemmaReport rep{"lipschitz_bound", true, 0.0, 0, {}};
  auto check = [&](CPoint z) {
    const double dz = std::abs(z - a);
    if (dz == 0.0) return;
    const double q = std::abs(s.map.evaluate(z).value - ea.value) * 81.0 * eta / (100.0 * dz);
    rep.worst = std::max(rep.worst, q);
    ++rep.checks;
  };
  for (std::size_t j = 0; j < 64; ++j) check(a + std::polar(rad, 2.0 * std::numbers::pi * static_cast<double>(j) / 64.0));
  Xorshift64Star rng(seed);
  for (std::size_t k = 0; k < trials; ++k) {
    const double u = std::sqrt(rng.uniform());
    const double th = 2.0 * std::numbers::pi * rng.uniform();
    check(a + std::polar(rad * u, th));
  }
  rep.passed = rep.worst <= 1.0;
  return rep;
}

/// g(Ann(0; r, R)) contains Ann(0; r', R') with R'/r' >= R/(9r), for g
/// univalent on Disk(0, 2R) with g(0) = 0 (applied after normalizing at the
/// disk centre). Also checks the two distortion intermediates
///   r' <= r |g'(0)| / (1 - r/(2R))^2,   R' >= R |g'(0)| / (3/2)^2.
/// `worst` is (R'/r') / (R/(9r)); the main bound holds iff worst >= 1.
template <HolomorphicMap F>
LemmaReport verify_annulus_distortion(const UnivalentSample<F>& s, double r, double R) {
  require_certified(s, "verify_annulus_distortion");
  if (!(r > 0.0) || !(R > 9.0 * r)) throw PreconditionError("gftlab", "verify_annulus_distortion", "need R > 9r > 0");
  if (s.disk.radius < 2.0 * R * (1.0 - 1e-12)) {
    throw PreconditionError("gftlab", "verify_annulus_distortion", "sample must be univalent on Disk(c, 2R)");
  }
  const auto g = detail::normalize(s.map, s.disk.center);
  const double d0 = std::abs(g.evaluate(CPoint{}).derivative);
  double r_prime = 0.0;
  double R_prime = std::numeric_limits<double>::infinity();
  constexpr std::size_t kSamples = 512;
  for (std::size_t j = 0; j < kSamples; ++j) {
    const CPoint u = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / kSamples);
    r_prime = std::max(r_prime, std::abs(g.evaluate(r * u).value));
    R_prime = std::min(R_prime, std::abs(g.evaluate(R * u).value));
  }
  LemmaReport rep{"annulus_distortion", true, 0.0, 3 * kSamples, {}};
  const double ratio = R_prime / r_prime;
  rep.worst = ratio / (R / (9.0 * r));
  const double inner_bound = r * d0 / ((1.0 - r / (2.0 * R)) * (1.0 - r / (2.0 * R)));
  const double outer_bound = R * d0 / 2.25;
  const bool main_ok = ratio >= R / (9.0 * r);
  const bool inner_ok = r_prime <= inner_bound * (1.0 + 1e-9);
  const bool outer_ok = R_prime >= outer_bound * (1.0 - 1e-9);
  rep.passed = main_ok && inner_ok && outer_ok;
  rep.detail = "r'=" + format_real(r_prime) + " R'=" + format_real(R_prime) + (inner_ok ? "" : " inner-bound-violated") +
               (outer_ok ? "" : " outer-bound-violated");
  return rep;
}

// ---------------------------------------------------------------------------
// Certified corpus

using AnySample = std::variant<UnivalentSample<MobiusMap>, UnivalentSample<AnalyticMap>>;

/// Deterministic corpus: half disk automorphisms composed with affine maps,
/// half small-coefficient perturbations of the identity with
/// sum k |c_k| rho^{k-1} <= 0.7 on the sample disk.
inline std::vector<AnySample> univalent_corpus(std::size_t count = 200, std::uint64_t seed = 20240601) {
  Xorshift64Star rng(seed);
  auto cplx = [&](double rmax) { return std::polar(rmax * std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform()); };
  std::vector<AnySample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 2 == 0) {
      const CPoint p = cplx(0.7);
      const double theta = 2.0 * std::numbers::pi * rng.uniform();
      const CPoint alpha = std::polar(0.2 + 2.8 * rng.uniform(), 2.0 * std::numbers::pi * rng.uniform());
      const CPoint beta = cplx(1.0);
      const CPoint c0 = cplx(0.3);
      const double rad = (1.0 - std::abs(c0)) * (0.3 + 0.6 * rng.uniform());
      UnivalentSample<MobiusMap> s{MobiusMap::disk_automorphism_affine(p, theta, alpha, beta), Disk(c0, rad), false, {}};
      certify(s);
      out.emplace_back(std::move(s));
    } else {
      const double rho = 0.3 + 0.7 * rng.uniform();
      const std::size_t deg = 2 + rng.below(5);
      std::vector<double> w(deg + 1, 0.0);
      double wsum = 0.0;
      for (std::size_t k = 2; k <= deg; ++k) wsum += (w[k] = 0.05 + rng.uniform());
      const double budget = 0.7 * rng.uniform();
      std::vector<CPoint> q(deg + 1);
      q[1] = 1.0;
      for (std::size_t k = 2; k <= deg; ++k) {
        const double mag = budget * (w[k] / wsum) / (static_cast<double>(k) * std::pow(rho, k - 1));
        q[k] = std::polar(mag, 2.0 * std::numbers::pi * rng.uniform());
      }
      const CPoint alpha = std::polar(0.2 + 2.8 * rng.uniform(), 2.0 * std::numbers::pi * rng.uniform());
      const CPoint beta = cplx(1.0);
      const CPoint c0 = cplx(0.5);
      for (auto& c : q) c *= alpha;
      q[0] += beta;
      // q was written in w = z - c0; shift back to z.
      AnalyticMap in_w(q, "perturbed identity");
      UnivalentSample<AnalyticMap> s{in_w.shifted(-c0), Disk(c0, rho), false, {}};
      certify(s);
      out.emplace_back(std::move(s));
    }
  }
  return out;
}

struct CorpusResult {
  std::size_t index = 0;
  std::string kind;
  bool certified = false;
  LemmaReport coverage, lipschitz, distortion, injectivity;

  bool passed() const {
    return certified && coverage.passed && lipschitz.passed && distortion.passed && injectivity.passed;
  }
};

/// Upper bound of |g - g(c)| on the sample disk.
inline double modulus_bound(const UnivalentSample<AnalyticMap>& s) {
  const auto b = s.map.shifted(s.disk.center).coefficients();
  double M = 0.0;
  for (std::size_t k = 1; k < b.size(); ++k) M += std::abs(b[k]) * std::pow(s.disk.radius, k);
  return M;
}

inline double modulus_bound(const UnivalentSample<MobiusMap>& s) {
  // Sampled boundary maximum with a 1% margin; |g - g(c)| is subharmonic so
  // the maximum sits on the circle.
  const CPoint base = s.map.evaluate(s.disk.center).value;
  double M = 0.0;
  for (std::size_t j = 0; j < 4096; ++j) {
    const CPoint z = s.disk.center + std::polar(s.disk.radius, 2.0 * std::numbers::pi * static_cast<double>(j) / 4096.0);
    M = std::max(M, std::abs(s.map.evaluate(z).value - base));
  }
  return 1.01 * M;
}

/// Runs all verifiers on one sample with deterministic parameters drawn from
/// `rng`.
template <HolomorphicMap F>
CorpusResult verify_sample(const UnivalentSample<F>& s, std::size_t index, Xorshift64Star& rng) {
  CorpusResult res;
  res.index = index;
  res.kind = std::is_same_v<F, MobiusMap> ? "mobius-affine" : "polynomial";
  res.certified = s.injectivity_certified;
  if (!res.certified) return res;
  const CPoint c = s.disk.center;
  const double delta = s.disk.radius;

  const CPoint witness = c + std::polar(delta / 10.0 * (0.2 + 0.8 * rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
  res.coverage = verify_koebe_coverage(s, witness);

  const double eta = (0.5 + 0.5 * rng.uniform()) / std::abs(s.map.evaluate(c).derivative);
  res.lipschitz = verify_lipschitz_bound(s, c, eta, 256, rng.next());

  const double R = 0.5 * delta * (0.5 + 0.5 * rng.uniform());
  const double r = R / (9.5 + 100.0 * rng.uniform());
  res.distortion = verify_annulus_distortion(s, r, R);

  const double eta0 = std::abs(s.map.evaluate(c).derivative);
  const double rho = injectivity_radius(modulus_bound(s), delta, eta0);
  res.injectivity.lemma = "injectivity_radius";
  res.injectivity.checks = 1;
  if (rho > 0.0) {
    const double sep = grid_separation(s.map, Disk(c, rho));
    res.injectivity.worst = sep;
    res.injectivity.passed = sep > kCollisionThreshold;
    res.injectivity.detail = "rho=" + format_real(rho);
  } else {
    res.injectivity.passed = false;
    res.injectivity.detail = "rho=0";
  }
  return res;
}

inline std::vector<CorpusResult> verify_corpus(const std::vector<AnySample>& corpus, std::uint64_t seed = 99) {
  Xorshift64Star rng(seed);
  std::vector<CorpusResult> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::visit([&](const auto& s) { out.push_back(verify_sample(s, i, rng)); }, corpus[i]);
  }
  return out;
}

}  // namespace aforge
