#pragma once

// Polynomial generator maps, words (finite compositions), fixed points of
// words and inverse branches by Newton continuation.
//
// Composition convention: the word (i1, i2, ..., ik) denotes
//     g_{i1} o g_{i2} o ... o g_{ik},
// so the rightmost index is applied first.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aforge/error.hpp"
#include "aforge/geometry.hpp"

namespace aforge {

struct Evaluation {
  CPoint value;
  CPoint derivative;
};

/// Complex polynomial c0 + c1 z + ... + cd z^d with d >= 1 and cd != 0.
class AnalyticMap {
 public:
  explicit AnalyticMap(std::vector<CPoint> coefficients, std::string label = {})
      : coefficients_(std::move(coefficients)), label_(std::move(label)) {
    if (coefficients_.size() < 2) {
      throw ConfigError("maps", "AnalyticMap", "generator must be non-constant (degree >= 1)");
    }
    for (const CPoint& c : coefficients_) {
      if (!is_finite(c)) throw ConfigError("maps", "AnalyticMap", "non-finite coefficient");
    }
    if (coefficients_.back() == CPoint{}) {
      throw ConfigError("maps", "AnalyticMap", "leading coefficient must be nonzero");
    }
  }

  static AnalyticMap affine(CPoint slope, CPoint offset, std::string label = {}) {
    return AnalyticMap({offset, slope}, std::move(label));
  }

  static AnalyticMap monomial(CPoint coefficient, std::size_t degree, std::string label = {}) {
    std::vector<CPoint> c(degree + 1);
    c[degree] = coefficient;
    return AnalyticMap(std::move(c), std::move(label));
  }

  /// Horner evaluation of p and p'.
  Evaluation evaluate(CPoint z) const {
    CPoint p = coefficients_.back();
    CPoint dp{};
    for (std::size_t k = coefficients_.size() - 1; k-- > 0;) {
      dp = dp * z + p;
      p = p * z + coefficients_[k];
    }
    return {p, dp};
  }

  CPoint operator()(CPoint z) const { return evaluate(z).value; }

  std::size_t degree() const { return coefficients_.size() - 1; }
  std::span<const CPoint> coefficients() const { return coefficients_; }
  const std::string& label() const { return label_; }

  /// a z^k with no other terms.
  bool is_monomial() const {
    for (std::size_t k = 0; k + 1 < coefficients_.size(); ++k) {
      if (coefficients_[k] != CPoint{}) return false;
    }
    return true;
  }

  /// sum |c_k| |z|^k, the scale of Horner rounding error at z.
  double magnitude_sum(CPoint z) const {
    const double r = std::abs(z);
    double s = 0.0;
    for (std::size_t k = coefficients_.size(); k-- > 0;) s = s * r + std::abs(coefficients_[k]);
    return s;
  }

  /// Coefficients of w -> p(center + w).
  AnalyticMap shifted(CPoint center) const {
    std::vector<CPoint> c = coefficients_;
    const std::size_t n = c.size();
    // repeated synthetic division (Taylor shift)
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = n - 1; k-- > i;) c[k] += center * c[k + 1];
    }
    return AnalyticMap(std::move(c), label_);
  }

 private:
  std::vector<CPoint> coefficients_;
  std::string label_;
};

inline Evaluation evaluate(const AnalyticMap& m, CPoint z) { return m.evaluate(z); }

struct Word {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  bool operator==(const Word&) const = default;
};

inline void check_word(const Word& w, std::size_t generator_count, const char* op) {
  if (w.indices.empty()) throw ConfigError("maps", op, "word must have at least one letter");
  for (std::size_t i : w.indices) {
    if (i >= generator_count) {
      throw ConfigError("maps", op,
                        "generator index " + std::to_string(i) + " out of range (system has " +
                            std::to_string(generator_count) + ")");
    }
  }
}

/// Value and derivative of g_{i1} o ... o g_{ik} at z (chain rule).
inline Evaluation evaluate_word(std::span<const AnalyticMap> generators, const Word& w, CPoint z) {
  check_word(w, generators.size(), "evaluate_word");
  CPoint d{1.0, 0.0};
  for (std::size_t j = w.indices.size(); j-- > 0;) {
    const Evaluation e = generators[w.indices[j]].evaluate(z);
    d *= e.derivative;
    z = e.value;
  }
  return {z, d};
}

struct FixedPointOptions {
  double tol = 1e-13;
  double banach_residual = 1e-8;
  std::size_t banach_budget = 100000;
  std::size_t newton_budget = 60;
};

/// Attracting fixed point of a word: Banach iteration from `start`, then
/// Newton polish on F(z) - z.
inline CPoint fixed_point(std::span<const AnalyticMap> generators, const Word& w, CPoint start,
                          const FixedPointOptions& opt = {}) {
  check_word(w, generators.size(), "fixed_point");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  CPoint z = start;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (; it < opt.banach_budget; ++it) {
    const CPoint next = evaluate_word(generators, w, z).value;
    if (!is_finite(next)) {
      throw DivergenceError("maps", "fixed_point", "iteration escaped to infinity");
    }
    residual = std::abs(next - z);
    z = next;
    if (residual < opt.banach_residual) break;
  }
  if (!(residual < opt.banach_residual)) {
    throw DivergenceError("maps", "fixed_point",
                          "Banach iteration did not settle within budget; word is not contracting");
  }
  // Newton on F(z) - z; the step is always taken so that a residual below
  // tolerance still snaps the point (e.g. a denormal onto an exact zero).
  for (std::size_t k = 0; k < opt.newton_budget; ++k) {
    const Evaluation e = evaluate_word(generators, w, z);
    const CPoint f = e.value - z;
    const double tol = std::max(opt.tol, 32.0 * eps * std::abs(z));
    const CPoint denom = e.derivative - 1.0;
    if (std::abs(denom) < 1e-300) break;
    const CPoint next = z - f / denom;
    if (!is_finite(next)) break;
    const double step = std::abs(next - z);
    z = next;
    if (std::abs(f) <= tol && step <= tol) return z;
  }
  const double final_residual = std::abs(evaluate_word(generators, w, z).value - z);
  if (final_residual <= std::max(opt.tol, 32.0 * eps * std::abs(z))) return z;
  throw DivergenceError("maps", "fixed_point",
                        "Newton polish failed to reach tolerance (residual " +
                            format_real(final_residual) + ")");
}

// ---------------------------------------------------------------------------
// Inverse branches

/// A path in the image plane starting near m(start). The branch of m^{-1}
/// that sends m(start) to `start` is continued along `samples`.
struct BranchPath {
  CPoint start{};
  std::vector<CPoint> samples;
  double step_bound = std::numeric_limits<double>::infinity();
};

struct BranchOptions {
  double tol = 1e-13;
  double branch_threshold = 1e-12;
  std::size_t newton_budget = 64;
};

namespace detail {

/// One Newton continuation step: preimage of `target` near `seed`, where
/// m(seed) ~ `from`.
inline CPoint continuation_step(const AnalyticMap& m, CPoint seed, CPoint from, CPoint target,
                                const BranchOptions& opt) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const Evaluation e0 = m.evaluate(seed);
  if (std::abs(e0.derivative) < opt.branch_threshold) {
    throw BranchPointError("maps", "inverse_branch",
                           "derivative below threshold at continuation point " + format_real(seed.real()) +
                               (seed.imag() < 0 ? "" : "+") + format_real(seed.imag()) + "i");
  }
  CPoint z = seed;
  for (std::size_t k = 0; k < opt.newton_budget; ++k) {
    const Evaluation e = m.evaluate(z);
    if (std::abs(e.derivative) < opt.branch_threshold) {
      throw BranchPointError("maps", "inverse_branch", "derivative below threshold during Newton solve");
    }
    const CPoint r = e.value - target;
    const double tol = std::max(opt.tol, 8.0 * eps * m.magnitude_sum(z));
    if (std::abs(r) <= tol) {
      // Reject jumps onto a different sheet.
      const double allowed = 4.0 * std::abs(target - from) / std::abs(e0.derivative) + 8.0 * eps * std::abs(z) +
                             4.0 * opt.tol / std::abs(e0.derivative);
      if (std::abs(z - seed) > allowed) {
        throw ContinuationStepError("maps", "inverse_branch", "Newton jumped to another branch; refine the path");
      }
      return z;
    }
    z -= r / e.derivative;
    if (!is_finite(z)) break;
  }
  throw ContinuationStepError("maps", "inverse_branch", "Newton did not converge; refine the path");
}

}  // namespace detail

/// Preimages of every path sample along the continued branch.
inline std::vector<CPoint> continue_branch(const AnalyticMap& m, const BranchPath& path,
                                           const BranchOptions& opt = {}) {
  if (path.samples.empty()) throw PreconditionError("maps", "inverse_branch", "path has no samples");
  CPoint prev_value = m.evaluate(path.start).value;
  CPoint z = path.start;
  std::vector<CPoint> out;
  out.reserve(path.samples.size());
  for (const CPoint& t : path.samples) {
    if (!(std::abs(t - prev_value) < path.step_bound)) {
      throw PreconditionError("maps", "inverse_branch", "path sample spacing exceeds the step bound");
    }
    z = detail::continuation_step(m, z, prev_value, t, opt);
    prev_value = t;
    out.push_back(z);
  }
  return out;
}

/// h(target) for the branch h of m^{-1} with h(m(start)) = start.
inline CPoint inverse_branch(const AnalyticMap& m, const BranchPath& path, double tol = 1e-13) {
  BranchOptions opt;
  opt.tol = tol;
  return continue_branch(m, path, opt).back();
}

/// Straight path from m(start) to `target` with spacing below `step_bound`.
inline BranchPath straight_branch_path(const AnalyticMap& m, CPoint start, CPoint target, double step_bound) {
  if (!(step_bound > 0.0)) throw PreconditionError("maps", "inverse_branch", "step bound must be positive");
  const CPoint from = m.evaluate(start).value;
  const double len = std::abs(target - from);
  const auto steps = static_cast<std::size_t>(std::ceil(len / (0.5 * step_bound))) + 1;
  BranchPath path{start, {}, step_bound};
  path.samples.reserve(steps);
  for (std::size_t k = 1; k <= steps; ++k) {
    path.samples.push_back(from + (target - from) * (static_cast<double>(k) / static_cast<double>(steps)));
  }
  return path;
}

/// Continues the branch from (`from_value`, `seed`) to `target` along a
/// straight segment, bisecting any step that fails to converge.
inline CPoint continue_with_refinement(const AnalyticMap& m, CPoint seed, CPoint from_value, CPoint target,
                                       const BranchOptions& opt = {}, int max_depth = 30) {
  try {
    return detail::continuation_step(m, seed, from_value, target, opt);
  } catch (const ContinuationStepError&) {
    if (max_depth <= 0) throw;
  }
  const CPoint mid = 0.5 * (from_value + target);
  const CPoint half = continue_with_refinement(m, seed, from_value, mid, opt, max_depth - 1);
  return continue_with_refinement(m, half, mid, target, opt, max_depth - 1);
}

}  // namespace aforge
