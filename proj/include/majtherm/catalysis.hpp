#pragma once

#include <optional>
#include <string>
#include <vector>

#include "majtherm/divergence.hpp"
#include "majtherm/majorization.hpp"
#include "majtherm/prob.hpp"

namespace majtherm {

struct CatalysisVerdict {
  bool satisfied = true;
  std::optional<double> failing_alpha;  // present iff !satisfied; +-inf marks a limit check
  std::vector<double> alpha_grid;
  std::string caveat;
};

// Default alpha grid: log-spaced magnitudes in [1e-3, 20] on both signs, plus
// the special points 0 and 1. A finite grid yields necessary-only evidence;
// the infinite endpoints are handled separately by exact limit comparisons.
inline std::vector<double> default_alpha_grid(int per_sign = 80) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(2 * per_sign + 2));
  for (int k = 0; k < per_sign; ++k) {
    double mag = 1e-3 * std::pow(20.0 / 1e-3, static_cast<double>(k) / (per_sign - 1));
    grid.push_back(-mag);
    grid.push_back(mag);
  }
  grid.push_back(0.0);
  grid.push_back(1.0);
  std::sort(grid.begin(), grid.end());
  return grid;
}

inline constexpr const char* kGridCaveat =
    "finite alpha grid: satisfied verdicts are necessary-only evidence";

// Direct catalyst check: p (x) r majorizes p_target (x) r.
inline bool verify_catalyst(const ProbVec& p, const ProbVec& p_target, const ProbVec& r) {
  return majorizes(tensor(p, r), tensor(p_target, r));
}

namespace detail {

// The additive family behind exact trumping: strictly decreasing along the
// catalytic order in every alpha.
inline double f_alpha(const ProbVec& p, double alpha) {
  if (alpha == 1.0) return -shannon_entropy(p);
  if (alpha == 0.0) {
    double s = 0.0;
    for (int i = 0; i < p.dim(); ++i) s -= std::log(p[i]);
    return s;
  }
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(p.dim()));
  for (int i = 0; i < p.dim(); ++i) terms.push_back(alpha * std::log(p[i]));
  double lse = log_sum_exp(terms);
  if (alpha > 1.0) return lse;
  if (alpha > 0.0) return -lse;
  return lse;  // alpha < 0
}

struct ExtremeEntry {
  double value;
  int multiplicity;
};

inline ExtremeEntry max_entry(const ProbVec& p) {
  double m = 0.0;
  for (int i = 0; i < p.dim(); ++i) m = std::max(m, p[i]);
  int cnt = 0;
  for (int i = 0; i < p.dim(); ++i)
    if (p[i] >= m * (1.0 - 1e-13)) ++cnt;
  return {m, cnt};
}

inline ExtremeEntry min_entry(const ProbVec& p) {
  double m = kInf;
  for (int i = 0; i < p.dim(); ++i) m = std::min(m, p[i]);
  int cnt = 0;
  for (int i = 0; i < p.dim(); ++i)
    if (p[i] <= m * (1.0 + 1e-13)) ++cnt;
  return {m, cnt};
}

inline bool sorted_equal(const ProbVec& a, const ProbVec& b, double tol = 1e-12) {
  if (a.dim() != b.dim()) return false;
  auto sa = rearrange_decreasing(a).sorted, sb = rearrange_decreasing(b).sorted;
  for (int i = 0; i < a.dim(); ++i)
    if (std::abs(sa[i] - sb[i]) > tol) return false;
  return true;
}

}  // namespace detail

// Exact trumping conditions: f_alpha(p_target) < f_alpha(p) strictly, over the
// grid and in both infinite-alpha limits.
inline CatalysisVerdict trump_exact_conditions(const ProbVec& p, const ProbVec& p_target,
                                               std::vector<double> alpha_grid = {}) {
  if (!p.full_support() || !p_target.full_support())
    throw ValidationError("trump_exact_conditions: inputs must have full rank");
  if (detail::sorted_equal(p, p_target))
    throw ValidationError("trump_exact_conditions: sorted inputs coincide");
  if (alpha_grid.empty()) alpha_grid = default_alpha_grid();

  CatalysisVerdict v;
  v.alpha_grid = alpha_grid;
  v.caveat = kGridCaveat;
  const double margin = 1e-12;
  for (double al : alpha_grid) {
    if (!(detail::f_alpha(p_target, al) <= detail::f_alpha(p, al) - margin)) {
      v.satisfied = false;
      v.failing_alpha = al;
      return v;
    }
  }
  // alpha -> +inf: f ~ alpha ln p_max + ln(multiplicity)
  auto hi = detail::max_entry(p), hi_t = detail::max_entry(p_target);
  bool plus_ok = hi_t.value < hi.value * (1.0 - 1e-13) ||
                 (std::abs(hi_t.value - hi.value) <= hi.value * 1e-13 &&
                  hi_t.multiplicity < hi.multiplicity);
  if (!plus_ok) {
    v.satisfied = false;
    v.failing_alpha = kInf;
    return v;
  }
  // alpha -> -inf: f ~ alpha ln p_min + ln(multiplicity); alpha < 0 flips the order
  auto lo = detail::min_entry(p), lo_t = detail::min_entry(p_target);
  bool minus_ok = lo_t.value > lo.value * (1.0 + 1e-13) ||
                  (std::abs(lo_t.value - lo.value) <= lo.value * 1e-13 &&
                   lo_t.multiplicity < lo.multiplicity);
  if (!minus_ok) {
    v.satisfied = false;
    v.failing_alpha = -kInf;
  }
  return v;
}

// Approximate trumping (vanishing-error regime): non-strict Renyi-entropy
// monotonicity S_alpha(p) <= S_alpha(p_target) over the extended grid.
inline CatalysisVerdict trump_approx_conditions(const ProbVec& p, const ProbVec& p_target,
                                                std::vector<double> alpha_grid = {}) {
  if (alpha_grid.empty()) alpha_grid = default_alpha_grid();
  CatalysisVerdict v;
  v.alpha_grid = alpha_grid;
  v.caveat = kGridCaveat;
  auto check = [&](double al) {
    if (renyi_entropy(p, al) > renyi_entropy(p_target, al) + kDecisionTol) {
      v.satisfied = false;
      v.failing_alpha = al;
      return false;
    }
    return true;
  };
  for (double al : alpha_grid)
    if (!check(al)) return v;
  check(kInf) && check(-kInf);
  return v;
}

// Catalytic d-majorization conditions: S_alpha(p||q) >= S_alpha(p'||q') over
// the extended grid.
inline CatalysisVerdict d_trump_conditions(const ProbVec& p, const ProbVec& q,
                                           const ProbVec& p_target, const ProbVec& q_target,
                                           std::vector<double> alpha_grid = {}) {
  if (!q.full_support() || !q_target.full_support())
    throw ValidationError("d_trump_conditions: references must have full rank");
  if (alpha_grid.empty()) alpha_grid = default_alpha_grid();
  CatalysisVerdict v;
  v.alpha_grid = alpha_grid;
  v.caveat = kGridCaveat;
  auto check = [&](double al) {
    double lhs = renyi_divergence(p, q, al);
    double rhs = renyi_divergence(p_target, q_target, al);
    if (rhs > lhs + kDecisionTol && !(std::isinf(rhs) && std::isinf(lhs))) {
      v.satisfied = false;
      v.failing_alpha = al;
      return false;
    }
    return true;
  };
  for (double al : alpha_grid)
    if (!check(al)) return v;
  check(kInf) && check(-kInf);
  return v;
}

// Correlated-catalytic conversion: exactly two conditions,
// S_0(p) <= S_0(p_target) and S_1(p) < S_1(p_target).
inline CatalysisVerdict correlated_catalysis_conditions(const ProbVec& p,
                                                        const ProbVec& p_target) {
  if (detail::sorted_equal(p, p_target))
    throw ValidationError("correlated_catalysis_conditions: sorted inputs coincide");
  CatalysisVerdict v;
  v.alpha_grid = {0.0, 1.0};
  v.caveat = "checks S_0 (non-strict) and S_1 (strict) only";
  if (renyi_entropy(p, 0.0) > renyi_entropy(p_target, 0.0) + kDecisionTol) {
    v.satisfied = false;
    v.failing_alpha = 0.0;
    return v;
  }
  if (!(shannon_entropy(p) < shannon_entropy(p_target) - 1e-12)) {
    v.satisfied = false;
    v.failing_alpha = 1.0;
  }
  return v;
}

}  // namespace majtherm
