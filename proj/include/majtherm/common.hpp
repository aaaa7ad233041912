#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace majtherm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerances shared across decision procedures.
inline constexpr double kNormTol = 1e-12;      // probability normalization
inline constexpr double kColSumTol = 1e-10;    // stochastic column sums
inline constexpr double kDecisionTol = 1e-10;  // <= comparisons in majorization tests
inline constexpr double kWitnessTol = 1e-8;    // residuals of constructed witnesses

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// x ln(x/y) with the 0 ln 0 := 0 convention; returns +inf when x > 0, y = 0.
inline double xlog_ratio(double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return kInf;
  return x * std::log(x / y);
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline double log_sum_exp(const std::vector<double>& a) {
  double m = -kInf;
  for (double v : a) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : a) s += std::exp(v - m);
  return m + std::log(s);
}

inline bool approx_eq(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace majtherm
