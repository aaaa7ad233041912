#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "majtherm/prob.hpp"

namespace majtherm {

// S_1(p) = -sum p_i ln p_i.
inline double shannon_entropy(const ProbVec& p) {
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) s -= xlogx(p[i]);
  return s;
}

// S_1(p||q) = sum p_i ln(p_i/q_i); +inf when supp(p) is not inside supp(q).
inline double kl_divergence(const ProbVec& p, const ProbVec& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("kl_divergence: dims differ");
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    double t = xlog_ratio(p[i], q[i]);
    if (!std::isfinite(t)) return kInf;
    s += t;
  }
  return std::max(s, 0.0);
}

inline bool support_contained(const ProbVec& p, const ProbVec& q) {
  for (int i = 0; i < p.dim(); ++i)
    if (p[i] > 0.0 && q[i] <= 0.0) return false;
  return true;
}

// Renyi divergence S_alpha(p||q) for extended alpha, including negative alpha
// via the sgn(alpha)/(alpha-1) convention. alpha = 1 is the KL divergence,
// alpha = 0 is -ln q[supp p], alpha = +inf is ln max_i p_i/q_i.
inline double renyi_divergence(const ProbVec& p, const ProbVec& q, double alpha) {
  if (p.dim() != q.dim()) throw DimensionMismatch("renyi_divergence: dims differ");
  if (alpha == 0.0) {
    double mass = 0.0;
    for (int i = 0; i < p.dim(); ++i)
      if (p[i] > 0.0) mass += q[i];
    return mass > 0.0 ? std::max(-std::log(mass), 0.0) : kInf;
  }
  if (alpha > 0.0 && !support_contained(p, q)) return kInf;
  if (alpha == 1.0) return kl_divergence(p, q);
  if (std::isinf(alpha) && alpha > 0.0) {
    double m = 0.0;
    for (int i = 0; i < p.dim(); ++i)
      if (p[i] > 0.0) m = std::max(m, p[i] / q[i]);
    return std::max(std::log(m), 0.0);
  }
  if (std::isinf(alpha)) {  // alpha = -inf: ln max_i q_i/p_i
    double m = 0.0;
    for (int i = 0; i < p.dim(); ++i) {
      if (q[i] <= 0.0) continue;
      if (p[i] <= 0.0) return kInf;
      m = std::max(m, q[i] / p[i]);
    }
    return std::log(m);
  }
  // log of sum_i p_i^alpha q_i^{1-alpha}
  std::vector<double> terms;
  for (int i = 0; i < p.dim(); ++i) {
    if (alpha < 0.0 && p[i] <= 0.0 && q[i] > 0.0) return kInf;  // p_i^alpha diverges
    if (p[i] <= 0.0 || q[i] <= 0.0) continue;
    terms.push_back(alpha * std::log(p[i]) + (1.0 - alpha) * std::log(q[i]));
  }
  if (terms.empty()) return kInf;
  const double sgn = alpha > 0.0 ? 1.0 : -1.0;
  double v = sgn / (alpha - 1.0) * log_sum_exp(terms);
  return alpha > 0.0 ? std::max(v, 0.0) : v;
}

// Renyi entropy S_alpha(p) = sgn(alpha)/(1-alpha) ln sum_i p_i^alpha,
// with S_1 = Shannon, S_0 = ln rank, S_inf = -ln max_i p_i.
inline double renyi_entropy(const ProbVec& p, double alpha) {
  if (alpha == 1.0) return shannon_entropy(p);
  if (alpha == 0.0) {
    int rank = 0;
    for (int i = 0; i < p.dim(); ++i)
      if (p[i] > 0.0) ++rank;
    return std::log(static_cast<double>(rank));
  }
  if (std::isinf(alpha)) {
    if (alpha > 0.0) {
      double m = 0.0;
      for (int i = 0; i < p.dim(); ++i) m = std::max(m, p[i]);
      return -std::log(m);
    }
    double m = kInf;  // alpha = -inf: ln min_i p_i
    for (int i = 0; i < p.dim(); ++i) m = std::min(m, p[i]);
    return m > 0.0 ? std::log(m) : -kInf;
  }
  std::vector<double> terms;
  for (int i = 0; i < p.dim(); ++i) {
    if (p[i] <= 0.0) {
      if (alpha < 0.0) return -kInf;  // sum diverges, negative coefficient
      continue;
    }
    terms.push_back(alpha * std::log(p[i]));
  }
  const double sgn = alpha > 0.0 ? 1.0 : -1.0;
  return sgn / (1.0 - alpha) * log_sum_exp(terms);
}

// A convex function on (0, inf) together with its boundary limits, used for
// f-divergences and Petz quasi-entropies.
struct ConvexFnSpec {
  std::function<double(double)> f;
  double f_at_0 = 0.0;          // lim_{x->0+} f(x), may be +inf
  double f_prime_at_inf = 0.0;  // lim_{x->inf} f(x)/x, may be +inf
  std::string label;

  double operator()(double x) const { return x <= 0.0 ? f_at_0 : f(x); }

  // Sampled midpoint-convexity sanity check on a log grid (not a proof).
  bool looks_convex(double tol = 1e-9) const {
    for (int i = -12; i <= 12; ++i) {
      for (int j = i + 1; j <= 12; ++j) {
        double x = std::exp(0.5 * i), y = std::exp(0.5 * j);
        if (f(0.5 * (x + y)) > 0.5 * (f(x) + f(y)) + tol) return false;
      }
    }
    return true;
  }
};

inline ConvexFnSpec fn_kl() {
  return {[](double x) { return x * std::log(x); }, 0.0, kInf, "klf"};
}
inline ConvexFnSpec fn_total_variation() {
  return {[](double x) { return 0.5 * std::abs(x - 1.0); }, 0.5, 0.5, "tv"};
}
inline ConvexFnSpec fn_hellinger() {
  return {[](double x) { return 1.0 - std::sqrt(x); }, 1.0, 0.0, "hellinger"};
}
inline ConvexFnSpec fn_chi2() {
  return {[](double x) { return x * x; }, 0.0, kInf, "chi2"};
}
inline ConvexFnSpec fn_power(double a) {
  if (a <= 1.0) throw ValidationError("fn_power: needs a > 1 for convexity");
  return {[a](double x) { return std::pow(x, a); }, 0.0, kInf, "alpha:" + std::to_string(a)};
}

// D_f(p||q) = sum_i q_i f(p_i/q_i), with q_i = 0 terms contributing
// p_i * f'(inf) (zero when p_i = 0).
inline double f_divergence(const ProbVec& p, const ProbVec& q, const ConvexFnSpec& f) {
  if (p.dim() != q.dim()) throw DimensionMismatch("f_divergence: dims differ");
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    if (q[i] > 0.0) {
      double term = q[i] * f(p[i] / q[i]);
      if (!std::isfinite(term)) return term;
      s += term;
    } else if (p[i] > 0.0) {
      if (std::isinf(f.f_prime_at_inf)) return kInf;
      s += p[i] * f.f_prime_at_inf;
    }
  }
  return s;
}

}  // namespace majtherm
