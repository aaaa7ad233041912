#pragma once

#include <Eigen/Dense>
#include <functional>

#include "majtherm/prob.hpp"

namespace majtherm {

// Black-box parametric family theta -> p(theta). Derivatives are taken by
// central differences with one Richardson extrapolation level, so the family
// only needs to be evaluable, not differentiable in closed form.
struct ParamFamily {
  std::function<ProbVec(const std::vector<double>&)> state_at;
  int m = 1;               // parameter count
  double fd_step = 1e-5;   // central-difference step
};

namespace detail {

inline Eigen::MatrixXd family_jacobian(const ParamFamily& fam, const std::vector<double>& theta,
                                       int dim) {
  Eigen::MatrixXd dp(dim, fam.m);
  const double h = fam.fd_step;
  for (int k = 0; k < fam.m; ++k) {
    auto diff_at = [&](double step) {
      std::vector<double> tp = theta, tm = theta;
      tp[static_cast<std::size_t>(k)] += step;
      tm[static_cast<std::size_t>(k)] -= step;
      Eigen::VectorXd a = fam.state_at(tp).as_vector();
      Eigen::VectorXd b = fam.state_at(tm).as_vector();
      return Eigen::VectorXd((a - b) / (2.0 * step));
    };
    // Richardson: (4 D(h/2) - D(h)) / 3 cancels the O(h^2) term.
    dp.col(k) = (4.0 * diff_at(h / 2.0) - diff_at(h)) / 3.0;
  }
  return dp;
}

}  // namespace detail

// Classical Fisher information matrix J_kl = sum_i d_k p_i d_l p_i / p_i.
inline Eigen::MatrixXd fisher_matrix(const ParamFamily& fam, const std::vector<double>& theta) {
  ProbVec p = fam.state_at(theta);
  if (!p.full_support()) throw ValidationError("fisher_matrix: p(theta) lacks full support");
  Eigen::MatrixXd dp = detail::family_jacobian(fam, theta, p.dim());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(fam.m, fam.m);
  for (int k = 0; k < fam.m; ++k)
    for (int l = k; l < fam.m; ++l) {
      double s = 0.0;
      for (int i = 0; i < p.dim(); ++i) s += dp(i, k) * dp(i, l) / p[i];
      J(k, l) = J(l, k) = s;
    }
  return J;
}

// Fisher metric G_p(a, b) = sum_i a_i b_i / p_i.
inline double fisher_metric(const ProbVec& p, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != p.dim() || b.size() != p.dim())
    throw DimensionMismatch("fisher_metric: dims differ");
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    if (p[i] <= 0.0) throw ValidationError("fisher_metric: zero entry in p");
    s += a(i) * b(i) / p[i];
  }
  return s;
}

}  // namespace majtherm
