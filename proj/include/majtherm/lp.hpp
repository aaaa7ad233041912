#pragma once

#include <Eigen/Dense>
#include <vector>

#include "majtherm/common.hpp"

namespace majtherm {

struct LpFeasibility {
  bool feasible = false;
  Eigen::VectorXd x;          // a feasible point when feasible
  double infeasibility = 0.0; // phase-1 objective at termination
};

// Feasibility of {x >= 0 : A x = b} by phase-1 simplex with Bland's rule.
// Dense and intended for small instances (tens of variables).
inline LpFeasibility lp_feasible(Eigen::MatrixXd A, Eigen::VectorXd b, double tol = 1e-9) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0.0) {
      A.row(i) = -A.row(i);
      b(i) = -b(i);
    }
  }
  // Tableau [A | I | b], artificial basis, phase-1 cost = sum of artificials.
  Eigen::MatrixXd T(m, n + m + 1);
  T.leftCols(n) = A;
  T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  T.col(n + m) = b;
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
  for (int j = 0; j < n + m; ++j) {
    double red = (j >= n) ? 1.0 : 0.0;
    red -= T.col(j).sum();  // c_B = 1 on the artificial basis
    cost(j) = red;
  }
  const double pivot_tol = 1e-11;
  const int max_iter = 50 * (n + m) * (m + 1);
  for (int iter = 0; iter < max_iter; ++iter) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (cost(j) < -tol) {
        enter = j;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (T(i, enter) > pivot_tol) {
        double ratio = T(i, n + m) / T(i, enter);
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (ratio < best_ratio + 1e-15 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded cannot happen in phase 1; be safe
    double piv = T(leave, enter);
    T.row(leave) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i != leave && std::abs(T(i, enter)) > 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    cost -= cost(enter) * T.row(leave).head(n + m).transpose();
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  double objective = 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[static_cast<std::size_t>(i)] >= n) objective += T(i, n + m);

  LpFeasibility out;
  out.infeasibility = std::max(objective, 0.0);
  out.feasible = objective <= tol;
  out.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    int j = basis[static_cast<std::size_t>(i)];
    if (j < n) out.x(j) = std::max(T(i, n + m), 0.0);
  }
  return out;
}

}  // namespace majtherm
