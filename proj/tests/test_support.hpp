#pragma once

#include <cmath>

#include "doctest.h"
#include "majtherm/prob.hpp"
#include "majtherm/random.hpp"

namespace mt = majtherm;

inline mt::ProbVec pv(std::initializer_list<double> xs) {
  return mt::ProbVec(std::vector<double>(xs), /*normalize=*/true);
}

inline double linf(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}
