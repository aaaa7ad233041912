#pragma once

#include <Eigen/Dense>
#include <random>

#include "majtherm/prob.hpp"

namespace majtherm {

using Rng = std::mt19937_64;

// Dirichlet(1,...,1) sample, i.e. uniform on the simplex.
inline ProbVec random_prob(int d, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> v(static_cast<std::size_t>(d));
  for (double& x : v) x = expo(rng);
  return ProbVec(std::move(v), /*normalize=*/true);
}

// Full-support variant: floors every entry away from zero.
inline ProbVec random_prob_full_support(int d, Rng& rng, double floor = 1e-3) {
  ProbVec p = random_prob(d, rng);
  std::vector<double> v(p.entries());
  for (double& x : v) x += floor;
  return ProbVec(std::move(v), /*normalize=*/true);
}

inline StochasticMatrix random_stochastic(int dim_out, int dim_in, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::MatrixXd m(dim_out, dim_in);
  for (int j = 0; j < dim_in; ++j) {
    double s = 0.0;
    for (int i = 0; i < dim_out; ++i) {
      m(i, j) = expo(rng);
      s += m(i, j);
    }
    m.col(j) /= s;
  }
  return StochasticMatrix(std::move(m));
}

inline std::vector<int> random_permutation(int d, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

// Convex combination of random permutation matrices; exactly doubly
// stochastic by construction (Birkhoff polytope point).
inline StochasticMatrix random_doubly_stochastic(int d, Rng& rng, int terms = 0) {
  if (terms <= 0) terms = d * d;
  ProbVec w = random_prob(terms, rng);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < terms; ++k) {
    std::vector<int> perm = random_permutation(d, rng);
    for (int j = 0; j < d; ++j) m(perm[static_cast<std::size_t>(j)], j) += w[k];
  }
  return StochasticMatrix(std::move(m));
}

}  // namespace majtherm
