#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "majtherm/common.hpp"

namespace majtherm {

// Finite classical probability distribution. Entries are validated on
// construction: tiny negatives (>= -1e-12) are clamped to zero, and the sum
// must be within kNormTol of 1 unless `normalize` is set.
class ProbVec {
 public:
  explicit ProbVec(std::vector<double> entries, bool normalize = false)
      : entries_(std::move(entries)) {
    if (entries_.empty()) throw ValidationError("ProbVec: empty");
    double sum = 0.0;
    for (double& x : entries_) {
      if (x < 0.0) {
        if (x < -kNormTol && !normalize) throw ValidationError("ProbVec: negative entry");
        x = std::max(x, 0.0);
      }
      sum += x;
    }
    if (normalize) {
      if (sum <= 0.0) throw ValidationError("ProbVec: zero total mass");
      for (double& x : entries_) x /= sum;
    } else if (std::abs(sum - 1.0) > kNormTol) {
      throw ValidationError("ProbVec: sum " + std::to_string(sum) + " not within 1e-12 of 1");
    }
  }

  int dim() const { return static_cast<int>(entries_.size()); }
  double operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& entries() const { return entries_; }

  Eigen::VectorXd as_vector() const {
    return Eigen::Map<const Eigen::VectorXd>(entries_.data(), dim());
  }

  bool full_support(double tol = 0.0) const {
    return std::all_of(entries_.begin(), entries_.end(), [tol](double x) { return x > tol; });
  }

  static ProbVec uniform(int d) {
    return ProbVec(std::vector<double>(static_cast<std::size_t>(d), 1.0 / d));
  }
  static ProbVec point_mass(int d, int i) {
    std::vector<double> v(static_cast<std::size_t>(d), 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    return ProbVec(std::move(v));
  }

 private:
  std::vector<double> entries_;
};

// Column-stochastic matrix: sum_i T(i,j) = 1 for every column j. Note that
// much software uses the row convention; everything here is column-stochastic,
// acting on probability column vectors as p' = T p.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
    if (m_.rows() < 1 || m_.cols() < 1) throw ValidationError("StochasticMatrix: empty");
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      double col = 0.0;
      for (Eigen::Index i = 0; i < m_.rows(); ++i) {
        double v = m_(i, j);
        if (v < 0.0) {
          if (v < -kColSumTol) throw ValidationError("StochasticMatrix: negative entry");
          m_(i, j) = 0.0;
        }
        col += m_(i, j);
      }
      if (std::abs(col - 1.0) > kColSumTol)
        throw ValidationError("StochasticMatrix: column sum off by " + std::to_string(col - 1.0));
    }
  }

  int dim_out() const { return static_cast<int>(m_.rows()); }
  int dim_in() const { return static_cast<int>(m_.cols()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const { return m_; }

  bool is_doubly_stochastic(double tol = kColSumTol) const {
    if (m_.rows() != m_.cols()) return false;
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
      if (std::abs(m_.row(i).sum() - 1.0) > tol) return false;
    return true;
  }

  // Fixed-point predicate: T q = q within tol in l1.
  bool preserves(const ProbVec& q, double tol = kColSumTol) const {
    if (dim_in() != q.dim() || dim_out() != q.dim()) return false;
    Eigen::VectorXd r = m_ * q.as_vector() - q.as_vector();
    return r.lpNorm<1>() <= tol;
  }

  static StochasticMatrix identity(int d) {
    return StochasticMatrix(Eigen::MatrixXd::Identity(d, d));
  }
  static StochasticMatrix permutation(const std::vector<int>& dest) {
    const int d = static_cast<int>(dest.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j) m(dest[static_cast<std::size_t>(j)], j) = 1.0;
    return StochasticMatrix(std::move(m));
  }

 private:
  Eigen::MatrixXd m_;
};

// Hamiltonian energy levels with inverse temperature beta >= 0. beta = 0 is
// allowed (infinite temperature): the Gibbs state is uniform and the free
// energy is undefined.
struct GibbsSpec {
  std::vector<double> energies;
  double beta = 1.0;

  GibbsSpec(std::vector<double> e, double b) : energies(std::move(e)), beta(b) {
    if (energies.empty()) throw ValidationError("GibbsSpec: no energy levels");
    if (beta < 0.0) throw ValidationError("GibbsSpec: beta < 0");
    for (double x : energies)
      if (!std::isfinite(x)) throw ValidationError("GibbsSpec: non-finite energy");
  }

  int dim() const { return static_cast<int>(energies.size()); }

  double log_z() const {
    std::vector<double> a(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i) a[i] = -beta * energies[i];
    return log_sum_exp(a);
  }
  double z() const { return std::exp(log_z()); }

  // F = -ln(Z)/beta; undefined at beta = 0.
  std::optional<double> free_energy() const {
    if (beta == 0.0) return std::nullopt;
    return -log_z() / beta;
  }

  ProbVec state() const {
    const double lz = log_z();
    std::vector<double> p(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i)
      p[i] = std::exp(-beta * energies[i] - lz);
    return ProbVec(std::move(p), /*normalize=*/true);
  }
};

struct GibbsStateResult {
  ProbVec state;
  double z;
  std::optional<double> free_energy;
};

inline GibbsStateResult gibbs_state(const GibbsSpec& spec) {
  return {spec.state(), spec.z(), spec.free_energy()};
}

struct SortedProb {
  ProbVec sorted;
  std::vector<int> perm;  // perm[k] = original index occupying sorted position k
};

// Sort non-increasing with a stable tie-break on the original index, so the
// permutation is deterministic.
inline SortedProb rearrange_decreasing(const ProbVec& p) {
  std::vector<int> idx(static_cast<std::size_t>(p.dim()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return p[a] > p[b]; });
  std::vector<double> sorted(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) sorted[k] = p[idx[k]];
  return {ProbVec(std::move(sorted)), std::move(idx)};
}

// D(p, q) = (1/2) sum_i |p_i - q_i|.
inline double trace_distance(const ProbVec& p, const ProbVec& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("trace_distance: dims differ");
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

inline ProbVec apply_stochastic(const StochasticMatrix& T, const ProbVec& p) {
  if (T.dim_in() != p.dim()) throw DimensionMismatch("apply_stochastic: dims differ");
  Eigen::VectorXd out = T.matrix() * p.as_vector();
  return ProbVec(std::vector<double>(out.data(), out.data() + out.size()), /*normalize=*/true);
}

// Joint distribution p (x) r in row-major order: index i*dim(r)+j carries p_i r_j.
inline ProbVec tensor(const ProbVec& p, const ProbVec& r) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p.dim()) * static_cast<std::size_t>(r.dim()));
  for (int i = 0; i < p.dim(); ++i)
    for (int j = 0; j < r.dim(); ++j) out.push_back(p[i] * r[j]);
  return ProbVec(std::move(out), /*normalize=*/true);
}

// Random stochastic matrix with prescribed fixed point q, built from
// Metropolis rates: off-diagonal T(i,j) = c A(i,j) min(1, q_i/q_j) with a
// symmetric random A, which satisfies detailed balance T(i,j) q_j = T(j,i) q_i
// and hence T q = q.
inline StochasticMatrix random_stochastic_fixed_point(const ProbVec& q, std::uint64_t seed) {
  if (!q.full_support()) throw ValidationError("random_stochastic_fixed_point: q has a zero entry");
  const int d = q.dim();
  if (d == 1) return StochasticMatrix(Eigen::MatrixXd::Ones(1, 1));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) A(i, j) = A(j, i) = unif(rng);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(d, d);
  const double c = 1.0 / d;  // keeps every column sum of off-diagonals < 1
  for (int j = 0; j < d; ++j) {
    double off = 0.0;
    for (int i = 0; i < d; ++i) {
      if (i == j) continue;
      T(i, j) = c * A(i, j) * std::min(1.0, q[i] / q[j]);
      off += T(i, j);
    }
    T(j, j) = 1.0 - off;
  }
  return StochasticMatrix(std::move(T));
}

}  // namespace majtherm
