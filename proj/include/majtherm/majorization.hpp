#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "majtherm/divergence.hpp"
#include "majtherm/lp.hpp"
#include "majtherm/prob.hpp"

namespace majtherm {

enum class LorenzKind { ordinary, relative };

// Concave polyline of cumulative probabilities from (0,0) to (1,1).
struct LorenzCurve {
  std::vector<std::pair<double, double>> points;
  LorenzKind kind = LorenzKind::ordinary;

  // Piecewise-linear interpolation; x outside [0,1] is clamped.
  double value_at(double x) const {
    if (x <= points.front().first) return points.front().second;
    for (std::size_t k = 1; k < points.size(); ++k) {
      if (x <= points[k].first) {
        auto [x0, y0] = points[k - 1];
        auto [x1, y1] = points[k];
        if (x1 - x0 <= 0.0) return std::max(y0, y1);
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
      }
    }
    return points.back().second;
  }
};

inline LorenzCurve lorenz(const ProbVec& p) {
  SortedProb s = rearrange_decreasing(p);
  LorenzCurve c;
  c.kind = LorenzKind::ordinary;
  c.points.emplace_back(0.0, 0.0);
  double acc = 0.0;
  const int d = p.dim();
  for (int k = 0; k < d; ++k) {
    acc += s.sorted[k];
    c.points.emplace_back(static_cast<double>(k + 1) / d, std::min(acc, 1.0));
  }
  c.points.back().second = 1.0;
  return c;
}

namespace detail {

// Indices sorted by p_i/q_i non-increasing, ties broken by original index.
inline std::vector<int> ratio_order(const ProbVec& p, const ProbVec& q) {
  std::vector<int> idx(static_cast<std::size_t>(p.dim()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return p[a] * q[b] > p[b] * q[a]; });
  return idx;
}

}  // namespace detail

// Relative Lorenz curve of (p, q): cumulative p against cumulative q, both
// rearranged by non-increasing likelihood ratio p_i/q_i.
inline LorenzCurve lorenz_relative(const ProbVec& p, const ProbVec& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("lorenz_relative: dims differ");
  if (!q.full_support()) throw ValidationError("lorenz_relative: q must have full support");
  std::vector<int> order = detail::ratio_order(p, q);
  LorenzCurve c;
  c.kind = LorenzKind::relative;
  c.points.emplace_back(0.0, 0.0);
  double x = 0.0, y = 0.0;
  for (int i : order) {
    x += q[i];
    y += p[i];
    c.points.emplace_back(std::min(x, 1.0), std::min(y, 1.0));
  }
  c.points.back() = {1.0, 1.0};
  return c;
}

struct MajorizationVerdict {
  bool holds = true;
  std::optional<int> violated_k;  // smallest k (1-based) where the partial sum fails
};

// p_hi majorizes p_lo: every partial sum of the sorted p_lo is dominated.
// Unequal dimensions are padded with zeros.
inline MajorizationVerdict majorizes_detail(const ProbVec& p_hi, const ProbVec& p_lo,
                                            double tol = kDecisionTol) {
  const int d = std::max(p_hi.dim(), p_lo.dim());
  auto padded_sorted = [d](const ProbVec& p) {
    std::vector<double> v(p.entries());
    v.resize(static_cast<std::size_t>(d), 0.0);
    std::sort(v.begin(), v.end(), std::greater<double>());
    return v;
  };
  std::vector<double> hi = padded_sorted(p_hi), lo = padded_sorted(p_lo);
  double acc_hi = 0.0, acc_lo = 0.0;
  for (int k = 0; k < d; ++k) {
    acc_hi += hi[static_cast<std::size_t>(k)];
    acc_lo += lo[static_cast<std::size_t>(k)];
    if (acc_lo > acc_hi + tol) return {false, k + 1};
  }
  return {true, std::nullopt};
}

inline bool majorizes(const ProbVec& p_hi, const ProbVec& p_lo, double tol = kDecisionTol) {
  return majorizes_detail(p_hi, p_lo, tol).holds;
}

// (p, q) d-majorizes (p_lo, q_lo): the relative Lorenz curve of (p, q) lies
// weakly above that of (p_lo, q_lo). Both curves are concave polylines, so it
// suffices to compare at the union of breakpoint abscissas.
inline bool d_majorizes(const ProbVec& p, const ProbVec& q, const ProbVec& p_lo,
                        const ProbVec& q_lo, double tol = kDecisionTol) {
  LorenzCurve hi = lorenz_relative(p, q);
  LorenzCurve lo = lorenz_relative(p_lo, q_lo);
  for (const auto& [x, y] : lo.points)
    if (hi.value_at(x) + tol < y) return false;
  for (const auto& [x, y] : hi.points)
    if (y + tol < lo.value_at(x)) return false;
  return true;
}

// Equivalent t-sweep test: sum_i |p_lo_i - t q_lo_i| <= sum_i |p_i - t q_i|
// for all t >= 0. The difference of the two sides is piecewise linear with
// kinks at the likelihood ratios and vanishes at t = 0 and t -> inf, so
// checking the kinks is exhaustive.
inline bool d_majorizes_tsweep(const ProbVec& p, const ProbVec& q, const ProbVec& p_lo,
                               const ProbVec& q_lo, double tol = kDecisionTol) {
  std::vector<double> ts;
  for (int i = 0; i < p.dim(); ++i)
    if (q[i] > 0.0) ts.push_back(p[i] / q[i]);
  for (int i = 0; i < p_lo.dim(); ++i)
    if (q_lo[i] > 0.0) ts.push_back(p_lo[i] / q_lo[i]);
  auto l1 = [](const ProbVec& a, const ProbVec& b, double t) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += std::abs(a[i] - t * b[i]);
    return s;
  };
  for (double t : ts)
    if (l1(p_lo, q_lo, t) > l1(p, q, t) + tol) return false;
  return true;
}

inline bool thermo_majorizes(const ProbVec& p, const ProbVec& p_target, const ProbVec& gibbs,
                             double tol = kDecisionTol) {
  return d_majorizes(p, gibbs, p_target, gibbs, tol);
}

struct NotMajorizedError : std::runtime_error {
  int violated_k;
  explicit NotMajorizedError(int k)
      : std::runtime_error("majorization precondition violated at partial sum k=" +
                           std::to_string(k)),
        violated_k(k) {}
};

// --- Constructive witnesses -------------------------------------------------

// Elementary doubly stochastic factor acting on coordinates (i, j):
// G = lambda I + (1 - lambda) Pi_ij.
struct TTransform {
  int i, j;
  double lambda;
};

// T = unsort' o (transform chain) o sort, kept in factored form so it can be
// replayed cheaply on tall embedded vectors.
struct DsChain {
  int dim = 0;
  std::vector<int> sort_perm;    // sorted position k holds original index sort_perm[k]
  std::vector<TTransform> transforms;
  std::vector<int> unsort_perm;  // output index unsort_perm[k] receives sorted slot k

  // Replay on the rows of Y (acts as the matrix product T * Y).
  void apply_rows(Eigen::MatrixXd& Y) const {
    Eigen::MatrixXd Z(Y.rows(), Y.cols());
    for (int k = 0; k < dim; ++k) Z.row(k) = Y.row(sort_perm[static_cast<std::size_t>(k)]);
    for (const TTransform& t : transforms) {
      Eigen::RowVectorXd a = Z.row(t.i), b = Z.row(t.j);
      Z.row(t.i) = t.lambda * a + (1.0 - t.lambda) * b;
      Z.row(t.j) = (1.0 - t.lambda) * a + t.lambda * b;
    }
    for (int k = 0; k < dim; ++k) Y.row(unsort_perm[static_cast<std::size_t>(k)]) = Z.row(k);
  }

  Eigen::MatrixXd materialize() const {
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(dim, dim);
    apply_rows(T);
    return T;
  }
};

// Hardy-Littlewood-Polya chain: a product of at most dim-1 T-transforms (plus
// sorting permutations) carrying p onto p_target when p majorizes p_target.
inline DsChain doubly_stochastic_chain(const ProbVec& p, const ProbVec& p_target) {
  if (p.dim() != p_target.dim()) throw DimensionMismatch("doubly_stochastic_chain: dims differ");
  MajorizationVerdict v = majorizes_detail(p, p_target);
  if (!v.holds) throw NotMajorizedError(*v.violated_k);
  const int d = p.dim();
  SortedProb sp = rearrange_decreasing(p);
  SortedProb st = rearrange_decreasing(p_target);

  DsChain chain;
  chain.dim = d;
  chain.sort_perm = sp.perm;
  chain.unsort_perm = st.perm;

  std::vector<double> x(sp.sorted.entries());
  const std::vector<double>& y = st.sorted.entries();
  const double tol = 1e-13;
  for (int step = 0; step < 4 * d; ++step) {
    // largest index with surplus, then the first deficit below it
    int j = -1;
    for (int i = d - 1; i >= 0; --i)
      if (x[static_cast<std::size_t>(i)] > y[static_cast<std::size_t>(i)] + tol) {
        j = i;
        break;
      }
    if (j < 0) break;
    int k = -1;
    for (int i = j + 1; i < d; ++i)
      if (x[static_cast<std::size_t>(i)] < y[static_cast<std::size_t>(i)] - tol) {
        k = i;
        break;
      }
    if (k < 0) break;  // only rounding noise remains
    const double xj = x[static_cast<std::size_t>(j)], xk = x[static_cast<std::size_t>(k)];
    const double delta = std::min(xj - y[static_cast<std::size_t>(j)],
                                  y[static_cast<std::size_t>(k)] - xk);
    const double lambda = 1.0 - delta / (xj - xk);
    chain.transforms.push_back({j, k, lambda});
    x[static_cast<std::size_t>(j)] = xj - delta;
    x[static_cast<std::size_t>(k)] = xk + delta;
  }
  return chain;
}

enum class WitnessMethod { ttransform, embedding, lp };

struct WitnessReport {
  StochasticMatrix matrix;
  double residual_p = 0.0;                  // l1 error of T p - p_target
  std::optional<double> residual_q;         // l1 error of T q - q_target, if applicable
  WitnessMethod method = WitnessMethod::ttransform;
};

inline WitnessReport witness_doubly_stochastic(const ProbVec& p, const ProbVec& p_target) {
  DsChain chain = doubly_stochastic_chain(p, p_target);
  StochasticMatrix T(chain.materialize());
  double res = (T.matrix() * p.as_vector() - p_target.as_vector()).lpNorm<1>();
  return {std::move(T), res, std::nullopt, WitnessMethod::ttransform};
}

// --- LP feasibility routes (also serve as independent oracles in tests) -----

// Exists doubly stochastic T with T p = p_target?
inline LpFeasibility doubly_stochastic_feasible(const ProbVec& p, const ProbVec& p_target) {
  const int d = p.dim();
  const int n = d * d;  // variables T(i,j), row-major
  const int m = 3 * d;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b(m);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      A(i, i * d + j) = 1.0;            // row sums
      A(d + j, i * d + j) = 1.0;        // column sums
      A(2 * d + i, i * d + j) = p[j];   // image constraint
    }
    b(i) = 1.0;
    b(d + i) = 1.0;
    b(2 * d + i) = p_target[i];
  }
  return lp_feasible(std::move(A), std::move(b));
}

// Exists column-stochastic T with T p = p_target and T q = q_target?
inline LpFeasibility d_stochastic_feasible(const ProbVec& p, const ProbVec& q,
                                           const ProbVec& p_target, const ProbVec& q_target) {
  const int din = p.dim(), dout = p_target.dim();
  const int n = dout * din;
  const int m = din + 2 * dout;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b(m);
  for (int j = 0; j < din; ++j) {
    for (int i = 0; i < dout; ++i) A(j, i * din + j) = 1.0;  // column sums
    b(j) = 1.0;
  }
  for (int i = 0; i < dout; ++i) {
    for (int j = 0; j < din; ++j) {
      A(din + i, i * din + j) = p[j];
      A(din + dout + i, i * din + j) = q[j];
    }
    b(din + i) = p_target[i];
    b(din + dout + i) = q_target[i];
  }
  return lp_feasible(std::move(A), std::move(b));
}

namespace detail {

// Smallest common denominator M <= cap for which both vectors are exactly
// rational (within rounding noise), or 0 when none exists.
inline int common_denominator(const ProbVec& q, const ProbVec& q2, int cap, double tol = 1e-9) {
  for (int M = 1; M <= cap; ++M) {
    bool ok = true;
    long sum1 = 0, sum2 = 0;
    for (int i = 0; i < q.dim() && ok; ++i) {
      double v = q[i] * M;
      if (std::abs(v - std::round(v)) > tol * M) ok = false;
      sum1 += static_cast<long>(std::llround(v));
    }
    for (int i = 0; i < q2.dim() && ok; ++i) {
      double v = q2[i] * M;
      if (std::abs(v - std::round(v)) > tol * M) ok = false;
      sum2 += static_cast<long>(std::llround(v));
    }
    if (ok && sum1 == M && sum2 == M) return M;
  }
  return 0;
}

}  // namespace detail

// Witness for d-majorization. When q and q_target are rational with a common
// denominator M <= max_denominator, embed into an M-dimensional uniform frame,
// run the T-transform chain there and collapse the blocks. Otherwise fall
// back to LP feasibility.
inline WitnessReport witness_d_stochastic(const ProbVec& p, const ProbVec& q,
                                          const ProbVec& p_target, const ProbVec& q_target,
                                          int max_denominator = 10000) {
  if (!q.full_support() || !q_target.full_support())
    throw ValidationError("witness_d_stochastic: references must have full support");
  if (!d_majorizes(p, q, p_target, q_target))
    throw NotMajorizedError(0);
  const int d = p.dim(), d2 = p_target.dim();

  const int M = detail::common_denominator(q, q_target, max_denominator);
  if (M > 0) {
    std::vector<int> m1(static_cast<std::size_t>(d)), m2(static_cast<std::size_t>(d2));
    for (int i = 0; i < d; ++i) m1[static_cast<std::size_t>(i)] = static_cast<int>(std::llround(q[i] * M));
    for (int i = 0; i < d2; ++i) m2[static_cast<std::size_t>(i)] = static_cast<int>(std::llround(q_target[i] * M));
    std::vector<double> pe, pe2;
    pe.reserve(static_cast<std::size_t>(M));
    pe2.reserve(static_cast<std::size_t>(M));
    for (int i = 0; i < d; ++i)
      for (int r = 0; r < m1[static_cast<std::size_t>(i)]; ++r)
        pe.push_back(p[i] / m1[static_cast<std::size_t>(i)]);
    for (int i = 0; i < d2; ++i)
      for (int r = 0; r < m2[static_cast<std::size_t>(i)]; ++r)
        pe2.push_back(p_target[i] / m2[static_cast<std::size_t>(i)]);
    ProbVec p_emb(std::move(pe), true), p2_emb(std::move(pe2), true);
    if (majorizes(p_emb, p2_emb, 1e-9)) {
      DsChain chain = doubly_stochastic_chain(p_emb, p2_emb);
      // Y = Tbar * E with E the block-embedding matrix; collapse rows after.
      Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(M, d);
      int row = 0;
      for (int j = 0; j < d; ++j)
        for (int r = 0; r < m1[static_cast<std::size_t>(j)]; ++r)
          Y(row++, j) = 1.0 / m1[static_cast<std::size_t>(j)];
      chain.apply_rows(Y);
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(d2, d);
      row = 0;
      for (int i = 0; i < d2; ++i)
        for (int r = 0; r < m2[static_cast<std::size_t>(i)]; ++r) T.row(i) += Y.row(row++);
      StochasticMatrix Tm(std::move(T));
      double rp = (Tm.matrix() * p.as_vector() - p_target.as_vector()).lpNorm<1>();
      double rq = (Tm.matrix() * q.as_vector() - q_target.as_vector()).lpNorm<1>();
      return {std::move(Tm), rp, rq, WitnessMethod::embedding};
    }
  }

  LpFeasibility lp = d_stochastic_feasible(p, q, p_target, q_target);
  if (!lp.feasible)
    throw ValidationError("witness_d_stochastic: LP infeasible beyond tolerance");
  Eigen::MatrixXd T(d2, d);
  for (int i = 0; i < d2; ++i)
    for (int j = 0; j < d; ++j) T(i, j) = lp.x(i * d + j);
  // Repair rounding: renormalize columns.
  for (int j = 0; j < d; ++j) {
    double s = T.col(j).sum();
    if (s > 0.0) T.col(j) /= s;
  }
  StochasticMatrix Tm(std::move(T));
  double rp = (Tm.matrix() * p.as_vector() - p_target.as_vector()).lpNorm<1>();
  double rq = (Tm.matrix() * q.as_vector() - q_target.as_vector()).lpNorm<1>();
  return {std::move(Tm), rp, rq, WitnessMethod::lp};
}

// --- Birkhoff decomposition -------------------------------------------------

namespace detail {

// Perfect matching (column -> row) using only entries >= threshold; simple
// augmenting-path search, fine at desk scale.
inline bool perfect_matching(const Eigen::MatrixXd& T, double threshold, std::vector<int>& col_to_row) {
  const int d = static_cast<int>(T.rows());
  col_to_row.assign(static_cast<std::size_t>(d), -1);
  std::vector<int> row_to_col(static_cast<std::size_t>(d), -1);
  std::function<bool(int, std::vector<bool>&)> try_col = [&](int j, std::vector<bool>& seen) {
    for (int i = 0; i < d; ++i) {
      if (T(i, j) >= threshold && !seen[static_cast<std::size_t>(i)]) {
        seen[static_cast<std::size_t>(i)] = true;
        if (row_to_col[static_cast<std::size_t>(i)] < 0 ||
            try_col(row_to_col[static_cast<std::size_t>(i)], seen)) {
          row_to_col[static_cast<std::size_t>(i)] = j;
          col_to_row[static_cast<std::size_t>(j)] = i;
          return true;
        }
      }
    }
    return false;
  };
  for (int j = 0; j < d; ++j) {
    std::vector<bool> seen(static_cast<std::size_t>(d), false);
    if (!try_col(j, seen)) return false;
  }
  return true;
}

// Lexicographically smallest (in col_to_row order) perfect matching over
// entries >= threshold.
inline std::vector<int> lexmin_matching(const Eigen::MatrixXd& T, double threshold) {
  const int d = static_cast<int>(T.rows());
  Eigen::MatrixXd mask = T;
  std::vector<int> result(static_cast<std::size_t>(d), -1);
  std::vector<bool> row_used(static_cast<std::size_t>(d), false);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      if (row_used[static_cast<std::size_t>(i)] || mask(i, j) < threshold) continue;
      // Tentatively pin (i, j) and test completability of the remainder.
      Eigen::MatrixXd sub = mask;
      for (int jj = 0; jj <= j; ++jj) sub.col(jj).setZero();
      for (int ii = 0; ii < d; ++ii)
        if (row_used[static_cast<std::size_t>(ii)] || ii == i) sub.row(ii).setZero();
      // Completability of columns j+1..d-1 over unused rows:
      std::vector<int> dummy;
      Eigen::MatrixXd test = Eigen::MatrixXd::Identity(d, d);
      // Build reduced bipartite problem explicitly.
      std::vector<int> cols, rows;
      for (int jj = j + 1; jj < d; ++jj) cols.push_back(jj);
      for (int ii = 0; ii < d; ++ii)
        if (!row_used[static_cast<std::size_t>(ii)] && ii != i) rows.push_back(ii);
      Eigen::MatrixXd R(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b)
          R(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              mask(rows[a], cols[b]);
      bool ok = true;
      if (!cols.empty()) {
        std::vector<int> match;
        ok = perfect_matching(R, threshold, match);
      }
      if (ok) {
        result[static_cast<std::size_t>(j)] = i;
        row_used[static_cast<std::size_t>(i)] = true;
        break;
      }
    }
    if (result[static_cast<std::size_t>(j)] < 0)
      throw ValidationError("lexmin_matching: no perfect matching at threshold");
  }
  return result;
}

}  // namespace detail

struct BirkhoffTerm {
  std::vector<int> col_to_row;  // permutation: column j maps to row col_to_row[j]
  double weight;
};

// Greedy Birkhoff-von Neumann decomposition: repeatedly strip the
// maximum-bottleneck perfect matching (lexicographically smallest among
// maximizers), then Caratheodory-reduce to at most (d-1)^2 + 1 terms.
inline std::vector<BirkhoffTerm> birkhoff_decompose(const StochasticMatrix& T_in,
                                                    double tol = 1e-9) {
  if (!T_in.is_doubly_stochastic())
    throw ValidationError("birkhoff_decompose: matrix is not doubly stochastic");
  const int d = T_in.dim_in();
  Eigen::MatrixXd R = T_in.matrix();
  std::vector<BirkhoffTerm> terms;
  double remaining = 1.0;
  const int hard_cap = d * d + d + 1;
  while (remaining > tol && static_cast<int>(terms.size()) < hard_cap) {
    // Bottleneck value: largest threshold admitting a perfect matching.
    std::vector<double> values;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (R(i, j) > tol) values.push_back(R(i, j));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    int lo = 0, hi = static_cast<int>(values.size()) - 1, best = 0;
    std::vector<int> match;
    while (lo <= hi) {
      int mid = (lo + hi) / 2;
      if (detail::perfect_matching(R, values[static_cast<std::size_t>(mid)], match)) {
        best = mid;
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
    const double threshold = values[static_cast<std::size_t>(best)];
    std::vector<int> perm = detail::lexmin_matching(R, threshold);
    double w = kInf;
    for (int j = 0; j < d; ++j) w = std::min(w, R(perm[static_cast<std::size_t>(j)], j));
    for (int j = 0; j < d; ++j) R(perm[static_cast<std::size_t>(j)], j) -= w;
    terms.push_back({std::move(perm), w});
    remaining -= w;
  }
  if (remaining > 10 * tol)
    throw ValidationError("birkhoff_decompose: failed to exhaust the matrix");
  if (!terms.empty()) terms.back().weight += std::max(remaining, 0.0);

  // Caratheodory reduction down to the Marcus-Ree bound.
  const int bound = (d - 1) * (d - 1) + 1;
  while (static_cast<int>(terms.size()) > bound) {
    const int k = static_cast<int>(terms.size());
    Eigen::MatrixXd V(d * d + 1, k);
    for (int c = 0; c < k; ++c) {
      Eigen::MatrixXd P = Eigen::MatrixXd::Zero(d, d);
      for (int j = 0; j < d; ++j)
        P(terms[static_cast<std::size_t>(c)].col_to_row[static_cast<std::size_t>(j)], j) = 1.0;
      V.col(c).head(d * d) = Eigen::Map<Eigen::VectorXd>(P.data(), d * d);
      V(d * d, c) = 1.0;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
    Eigen::MatrixXd null = lu.kernel();
    if (null.cols() == 0 || null.col(0).lpNorm<1>() < 1e-12) break;
    Eigen::VectorXd c = null.col(0);
    // Shift weights along the null direction until one hits zero.
    double t_max = kInf;
    int drop = -1;
    for (int i = 0; i < k; ++i) {
      if (c(i) > 1e-14) {
        double t = terms[static_cast<std::size_t>(i)].weight / c(i);
        if (t < t_max) {
          t_max = t;
          drop = i;
        }
      }
    }
    if (drop < 0) {
      c = -c;
      for (int i = 0; i < k; ++i) {
        if (c(i) > 1e-14) {
          double t = terms[static_cast<std::size_t>(i)].weight / c(i);
          if (t < t_max) {
            t_max = t;
            drop = i;
          }
        }
      }
    }
    if (drop < 0) break;
    for (int i = 0; i < k; ++i) terms[static_cast<std::size_t>(i)].weight -= t_max * c(i);
    terms.erase(terms.begin() + drop);
    for (auto it = terms.begin(); it != terms.end();) {
      if (it->weight <= 1e-13)
        it = terms.erase(it);
      else
        ++it;
    }
  }
  return terms;
}

inline Eigen::MatrixXd birkhoff_reconstruct(const std::vector<BirkhoffTerm>& terms, int d) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(d, d);
  for (const auto& t : terms)
    for (int j = 0; j < d; ++j) R(t.col_to_row[static_cast<std::size_t>(j)], j) += t.weight;
  return R;
}

}  // namespace majtherm
