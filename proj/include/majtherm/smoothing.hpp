#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "majtherm/divergence.hpp"
#include "majtherm/prob.hpp"
#include "majtherm/qdivergence.hpp"
#include "majtherm/quantum.hpp"

namespace majtherm {

// --- Hypothesis-testing divergence ------------------------------------------
// S_H^eta(p||q) = -ln( (1/eta) min { q.Q : p.Q >= eta, 0 <= Q <= 1 } ).

namespace detail {

struct RatioAtom {
  double log_ratio;  // ln(p-mass / q-mass) per unit; +inf when q-mass is 0
  double p_mass;
  double q_mass;
};

// Fractional Neyman-Pearson: fill by likelihood ratio descending, split the
// marginal atom. Exact because the objective is linear in the test.
inline double np_value(std::vector<RatioAtom> atoms, double eta) {
  std::sort(atoms.begin(), atoms.end(),
            [](const RatioAtom& a, const RatioAtom& b) { return a.log_ratio > b.log_ratio; });
  double got = 0.0, cost = 0.0;
  for (const auto& a : atoms) {
    if (a.p_mass <= 0.0) continue;
    if (got + a.p_mass < eta) {
      got += a.p_mass;
      cost += a.q_mass;
    } else {
      cost += a.q_mass * (eta - got) / a.p_mass;
      got = eta;
      break;
    }
  }
  if (got < eta - 1e-12)
    throw ValidationError("hypothesis test: insufficient mass (support violation?)");
  return cost;
}

}  // namespace detail

inline double sh_classical(const ProbVec& p, const ProbVec& q, double eta) {
  if (eta <= 0.0 || eta >= 1.0) throw ValidationError("sh_classical: eta must be in (0,1)");
  if (p.dim() != q.dim()) throw DimensionMismatch("sh_classical: dims differ");
  if (!support_contained(p, q)) throw ValidationError("sh_classical: supp(p) not in supp(q)");
  std::vector<detail::RatioAtom> atoms;
  for (int i = 0; i < p.dim(); ++i) {
    if (p[i] <= 0.0 && q[i] <= 0.0) continue;
    double lr = q[i] > 0.0 ? std::log(p[i]) - std::log(q[i]) : kInf;
    atoms.push_back({p[i] > 0.0 ? lr : -kInf, p[i], q[i]});
  }
  return -std::log(detail::np_value(std::move(atoms), eta) / eta);
}

// S_H^eta(p^{(x)n} || q^{(x)n}) via type classes: all sequences in a class share
// one likelihood ratio, so the greedy runs over multinomial aggregates.
inline double sh_classical_iid(const ProbVec& p, const ProbVec& q, double eta, int n) {
  if (eta <= 0.0 || eta >= 1.0) throw ValidationError("sh_classical_iid: eta must be in (0,1)");
  if (n < 1) throw ValidationError("sh_classical_iid: n must be >= 1");
  const int d = p.dim();
  if (d != q.dim()) throw DimensionMismatch("sh_classical_iid: dims differ");
  if (d > 8) throw ValidationError("sh_classical_iid: alphabet too large (d > 8)");
  if (!support_contained(p, q))
    throw ValidationError("sh_classical_iid: supp(p) not in supp(q)");

  std::vector<detail::RatioAtom> atoms;
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  const double lg_n = std::lgamma(n + 1.0);
  // enumerate compositions of n into d parts
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == d - 1) {
      counts[static_cast<std::size_t>(pos)] = left;
      double log_mult = lg_n, lp = 0.0, lq = 0.0, lr = 0.0;
      bool p_zero = false, q_zero = false;
      for (int i = 0; i < d; ++i) {
        int k = counts[static_cast<std::size_t>(i)];
        log_mult -= std::lgamma(k + 1.0);
        if (k == 0) continue;
        if (p[i] <= 0.0) p_zero = true; else lp += k * std::log(p[i]);
        if (q[i] <= 0.0) q_zero = true; else lq += k * std::log(q[i]);
      }
      double pm = p_zero ? 0.0 : std::exp(log_mult + lp);
      double qm = q_zero ? 0.0 : std::exp(log_mult + lq);
      if (pm > 0.0 || qm > 0.0) {
        if (q_zero) lr = pm > 0.0 ? kInf : -kInf;
        else lr = p_zero ? -kInf : lp - lq;
        atoms.push_back({lr, pm, qm});
      }
      return;
    }
    for (int k = 0; k <= left; ++k) {
      counts[static_cast<std::size_t>(pos)] = k;
      rec(pos + 1, left - k);
    }
  };
  rec(0, n);
  return -std::log(detail::np_value(std::move(atoms), eta) / eta);
}

struct ShQuantumResult {
  double value = 0.0;       // S_H^eta
  double mu = 0.0;          // dual certificate: mu rho <= sigma + x
  CMat x;                   // dual slack, PSD
  double duality_gap = 0.0; // primal objective minus dual objective (>= 0)
};

// Quantum Neyman-Pearson by threshold bisection: the optimal test is the
// positive part of rho - t sigma plus a fractional weight on the boundary
// block. The threshold doubles as a dual certificate mu = 1/t, X = (rho-t
// sigma)_+ / t.
inline ShQuantumResult sh_quantum(const DensityMatrix& rho, const CMat& sigma_psd,
                                  double eta, int max_iter = 200) {
  if (eta <= 0.0 || eta >= 1.0) throw ValidationError("sh_quantum: eta must be in (0,1)");
  const int d = rho.dim();
  if (sigma_psd.rows() != d || sigma_psd.cols() != d)
    throw DimensionMismatch("sh_quantum: dims differ");
  Eigen::SelfAdjointEigenSolver<CMat> ses(sigma_psd);
  if (ses.eigenvalues().minCoeff() <= 0.0)
    throw ValidationError("sh_quantum: sigma must be positive definite");

  // p-mass captured by the strictly-positive part of rho - t sigma
  auto plus_mass = [&](double t) {
    Eigen::SelfAdjointEigenSolver<CMat> es(rho.matrix() - t * sigma_psd);
    double m = 0.0;
    for (int i = 0; i < d; ++i) {
      if (es.eigenvalues()(i) <= 0.0) continue;
      CVec v = es.eigenvectors().col(i);
      m += (v.adjoint() * rho.matrix() * v)(0, 0).real();
    }
    return m;
  };

  // t_hi above the top pencil eigenvalue empties the test
  CMat sinv_half = CMat::Zero(d, d);
  {
    Eigen::VectorXd w(d);
    for (int i = 0; i < d; ++i) w(i) = 1.0 / std::sqrt(ses.eigenvalues()(i));
    sinv_half = ses.eigenvectors() * w.asDiagonal() * ses.eigenvectors().adjoint();
  }
  Eigen::SelfAdjointEigenSolver<CMat> pencil(sinv_half * rho.matrix() * sinv_half);
  double t_lo = 0.0, t_hi = pencil.eigenvalues().maxCoeff() * (1.0 + 1e-12) + 1e-300;
  // Illinois-type false position on the monotone decreasing plus_mass - eta;
  // keeps the bracket (so jumps at eigenvalue crossings are harmless) but
  // needs far fewer eigensolves than plain bisection at large dimension.
  double f_lo = rho.trace() - eta, f_hi = -eta;
  int last_kept = 0;  // -1: lo retained, +1: hi retained
  for (int it = 0; it < max_iter && t_hi - t_lo > 1e-14 * t_hi; ++it) {
    double t = f_lo > 0.0 && f_hi < 0.0
                   ? t_lo + f_lo * (t_hi - t_lo) / (f_lo - f_hi)
                   : 0.5 * (t_lo + t_hi);
    const double margin = 1e-3 * (t_hi - t_lo);
    t = std::min(std::max(t, t_lo + margin), t_hi - margin);
    const double f = plus_mass(t) - eta;
    if (f >= 0.0) {
      t_lo = t;
      f_lo = f;
      if (last_kept == 1) f_hi *= 0.5;
      last_kept = 1;
    } else {
      t_hi = t;
      f_hi = f;
      if (last_kept == -1) f_lo *= 0.5;
      last_kept = -1;
    }
  }
  const double t = t_hi;

  // fractional greedy by likelihood ratio over the eigendirections of
  // rho - t sigma; the ordering agrees with the sign split at the threshold
  // and resolves the boundary block correctly
  Eigen::SelfAdjointEigenSolver<CMat> es(rho.matrix() - t * sigma_psd);
  std::vector<detail::RatioAtom> atoms;
  for (int i = 0; i < d; ++i) {
    CVec v = es.eigenvectors().col(i);
    double pm = (v.adjoint() * rho.matrix() * v)(0, 0).real();
    double qm = (v.adjoint() * sigma_psd * v)(0, 0).real();
    if (pm <= 0.0 && qm <= 0.0) continue;
    double lr = qm > 0.0 ? std::log(std::max(pm, 0.0)) - std::log(qm) : kInf;
    atoms.push_back({pm > 0.0 ? lr : -kInf, std::max(pm, 0.0), qm});
  }
  const double cost = detail::np_value(std::move(atoms), eta);

  ShQuantumResult out;
  out.value = -std::log(cost / eta);
  out.mu = 1.0 / t;
  CMat xpos = CMat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double lam = es.eigenvalues()(i);
    if (lam <= 0.0) continue;
    xpos += lam * (es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint());
  }
  out.x = xpos / t;
  double dual = out.mu - out.x.trace().real() / eta;  // e^{-S_H} >= eta^{-1}(eta mu - tr X)
  out.duality_gap = cost - (eta * dual >= 0.0 ? eta * dual : 0.0);
  return out;
}

inline ShQuantumResult sh_quantum(const DensityMatrix& rho, const DensityMatrix& sigma,
                                  double eta, int max_iter = 200) {
  return sh_quantum(rho, sigma.matrix(), eta, max_iter);
}

// --- Smooth 0- and infinity-divergences (classical, exact) ------------------

struct SmoothValue {
  double value = 0.0;
  bool exact = true;  // false: greedy heuristic was used (d > 20)
};

// max over tau with D(tau, p) <= eps of S_0(tau||q): choose the kept support
// Lambda minimizing q[Lambda] subject to p[complement] <= eps.
inline SmoothValue smooth_r0_classical(const ProbVec& p, const ProbVec& q, double eps) {
  if (eps < 0.0 || eps >= 1.0) throw ValidationError("smooth_r0_classical: eps in [0,1)");
  if (p.dim() != q.dim()) throw DimensionMismatch("smooth_r0_classical: dims differ");
  const int d = p.dim();
  SmoothValue out;
  if (d <= 20) {
    double best = kInf;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      double p_out = 0.0, q_in = 0.0;
      for (int i = 0; i < d; ++i) {
        if (mask & (1u << i)) q_in += q[i];
        else p_out += p[i];
      }
      if (p_out <= eps + 1e-12 && q_in < best) best = q_in;
    }
    out.value = -std::log(best);
    return out;
  }
  // heuristic: drop indices by q_i/p_i descending while the p-budget lasts
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return q[a] * p[b] > q[b] * p[a];
  });
  double budget = eps + 1e-12, q_in = 0.0;
  for (int i : order) {
    if (p[i] <= budget) budget -= p[i];
    else q_in += q[i];
  }
  out.value = -std::log(q_in);
  out.exact = false;
  return out;
}

// min over tau with D(tau, p) <= eps of S_inf(tau||q): smallest cap lambda with
// excess mass sum_i (p_i - lambda q_i)_+ <= eps; redistribution below the cap
// is feasible iff lambda >= 1.
inline double smooth_rinf_classical(const ProbVec& p, const ProbVec& q, double eps) {
  if (eps < 0.0 || eps >= 1.0) throw ValidationError("smooth_rinf_classical: eps in [0,1)");
  if (p.dim() != q.dim()) throw DimensionMismatch("smooth_rinf_classical: dims differ");
  const int d = p.dim();
  auto excess = [&](double lam) {
    double e = 0.0;
    for (int i = 0; i < d; ++i) e += std::max(p[i] - lam * q[i], 0.0);
    return e;
  };
  if (excess(1.0) <= eps + 1e-15) return 0.0;
  // breakpoints of the piecewise-linear excess
  std::vector<double> bps{1.0};
  for (int i = 0; i < d; ++i)
    if (q[i] > 0.0 && p[i] / q[i] > 1.0) bps.push_back(p[i] / q[i]);
  std::sort(bps.begin(), bps.end());
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    double e0 = excess(bps[k]), e1 = excess(bps[k + 1]);
    if (e1 <= eps + 1e-15) {
      // linear interpolation on this segment
      double lam = e0 <= eps ? bps[k]
                             : bps[k] + (bps[k + 1] - bps[k]) * (e0 - eps) / (e0 - e1);
      return std::log(std::max(lam, 1.0));
    }
  }
  // eps smaller than the residual excess at the top breakpoint: only indices
  // with q_i = 0 remain, which no finite cap removes
  throw ValidationError("smooth_rinf_classical: support violation beyond eps");
}

struct SmoothQuantumBounds {
  double r0_lo = 0.0, r0_hi = 0.0;
  double rinf_lo = 0.0, rinf_hi = 0.0;
};

// Two-sided brackets for the smooth 0- and infinity-divergences in terms of
// the hypothesis-testing divergence at pinned eta values.
inline SmoothQuantumBounds smooth_quantum_bounds(const DensityMatrix& rho,
                                                 const DensityMatrix& sigma, double eps) {
  if (eps <= 0.0 || eps >= 0.5)
    throw ValidationError("smooth_quantum_bounds: eps must be in (0, 1/2)");
  SmoothQuantumBounds b;
  const double e2_6 = eps * eps / 6.0;
  b.r0_lo = sh_quantum(rho, sigma, 1.0 - e2_6).value - std::log((1.0 - e2_6) / e2_6);
  b.r0_hi = sh_quantum(rho, sigma, 1.0 - eps).value - std::log(1.0 - eps);
  b.rinf_lo = sh_quantum(rho, sigma, 2.0 * eps).value - std::log(2.0);
  b.rinf_hi = sh_quantum(rho, sigma, eps * eps / 2.0).value - std::log(1.0 - eps);
  return b;
}

// --- Stein sweeps: finite-n proxies for divergence rates --------------------

struct SteinSweep {
  double eta = 0.5;
  std::vector<int> n_values;
  std::vector<double> rates;  // S_H^eta(n) / n
  double target = 0.0;        // the KL rate the sweep approaches
  bool converged = false;     // last rate within tolerance of target
};

namespace detail {

inline std::vector<int> sweep_grid(int n_max) {
  std::vector<int> ns;
  if (n_max <= 20) {
    for (int n = 1; n <= n_max; ++n) ns.push_back(n);
    return ns;
  }
  for (int n = 1; n <= 10; ++n) ns.push_back(n);
  double step = std::pow(static_cast<double>(n_max) / 10.0, 1.0 / 10.0);
  double cur = 10.0;
  while (static_cast<int>(cur * step) < n_max) {
    cur *= step;
    if (static_cast<int>(cur) > ns.back()) ns.push_back(static_cast<int>(cur));
  }
  ns.push_back(n_max);
  return ns;
}

}  // namespace detail

inline SteinSweep stein_sweep_classical(const ProbVec& p, const ProbVec& q, double eta,
                                        int n_max, double tol = 0.05) {
  SteinSweep sweep;
  sweep.eta = eta;
  sweep.target = kl_divergence(p, q);
  sweep.n_values = detail::sweep_grid(n_max);
  for (int n : sweep.n_values) sweep.rates.push_back(sh_classical_iid(p, q, eta, n) / n);
  sweep.converged = std::abs(sweep.rates.back() - sweep.target) <= tol;
  return sweep;
}

inline SteinSweep stein_sweep_quantum(const DensityMatrix& rho, const DensityMatrix& sigma,
                                      double eta, int n_max, double tol = 0.1) {
  if (n_max < 1) throw ValidationError("stein_sweep_quantum: n_max must be >= 1");
  double log_states = n_max * std::log(static_cast<double>(rho.dim()));
  if (log_states > std::log(1.1e3))
    throw ValidationError("stein_sweep_quantum: d^n too large (keep d^n <= 1100)");
  SteinSweep sweep;
  sweep.eta = eta;
  sweep.target = quantum_kl(rho, sigma);
  for (int n = 1; n <= n_max; ++n) sweep.n_values.push_back(n);
  CMat rn = rho.matrix(), sn = sigma.matrix();
  for (int n = 1; n <= n_max; ++n) {
    sweep.rates.push_back(sh_quantum(DensityMatrix(rn), sn, eta).value / n);
    if (n < n_max) {
      rn = tensor_c(rn, rho.matrix());
      sn = tensor_c(sn, sigma.matrix());
    }
  }
  sweep.converged = std::abs(sweep.rates.back() - sweep.target) <= tol;
  return sweep;
}

// Markov source against an i.i.d. reference: rates from the exact length-n path
// distributions, target = stationary relative entropy rate.
inline SteinSweep markov_source_sweep(const StochasticMatrix& chain, const ProbVec& pi,
                                      const ProbVec& q_iid, double eta, int n_max,
                                      double tol = 0.05) {
  const int d = chain.dim_in();
  if (pi.dim() != d || q_iid.dim() != d)
    throw DimensionMismatch("markov_source_sweep: dims differ");
  if (!q_iid.full_support())
    throw ValidationError("markov_source_sweep: q_iid must have full support");
  if ((chain.matrix() * pi.as_vector() - pi.as_vector()).lpNorm<1>() > 1e-8)
    throw ValidationError("markov_source_sweep: pi is not stationary for the chain");
  // irreducibility: every state reachable from every state
  {
    Eigen::MatrixXd reach = Eigen::MatrixXd::Identity(d, d) + chain.matrix();
    for (int k = 1; k < d; ++k) reach = reach * (Eigen::MatrixXd::Identity(d, d) + chain.matrix());
    if ((reach.array() <= 1e-14).any())
      throw ValidationError("markov_source_sweep: chain is reducible");
  }
  if (n_max * std::log(static_cast<double>(d)) > std::log(5.0e6))
    throw ValidationError("markov_source_sweep: d^n too large");

  SteinSweep sweep;
  sweep.eta = eta;
  sweep.target = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double t = chain.matrix()(j, i);
      if (t > 0.0) sweep.target += pi[i] * t * (std::log(t) - std::log(q_iid[j]));
    }

  std::vector<int> ns;
  for (int k = 1; k <= 4; ++k) {
    int n = std::max(1, k * n_max / 4);
    if (ns.empty() || n > ns.back()) ns.push_back(n);
  }
  for (int n : ns) {
    // enumerate paths; log p and log q accumulate along each path
    std::vector<detail::RatioAtom> atoms;
    std::vector<int> path(static_cast<std::size_t>(n), 0);
    std::function<void(int, double, double)> rec = [&](int pos, double lp, double lq) {
      if (pos == n) {
        double pm = std::exp(lp);
        if (pm > 0.0) atoms.push_back({lp - lq, pm, std::exp(lq)});
        return;
      }
      for (int s = 0; s < d; ++s) {
        double step = pos == 0 ? pi[s] : chain.matrix()(s, path[static_cast<std::size_t>(pos - 1)]);
        if (step <= 0.0) continue;
        path[static_cast<std::size_t>(pos)] = s;
        rec(pos + 1, lp + std::log(step), lq + std::log(q_iid[s]));
      }
    };
    rec(0, 0.0, 0.0);
    sweep.n_values.push_back(n);
    sweep.rates.push_back(-std::log(detail::np_value(std::move(atoms), eta) / eta) / n);
  }
  sweep.converged = std::abs(sweep.rates.back() - sweep.target) <= tol;
  return sweep;
}

}  // namespace majtherm
