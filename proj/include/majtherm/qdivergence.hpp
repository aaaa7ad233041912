#pragma once

#include "majtherm/divergence.hpp"
#include "majtherm/fisher.hpp"
#include "majtherm/quantum.hpp"

namespace majtherm {

inline double von_neumann(const DensityMatrix& rho) { return shannon_entropy(rho.spectrum()); }

// Default relative cutoff for support projectors. S_0 is discontinuous in
// this choice, so it is exposed as a parameter everywhere it matters.
inline constexpr double kRankTol = 1e-10;

inline bool support_contained_q(const DensityMatrix& rho, const DensityMatrix& sigma,
                                double tol = 1e-9, double rank_tol = kRankTol) {
  CMat pk = CMat::Identity(sigma.dim(), sigma.dim()) - sigma.support_projector(rank_tol);
  return (pk * rho.matrix() * pk).trace().real() <= tol;
}

// S_1(rho||sigma) = tr[rho ln rho] - tr[rho ln sigma].
inline double quantum_kl(const DensityMatrix& rho, const DensityMatrix& sigma,
                         double rank_tol = kRankTol) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("quantum_kl: dims differ");
  double cut = rank_tol * std::max(sigma.eigenvalues()(0), 1e-300);
  double s = 0.0;
  for (int i = 0; i < rho.dim(); ++i) s += xlogx(rho.eigenvalues()(i));
  for (int j = 0; j < sigma.dim(); ++j) {
    double qj = sigma.eigenvalues()(j);
    double w = (sigma.eigenvectors().col(j).adjoint() * rho.matrix() *
                sigma.eigenvectors().col(j))(0, 0)
                   .real();
    if (qj <= cut) {
      if (w > 1e-12) return kInf;
      continue;
    }
    s -= w * std::log(qj);
  }
  return std::max(s, 0.0);
}

// S_0(rho||sigma) = -ln tr[P_rho sigma].
inline double q_renyi_0(const DensityMatrix& rho, const DensityMatrix& sigma,
                        double rank_tol = kRankTol) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("q_renyi_0: dims differ");
  double mass = (rho.support_projector(rank_tol) * sigma.matrix()).trace().real();
  return mass > 0.0 ? std::max(-std::log(mass), 0.0) : kInf;
}

// S_inf(rho||sigma) = ln || sigma^{-1/2} rho sigma^{-1/2} ||_inf on supp(sigma).
inline double q_renyi_inf(const DensityMatrix& rho, const DensityMatrix& sigma,
                          double rank_tol = kRankTol) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("q_renyi_inf: dims differ");
  if (!support_contained_q(rho, sigma, 1e-9, rank_tol)) return kInf;
  CMat si = sigma.spectral_fn([](double x) { return 1.0 / std::sqrt(x); }, rank_tol);
  Eigen::SelfAdjointEigenSolver<CMat> es(si * rho.matrix() * si);
  return std::max(std::log(es.eigenvalues().maxCoeff()), 0.0);
}

inline bool petz_monotonicity_guaranteed(double alpha) { return alpha >= 0.0 && alpha <= 2.0; }

// Petz-Renyi S_alpha(rho||sigma) = (alpha-1)^-1 ln tr[rho^alpha sigma^{1-alpha}],
// computed through the double spectral sum. Monotonicity is only guaranteed
// for alpha in [0,2] (see petz_monotonicity_guaranteed).
inline double petz_renyi(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha,
                         double rank_tol = kRankTol) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("petz_renyi: dims differ");
  if (alpha < 0.0) throw ValidationError("petz_renyi: alpha < 0 unsupported");
  if (alpha == 0.0) return q_renyi_0(rho, sigma, rank_tol);
  if (alpha == 1.0) return quantum_kl(rho, sigma, rank_tol);
  if (alpha > 1.0 && !support_contained_q(rho, sigma, 1e-9, rank_tol)) return kInf;
  const double pcut = rank_tol * std::max(rho.eigenvalues()(0), 1e-300);
  const double qcut = rank_tol * std::max(sigma.eigenvalues()(0), 1e-300);
  std::vector<double> terms;
  for (int i = 0; i < rho.dim(); ++i) {
    double p = rho.eigenvalues()(i);
    if (p <= pcut) continue;
    for (int j = 0; j < sigma.dim(); ++j) {
      double q = sigma.eigenvalues()(j);
      if (q <= qcut) continue;
      double ov = std::norm((sigma.eigenvectors().col(j).adjoint() * rho.eigenvectors().col(i))(0, 0));
      if (ov <= 0.0) continue;
      terms.push_back(alpha * std::log(p) + (1.0 - alpha) * std::log(q) + std::log(ov));
    }
  }
  if (terms.empty()) return kInf;
  double v = log_sum_exp(terms) / (alpha - 1.0);
  return std::max(v, 0.0);
}

// Sandwiched Renyi divergence; alpha = 1/2 is -2 ln F, alpha -> 1 the quantum
// KL, alpha = inf the max-divergence.
inline double sandwiched_renyi(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha,
                               double rank_tol = kRankTol) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("sandwiched_renyi: dims differ");
  if (alpha < 0.5) throw ValidationError("sandwiched_renyi: needs alpha >= 1/2");
  if (alpha == 1.0) return quantum_kl(rho, sigma, rank_tol);
  if (std::isinf(alpha)) return q_renyi_inf(rho, sigma, rank_tol);
  if (alpha > 1.0 && !support_contained_q(rho, sigma, 1e-9, rank_tol)) return kInf;
  const double expo = (1.0 - alpha) / (2.0 * alpha);
  CMat sp = sigma.spectral_fn([expo](double x) { return std::pow(x, expo); }, rank_tol);
  Eigen::SelfAdjointEigenSolver<CMat> es(sp * rho.matrix() * sp);
  std::vector<double> terms;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()(i);
    if (lam > 0.0) terms.push_back(alpha * std::log(lam));
  }
  if (terms.empty()) return kInf;
  return std::max(log_sum_exp(terms) / (alpha - 1.0), 0.0);
}

// Relative modular operator D_{rho,sigma} held through the two spectral
// decompositions; enough to evaluate f(D) sandwiches.
struct ModularAction {
  Eigen::VectorXd p, q;
  CMat pu, qu;  // eigenvector columns of rho and sigma

  ModularAction(const DensityMatrix& rho, const DensityMatrix& sigma)
      : p(rho.eigenvalues()), q(sigma.eigenvalues()), pu(rho.eigenvectors()),
        qu(sigma.eigenvectors()) {}

  // f(D_{rho,sigma})(X) = sum_ij f(p_i/q_j) P_i X Q_j over supp(sigma).
  CMat apply(const ConvexFnSpec& f, const CMat& x) const {
    const int d = static_cast<int>(p.size());
    CMat out = CMat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      CMat pi = pu.col(i) * pu.col(i).adjoint();
      for (int j = 0; j < d; ++j) {
        if (q(j) <= 0.0) continue;
        out += f(p(i) / q(j)) * (pi * x * (qu.col(j) * qu.col(j).adjoint()));
      }
    }
    return out;
  }

  // <sigma^{1/2}, f(D) sigma^{1/2}> = sum_ij q_j f(p_i/q_j) |<u_i|v_j>|^2.
  double quasi_entropy(const ConvexFnSpec& f) const {
    const int d = static_cast<int>(p.size());
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (q(j) <= 0.0) continue;
        double ov = std::norm((qu.col(j).adjoint() * pu.col(i))(0, 0));
        if (ov <= 0.0) continue;
        double val = f(p(i) / q(j));
        if (std::isinf(val)) return kInf;
        s += q(j) * val * ov;
      }
    return s;
  }
};

// D_f(rho||sigma) = sum_ij q_j f(p_i/q_j) tr[P_i Q_j]; sigma must be positive
// definite, and f(0) must be finite when rho is rank-deficient.
inline double petz_quasi_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                                 const ConvexFnSpec& f) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("petz_quasi_entropy: dims differ");
  if (sigma.eigenvalues().minCoeff() <= 0.0)
    throw ValidationError("petz_quasi_entropy: sigma must be positive definite");
  if (rho.eigenvalues().minCoeff() <= kRankTol * rho.eigenvalues().maxCoeff() &&
      std::isinf(f.f_at_0))
    throw ValidationError("petz_quasi_entropy: f(0) infinite on rank-deficient rho");
  return ModularAction(rho, sigma).quasi_entropy(f);
}

// --- Quantum Fisher information ----------------------------------------------

struct QParamFamily {
  std::function<DensityMatrix(const std::vector<double>&)> state_at;
  int m = 1;
  double fd_step = 1e-5;
};

enum class FisherKind { SLD, RLD };

namespace detail {

inline std::vector<CMat> q_family_jacobian(const QParamFamily& fam,
                                           const std::vector<double>& theta, int dim) {
  std::vector<CMat> dp;
  const double h = fam.fd_step;
  for (int k = 0; k < fam.m; ++k) {
    auto diff_at = [&](double step) -> CMat {
      std::vector<double> tp = theta, tm = theta;
      tp[static_cast<std::size_t>(k)] += step;
      tm[static_cast<std::size_t>(k)] -= step;
      return (fam.state_at(tp).matrix() - fam.state_at(tm).matrix()) / (2.0 * step);
    };
    dp.push_back(((4.0 * diff_at(h / 2.0) - diff_at(h)) / 3.0).eval());
    (void)dim;
  }
  return dp;
}

}  // namespace detail

// SLD: J_kl = Re tr[(d_k rho) L_l] with L solving d rho = (rho L + L rho)/2,
// solved spectrally: L_ab = 2 (d rho)_ab / (p_a + p_b).
// RLD: J_kl = Hermitian part of tr[(d_k rho)(d_l rho) rho^{-1}].
inline Eigen::MatrixXd quantum_fisher(const QParamFamily& fam, const std::vector<double>& theta,
                                      FisherKind kind) {
  DensityMatrix rho = fam.state_at(theta);
  const int d = rho.dim();
  if (rho.eigenvalues().minCoeff() <= 1e-12)
    throw ValidationError("quantum_fisher: rho(theta) must be positive definite");
  std::vector<CMat> dp = detail::q_family_jacobian(fam, theta, d);
  const CMat& v = rho.eigenvectors();
  const Eigen::VectorXd& lam = rho.eigenvalues();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(fam.m, fam.m);
  if (kind == FisherKind::SLD) {
    std::vector<CMat> L;
    for (int k = 0; k < fam.m; ++k) {
      CMat de = v.adjoint() * dp[static_cast<std::size_t>(k)] * v;
      CMat le(d, d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) le(a, b) = 2.0 * de(a, b) / (lam(a) + lam(b));
      L.push_back(v * le * v.adjoint());
    }
    for (int k = 0; k < fam.m; ++k)
      for (int l = k; l < fam.m; ++l)
        J(k, l) = J(l, k) = (dp[static_cast<std::size_t>(k)] * L[static_cast<std::size_t>(l)])
                                .trace()
                                .real();
  } else {
    CMat rinv = rho.spectral_fn([](double x) { return 1.0 / x; }, 0.0);
    for (int k = 0; k < fam.m; ++k)
      for (int l = k; l < fam.m; ++l)
        J(k, l) = J(l, k) =
            (dp[static_cast<std::size_t>(k)] * dp[static_cast<std::size_t>(l)] * rinv)
                .trace()
                .real();
  }
  return J;
}

}  // namespace majtherm
