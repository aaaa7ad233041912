#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "majtherm/majorization.hpp"
#include "majtherm/qdivergence.hpp"
#include "majtherm/quantum.hpp"

namespace majtherm {

// rho can be pushed to rho_target by a unital channel iff the spectra majorize.
inline bool q_majorizes(const DensityMatrix& rho, const DensityMatrix& rho_target,
                        double tol = kDecisionTol) {
  if (rho.dim() != rho_target.dim()) throw DimensionMismatch("q_majorizes: dims differ");
  return majorizes(rho.spectrum(), rho_target.spectrum(), tol);
}

// CPTP unital channel E with E(rho) = rho_target, built from a doubly stochastic
// matrix acting between the two eigenbases: Kraus M_ji = sqrt(T_ji)|u'_j><u_i|.
inline QuantumChannel q_majorization_witness(const DensityMatrix& rho,
                                             const DensityMatrix& rho_target) {
  if (!q_majorizes(rho, rho_target))
    throw NotMajorizedError(
        majorizes_detail(rho.spectrum(), rho_target.spectrum()).violated_k.value_or(0));
  const int d = rho.dim();
  WitnessReport rep = witness_doubly_stochastic(rho.spectrum(), rho_target.spectrum());
  const Eigen::MatrixXd& T = rep.matrix.matrix();
  const CMat& u = rho.eigenvectors();
  const CMat& v = rho_target.eigenvectors();
  std::vector<CMat> kraus;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      if (T(j, i) <= 1e-14) continue;
      kraus.push_back(std::sqrt(T(j, i)) * (v.col(j) * u.col(i).adjoint()));
    }
  return QuantumChannel(std::move(kraus));
}

// rho_target = sum_k r_k U_k rho U_k^dag with U_k = V P_k: V rotates the source
// eigenbasis onto the target one, P_k are the Birkhoff permutations of T.
inline std::vector<std::pair<double, CMat>> mixture_of_unitaries_witness(
    const DensityMatrix& rho, const DensityMatrix& rho_target) {
  if (!q_majorizes(rho, rho_target))
    throw NotMajorizedError(
        majorizes_detail(rho.spectrum(), rho_target.spectrum()).violated_k.value_or(0));
  const int d = rho.dim();
  WitnessReport rep = witness_doubly_stochastic(rho.spectrum(), rho_target.spectrum());
  const CMat& u = rho.eigenvectors();
  const CMat& v = rho_target.eigenvectors();
  CMat basis_change = v * u.adjoint();
  std::vector<std::pair<double, CMat>> out;
  for (const auto& term : birkhoff_decompose(rep.matrix)) {
    // P_k permutes the source eigenvectors: |u_j> -> |u_{col_to_row[j]}>.
    CMat p = CMat::Zero(d, d);
    for (int j = 0; j < d; ++j) p += u.col(term.col_to_row[static_cast<std::size_t>(j)]) *
                                      u.col(j).adjoint();
    out.emplace_back(term.weight, basis_change * p);
  }
  return out;
}

struct QDmajWitness {
  std::optional<QuantumChannel> channel;  // empty: existence undecided, not refuted
  double s0 = 0.0;                        // S_0(rho || sigma)
  double sinf_target = 0.0;               // S_inf(rho_target || sigma_target)
};

namespace detail {

// Kraus set for tau -> tr[P tau] * omega, with P a projector of rank r spanned
// by the columns of pbasis and omega a density matrix.
inline void measure_prepare_kraus(const CMat& pbasis, const DensityMatrix& omega,
                                  std::vector<CMat>& kraus) {
  for (Eigen::Index m = 0; m < pbasis.cols(); ++m)
    for (int k = 0; k < omega.dim(); ++k) {
      double lam = omega.eigenvalues()(k);
      if (lam <= 1e-15) continue;
      kraus.push_back(std::sqrt(lam) *
                      (omega.eigenvectors().col(k) * pbasis.col(m).adjoint()));
    }
}

// Orthonormal basis of the support of rho, and of its orthocomplement.
inline std::pair<CMat, CMat> support_split(const DensityMatrix& rho, double rank_tol_rel) {
  int r = rho.rank(rank_tol_rel);
  const CMat& u = rho.eigenvectors();
  return {u.leftCols(r), u.rightCols(rho.dim() - r)};
}

}  // namespace detail

// Measure-and-prepare sufficiency: measure {P_rho, 1-P_rho}, prepare rho_target
// on "inside" and (sigma_target - c rho_target)/(1-c) on "outside",
// c = e^{-S_0(rho||sigma)}. Constructible whenever
// S_inf(rho_target||sigma_target) <= S_0(rho||sigma); otherwise undecided.
inline QDmajWitness q_dmaj_sufficient_witness(const DensityMatrix& rho,
                                              const DensityMatrix& sigma,
                                              const DensityMatrix& rho_target,
                                              const DensityMatrix& sigma_target,
                                              double rank_tol_rel = kRankTol) {
  if (rho.dim() != sigma.dim() || rho_target.dim() != sigma_target.dim())
    throw DimensionMismatch("q_dmaj_sufficient_witness: dims differ");
  QDmajWitness out;
  out.s0 = q_renyi_0(rho, sigma, rank_tol_rel);
  out.sinf_target = q_renyi_inf(rho_target, sigma_target, rank_tol_rel);
  if (out.sinf_target > out.s0 + 1e-10) return out;  // sufficiency test fails

  auto [inside, outside] = detail::support_split(rho, rank_tol_rel);
  const double c = std::exp(-out.s0);
  std::vector<CMat> kraus;
  detail::measure_prepare_kraus(inside, rho_target, kraus);
  if (outside.cols() > 0) {
    DensityMatrix rest = [&] {
      if (c >= 1.0 - 1e-12)  // c = 1: sigma supported inside, preparation trivial
        return rho_target;
      CMat m = (sigma_target.matrix() - c * rho_target.matrix()) / (1.0 - c);
      return DensityMatrix(std::move(m));
    }();
    detail::measure_prepare_kraus(outside, rest, kraus);
  }
  out.channel = QuantumChannel(std::move(kraus));
  return out;
}

// System + two-level clock + two-level work storage. Index order S x C x W,
// row = (s*2 + c)*2 + w; W levels are (E_i, E_f) with E_i - E_f = w, E_f = 0.
struct SCWComposite {
  int d_s = 0;
  double w = 0.0;
  double beta = 1.0;
  CMat hamiltonian;        // H_S x |0><0| + H_S' x |1><1| + H_W
  DensityMatrix gibbs{CMat::Identity(1, 1)};  // Gibbs state of the composite Hamiltonian
  double z_s = 0.0, z_s_target = 0.0, z_w = 0.0;
  double delta_f = 0.0;    // F_S' - F_S

  // Lift a system state with clock at |c> and work storage at level |wlvl>.
  CMat embed(const DensityMatrix& rho_s, int c, int wlvl) const {
    CMat clock = CMat::Zero(2, 2);
    clock(c, c) = 1.0;
    CMat work = CMat::Zero(2, 2);
    work(wlvl, wlvl) = 1.0;
    return tensor_c(tensor_c(rho_s.matrix(), clock), work);
  }
};

inline SCWComposite build_scw(const QGibbsSpec& spec_s, const QGibbsSpec& spec_s_target,
                              double w) {
  if (spec_s.dim() != spec_s_target.dim())
    throw DimensionMismatch("build_scw: system dims differ");
  if (spec_s.beta != spec_s_target.beta || spec_s.beta <= 0.0)
    throw ValidationError("build_scw: shared beta > 0 required");
  SCWComposite out;
  out.d_s = spec_s.dim();
  out.w = w;
  out.beta = spec_s.beta;
  const int d = out.d_s;
  CMat p0 = CMat::Zero(2, 2), p1 = CMat::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  CMat hw = CMat::Zero(2, 2);
  hw(0, 0) = w;  // E_i = w, E_f = 0
  CMat i2 = CMat::Identity(2, 2), id = CMat::Identity(d, d);
  out.hamiltonian = tensor_c(tensor_c(spec_s.hamiltonian, p0), i2) +
                    tensor_c(tensor_c(spec_s_target.hamiltonian, p1), i2) +
                    tensor_c(tensor_c(id, i2), hw);
  out.gibbs = QGibbsSpec(out.hamiltonian, out.beta).state();
  out.z_s = spec_s.z();
  out.z_s_target = spec_s_target.z();
  out.z_w = std::exp(-out.beta * w) + 1.0;
  out.delta_f = *spec_s_target.free_energy() - *spec_s.free_energy();
  return out;
}

struct SingleShotWorkVerdict {
  bool necessary_alpha0 = false;
  bool necessary_alpha1 = false;
  bool necessary_alphainf = false;
  bool sufficient = false;
};

inline SingleShotWorkVerdict single_shot_work_verdict(const DensityMatrix& rho,
                                                      const DensityMatrix& rho_target,
                                                      const QGibbsSpec& spec_s,
                                                      const QGibbsSpec& spec_s_target,
                                                      double w) {
  if (spec_s.beta != spec_s_target.beta || spec_s.beta <= 0.0)
    throw ValidationError("single_shot_work_verdict: shared beta > 0 required");
  const double beta = spec_s.beta;
  DensityMatrix g = spec_s.state(), gt = spec_s_target.state();
  const double df = *spec_s_target.free_energy() - *spec_s.free_energy();
  const double budget = beta * (w - df);
  auto ok = [&](double gap) { return budget >= gap - kDecisionTol; };
  SingleShotWorkVerdict v;
  v.necessary_alpha0 = ok(q_renyi_0(rho_target, gt) - q_renyi_0(rho, g));
  v.necessary_alpha1 = ok(quantum_kl(rho_target, gt) - quantum_kl(rho, g));
  v.necessary_alphainf = ok(q_renyi_inf(rho_target, gt) - q_renyi_inf(rho, g));
  v.sufficient = ok(q_renyi_inf(rho_target, gt) - q_renyi_0(rho, g));
  return v;
}

// F_alpha(rho; H) = beta^{-1} S_alpha(rho || rho^G) + F, alpha in {0, 1, inf};
// cross-checked internally against the unnormalized form
// beta^{-1} S_alpha(rho || e^{-beta H}).
inline double alpha_free_energy_q(const DensityMatrix& rho, const QGibbsSpec& spec,
                                  double alpha) {
  if (spec.beta <= 0.0) throw ValidationError("alpha_free_energy_q: beta <= 0");
  if (rho.dim() != spec.dim()) throw DimensionMismatch("alpha_free_energy_q: dims differ");
  DensityMatrix g = spec.state();
  double s;
  double s_unnorm;  // S_alpha(rho || e^{-beta H}), evaluated directly
  Eigen::SelfAdjointEigenSolver<CMat> hes(spec.hamiltonian);
  if (alpha == 0.0) {
    s = q_renyi_0(rho, g);
    CMat p = rho.support_projector();
    Eigen::VectorXd wts(spec.dim());
    for (int i = 0; i < spec.dim(); ++i) wts(i) = std::exp(-spec.beta * hes.eigenvalues()(i));
    CMat weight = hes.eigenvectors() * wts.asDiagonal() * hes.eigenvectors().adjoint();
    s_unnorm = -std::log((p * weight).trace().real());
  } else if (alpha == 1.0) {
    s = quantum_kl(rho, g);
    double energy = (rho.matrix() * spec.hamiltonian).trace().real();
    s_unnorm = -von_neumann(rho) + spec.beta * energy;
  } else if (std::isinf(alpha) && alpha > 0.0) {
    s = q_renyi_inf(rho, g);
    Eigen::VectorXd half(spec.dim());
    for (int i = 0; i < spec.dim(); ++i)
      half(i) = std::exp(0.5 * spec.beta * hes.eigenvalues()(i));
    CMat boost = hes.eigenvectors() * half.asDiagonal() * hes.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> es(boost * rho.matrix() * boost);
    s_unnorm = std::log(es.eigenvalues().maxCoeff());
  } else {
    throw ValidationError("alpha_free_energy_q: alpha must be 0, 1, or inf");
  }
  const double f = *spec.free_energy();
  double via_unnorm = s_unnorm / spec.beta;  // = (S_alpha(rho||g) - ln Z) / beta
  double via_gibbs = s / spec.beta + f;
  if (std::isfinite(s) && std::abs(via_unnorm - via_gibbs) > 1e-8)
    throw ValidationError("alpha_free_energy_q: scaling cross-check failed");
  return via_gibbs;
}

// Fixed qubit instance of a Gibbs-preserving map that no thermal operation can
// reproduce: it sends |1> to |+>, creating energy-basis coherence.
struct CoherenceGapInstance {
  QGibbsSpec spec;
  QuantumChannel channel;
  DensityMatrix input;   // |1><1|
  DensityMatrix output;  // |+><+|
};

inline CoherenceGapInstance coherence_gap_instance(double e1 = 1.0, double beta = 1.0) {
  CMat h = CMat::Zero(2, 2);
  h(1, 1) = e1;
  QGibbsSpec spec(h, beta);
  DensityMatrix g = spec.state();
  const double p0 = g.matrix()(0, 0).real(), p1 = g.matrix()(1, 1).real();
  CMat plus = CMat::Constant(2, 2, 0.5);
  CMat sig = (g.matrix() - p1 * plus) / p0;
  DensityMatrix sigma{std::move(sig)};
  DensityMatrix plus_state{CMat(plus)};
  // E(tau) = <0|tau|0> sigma + <1|tau|1> |+><+|, via measure-and-prepare Kraus.
  std::vector<CMat> kraus;
  CMat b0 = CMat::Zero(2, 1), b1 = CMat::Zero(2, 1);
  b0(0, 0) = 1.0;
  b1(1, 0) = 1.0;
  detail::measure_prepare_kraus(b0, sigma, kraus);
  detail::measure_prepare_kraus(b1, plus_state, kraus);
  CMat one = CMat::Zero(2, 2);
  one(1, 1) = 1.0;
  return {std::move(spec), QuantumChannel(std::move(kraus)), DensityMatrix{std::move(one)},
          std::move(plus_state)};
}

}  // namespace majtherm
