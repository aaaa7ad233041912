#pragma once

#include <variant>
#include <vector>

#include "majtherm/divergence.hpp"
#include "majtherm/majorization.hpp"
#include "majtherm/prob.hpp"

namespace majtherm {

// Instantaneous Hamiltonian change with the state frozen; costs work.
struct Quench {
  std::vector<double> energies;
};

// Stochastic map applied at fixed Hamiltonian; exchanges heat. Must preserve
// the Gibbs state of the Hamiltonian in force.
struct Relax {
  StochasticMatrix T;
};

using ProtocolStep = std::variant<Quench, Relax>;

struct Protocol {
  std::vector<ProtocolStep> steps;
  double beta = 1.0;
};

struct ProtocolReport {
  double work = 0.0;   // performed on the system; negative = extracted
  double heat = 0.0;   // absorbed by the system
  double delta_S1 = 0.0;
  double sigma = 0.0;  // entropy production, delta_S1 - beta * heat
  std::vector<ProbVec> trajectory;
  std::vector<double> final_energies;
};

// Rank-one map sending everything to g: full thermalization.
inline StochasticMatrix full_relaxation(const ProbVec& g) {
  Eigen::MatrixXd T(g.dim(), g.dim());
  for (int j = 0; j < g.dim(); ++j) T.col(j) = g.as_vector();
  return StochasticMatrix(std::move(T));
}

// Sigma = S_1(p||p^G) - S_1(Tp||p^G) for a Gibbs-preserving T.
inline double entropy_production(const ProbVec& p, const StochasticMatrix& T,
                                 const GibbsSpec& gibbs) {
  ProbVec g = gibbs.state();
  if (!T.preserves(g, 1e-9))
    throw ValidationError("entropy_production: T does not preserve the Gibbs state");
  return kl_divergence(p, g) - kl_divergence(apply_stochastic(T, p), g);
}

// F_alpha(p; H) = beta^-1 S_alpha(p||p^G) + F. Requires beta > 0.
inline double noneq_free_energy(const ProbVec& p, const GibbsSpec& gibbs, double alpha) {
  auto F = gibbs.free_energy();
  if (!F) throw ValidationError("noneq_free_energy: undefined at beta = 0");
  return renyi_divergence(p, gibbs.state(), alpha) / gibbs.beta + *F;
}

inline ProtocolReport simulate_protocol(const Protocol& proto, const ProbVec& p0,
                                        std::vector<double> E0) {
  if (static_cast<int>(E0.size()) != p0.dim())
    throw DimensionMismatch("simulate_protocol: energies vs state");
  ProtocolReport rep;
  ProbVec p = p0;
  std::vector<double> E = std::move(E0);
  rep.trajectory.push_back(p);
  auto mean_energy = [](const ProbVec& s, const std::vector<double>& e) {
    double v = 0.0;
    for (int i = 0; i < s.dim(); ++i) v += e[static_cast<std::size_t>(i)] * s[i];
    return v;
  };
  const double S_start = shannon_entropy(p0);
  for (const ProtocolStep& step : proto.steps) {
    if (const Quench* q = std::get_if<Quench>(&step)) {
      if (q->energies.size() != E.size())
        throw DimensionMismatch("simulate_protocol: quench changes the dimension");
      for (int i = 0; i < p.dim(); ++i)
        rep.work += (q->energies[static_cast<std::size_t>(i)] - E[static_cast<std::size_t>(i)]) * p[i];
      E = q->energies;
    } else {
      const Relax& r = std::get<Relax>(step);
      GibbsSpec spec(E, proto.beta);
      if (!r.T.preserves(spec.state(), 1e-9))
        throw ValidationError("simulate_protocol: relax step is not Gibbs-preserving");
      ProbVec next = apply_stochastic(r.T, p);
      rep.heat += mean_energy(next, E) - mean_energy(p, E);
      p = next;
    }
    rep.trajectory.push_back(p);
  }
  rep.delta_S1 = shannon_entropy(p) - S_start;
  rep.sigma = rep.delta_S1 - proto.beta * rep.heat;
  rep.final_energies = E;
  return rep;
}

// Mean and variance of the fluctuating work, propagated exactly: conditional
// moments of accumulated work given the current level, updated through each
// quench (deterministic shift) and relax (Markov mixing).
struct WorkMoments {
  double mean = 0.0;
  double variance = 0.0;
};

inline WorkMoments work_moments(const Protocol& proto, const ProbVec& p0,
                                std::vector<double> E0) {
  const int d = p0.dim();
  Eigen::VectorXd p = p0.as_vector();
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(d), m2 = Eigen::VectorXd::Zero(d);
  std::vector<double> E = std::move(E0);
  for (const ProtocolStep& step : proto.steps) {
    if (const Quench* q = std::get_if<Quench>(&step)) {
      for (int i = 0; i < d; ++i) {
        double di = q->energies[static_cast<std::size_t>(i)] - E[static_cast<std::size_t>(i)];
        m2(i) += 2.0 * di * m1(i) + di * di;
        m1(i) += di;
      }
      E = q->energies;
    } else {
      const Relax& r = std::get<Relax>(step);
      Eigen::VectorXd pn = r.T.matrix() * p;
      Eigen::VectorXd n1 = Eigen::VectorXd::Zero(d), n2 = Eigen::VectorXd::Zero(d);
      for (int j = 0; j < d; ++j) {
        if (pn(j) <= 0.0) continue;
        for (int i = 0; i < d; ++i) {
          double wgt = r.T(j, i) * p(i) / pn(j);
          n1(j) += wgt * m1(i);
          n2(j) += wgt * m2(i);
        }
      }
      p = pn;
      m1 = n1;
      m2 = n2;
    }
  }
  double M1 = p.dot(m1), M2 = p.dot(m2);
  return {M1, std::max(M2 - M1 * M1, 0.0)};
}

// Three-stage reversible transformation: quench onto the Hamiltonian whose
// Gibbs state is p, drag it quasi-statically (N quench+thermalize steps) onto
// the one whose Gibbs state is p_target, quench to the final Hamiltonian.
// Work approaches F_1(p_target; E_target) - F_1(p; E) as N grows.
inline Protocol optimal_fluctuating_protocol(const ProbVec& p, const ProbVec& p_target,
                                             const std::vector<double>& E,
                                             const std::vector<double>& E_target, double beta,
                                             int N) {
  if (!p.full_support() || !p_target.full_support())
    throw ValidationError("optimal_fluctuating_protocol: states must have full rank");
  if (beta <= 0.0 || N < 1) throw ValidationError("optimal_fluctuating_protocol: bad beta or N");
  const int d = p.dim();
  if (p_target.dim() != d || static_cast<int>(E.size()) != d ||
      static_cast<int>(E_target.size()) != d)
    throw DimensionMismatch("optimal_fluctuating_protocol: dims differ");
  std::vector<double> Ea(static_cast<std::size_t>(d)), Eb(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Ea[static_cast<std::size_t>(i)] = -std::log(p[i]) / beta;
    Eb[static_cast<std::size_t>(i)] = -std::log(p_target[i]) / beta;
  }
  Protocol proto;
  proto.beta = beta;
  proto.steps.emplace_back(Quench{Ea});
  for (int k = 1; k <= N; ++k) {
    std::vector<double> Ek(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      Ek[static_cast<std::size_t>(i)] =
          Ea[static_cast<std::size_t>(i)] +
          (Eb[static_cast<std::size_t>(i)] - Ea[static_cast<std::size_t>(i)]) * k / N;
    proto.steps.emplace_back(Quench{Ek});
    proto.steps.emplace_back(Relax{full_relaxation(GibbsSpec(Ek, beta).state())});
  }
  proto.steps.emplace_back(Quench{std::vector<double>(E_target)});
  return proto;
}

struct SingleShotExtraction {
  double w_extract = 0.0;  // beta^-1 S_0(p || p^G)
  Protocol protocol;
};

// Raise the unoccupied levels to a high cap for free, thermalize, then drag
// the Hamiltonian quasi-statically back. Simulated work tends to -w_extract
// as the cap and N grow; the cap at E_max + 40/beta keeps the truncation
// error below e^-40.
inline SingleShotExtraction single_shot_extraction(const ProbVec& p, const GibbsSpec& gibbs,
                                                   int N = 64) {
  if (gibbs.beta <= 0.0) throw ValidationError("single_shot_extraction: needs beta > 0");
  if (p.dim() != gibbs.dim()) throw DimensionMismatch("single_shot_extraction: dims differ");
  SingleShotExtraction out;
  out.w_extract = renyi_divergence(p, gibbs.state(), 0.0) / gibbs.beta;

  const double cap =
      *std::max_element(gibbs.energies.begin(), gibbs.energies.end()) + 40.0 / gibbs.beta;
  std::vector<double> capped = gibbs.energies;
  for (int i = 0; i < p.dim(); ++i)
    if (p[i] <= 0.0) capped[static_cast<std::size_t>(i)] = cap;

  Protocol proto;
  proto.beta = gibbs.beta;
  proto.steps.emplace_back(Quench{capped});
  proto.steps.emplace_back(Relax{full_relaxation(GibbsSpec(capped, gibbs.beta).state())});
  for (int k = 1; k <= N; ++k) {
    std::vector<double> Ek(capped.size());
    for (std::size_t i = 0; i < capped.size(); ++i)
      Ek[i] = capped[i] + (gibbs.energies[i] - capped[i]) * k / N;
    proto.steps.emplace_back(Quench{Ek});
    proto.steps.emplace_back(Relax{full_relaxation(GibbsSpec(Ek, gibbs.beta).state())});
  }
  out.protocol = std::move(proto);
  return out;
}

struct WorkAssistedVerdict {
  bool composite = false;            // thermo-majorization of the clock+battery composite
  bool analytic_necessary = false;   // alpha in {0, 1, inf} free-energy inequalities
  bool analytic_sufficient = false;  // S_inf(target) - S_0(initial) bound
};

// Can p (under `gibbs`) be transformed into p_target (under `gibbs_target`)
// at work cost w (negative w = extraction)? The exact criterion couples the
// system to a two-level battery (up level at energy w, occupied initially)
// and, when the Hamiltonians differ, a two-state clock, then asks for
// thermo-majorization of the composite.
inline WorkAssistedVerdict w_assisted_transformable(const ProbVec& p, const GibbsSpec& gibbs,
                                                    const ProbVec& p_target,
                                                    const GibbsSpec& gibbs_target, double w) {
  const double beta = gibbs.beta;
  if (beta <= 0.0 || gibbs_target.beta != beta)
    throw ValidationError("w_assisted_transformable: needs a shared positive beta");
  if (p.dim() != gibbs.dim() || p_target.dim() != gibbs_target.dim())
    throw DimensionMismatch("w_assisted_transformable: state vs spec dims");

  ProbVec gS = gibbs.state(), gT = gibbs_target.state();
  const bool same_h = gibbs.energies == gibbs_target.energies;

  // Battery: index 0 = charged (energy w), 1 = empty (energy 0).
  const double zw = std::exp(-beta * w) + 1.0;
  ProbVec battery_gibbs({std::exp(-beta * w) / zw, 1.0 / zw});
  ProbVec charged = ProbVec::point_mass(2, 0), empty = ProbVec::point_mass(2, 1);

  ProbVec init = tensor(p, charged), fin = tensor(p_target, empty);
  ProbVec gibbs_comp = tensor(gS, battery_gibbs);
  if (same_h) {
    WorkAssistedVerdict v;
    v.composite = d_majorizes(init, gibbs_comp, fin, gibbs_comp);
    double dF = 0.0;
    v.analytic_necessary = true;
    for (double al : {0.0, 1.0, kInf})
      v.analytic_necessary =
          v.analytic_necessary &&
          (beta * (w - dF) >= renyi_divergence(p_target, gT, al) - renyi_divergence(p, gS, al) -
                                  kDecisionTol);
    v.analytic_sufficient = beta * (w - dF) >= renyi_divergence(p_target, gT, kInf) -
                                                   renyi_divergence(p, gS, 0.0) - kDecisionTol;
    return v;
  }

  // Clock composite: system-with-clock lives on d + d' levels whose joint
  // Gibbs state mixes the two spectra with weights Z and Z'.
  const double Z = gibbs.z(), Zt = gibbs_target.z();
  std::vector<double> gsc, pin, pfin;
  for (int i = 0; i < p.dim(); ++i) {
    gsc.push_back(Z / (Z + Zt) * gS[i]);
    pin.push_back(p[i]);
    pfin.push_back(0.0);
  }
  for (int i = 0; i < p_target.dim(); ++i) {
    gsc.push_back(Zt / (Z + Zt) * gT[i]);
    pin.push_back(0.0);
    pfin.push_back(p_target[i]);
  }
  ProbVec gibbs_sc(std::move(gsc), true), p_in(std::move(pin)), p_fin(std::move(pfin));
  ProbVec init2 = tensor(p_in, charged), fin2 = tensor(p_fin, empty);
  ProbVec gibbs_comp2 = tensor(gibbs_sc, battery_gibbs);

  WorkAssistedVerdict v;
  v.composite = d_majorizes(init2, gibbs_comp2, fin2, gibbs_comp2);
  const double dF = *gibbs_target.free_energy() - *gibbs.free_energy();
  v.analytic_necessary = true;
  for (double al : {0.0, 1.0, kInf})
    v.analytic_necessary =
        v.analytic_necessary &&
        (beta * (w - dF) >= renyi_divergence(p_target, gT, al) - renyi_divergence(p, gS, al) -
                                kDecisionTol);
  v.analytic_sufficient = beta * (w - dF) >= renyi_divergence(p_target, gT, kInf) -
                                                 renyi_divergence(p, gS, 0.0) - kDecisionTol;
  return v;
}

}  // namespace majtherm
