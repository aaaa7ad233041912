// Command-line front end: JSON in, JSON out, optional CSV artifacts.
// Exit codes: 0 = success, 1 = computational negative (e.g. "not majorized"),
// 2 = input or validation error. Stochastic matrices are column-stochastic
// (columns sum to one); the map acts as p' = T p.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "majtherm/catalysis.hpp"
#include "majtherm/divergence.hpp"
#include "majtherm/io.hpp"
#include "majtherm/majorization.hpp"
#include "majtherm/prob.hpp"
#include "majtherm/qdivergence.hpp"
#include "majtherm/qmajorization.hpp"
#include "majtherm/quantum.hpp"
#include "majtherm/smoothing.hpp"
#include "majtherm/thermo.hpp"

namespace {

using majtherm::io::json;
using namespace majtherm;

void emit(const json& j) { std::cout << j.dump() << "\n"; }

[[noreturn]] void fail(const std::string& code, const std::string& message) {
  emit(json{{"error", {{"code", code}, {"message", message}}}});
  std::exit(2);
}

ProbVec load_prob(const std::string& path, bool normalize) {
  return io::prob_from_json(io::load_json(path), normalize);
}

DensityMatrix load_density(const std::string& path) {
  return io::density_from_json(io::load_json(path));
}

// --- majorize / dmajorize / lorenz ------------------------------------------

int cmd_majorize_check(const std::string& p_path, const std::string& q_path, bool normalize) {
  ProbVec p = load_prob(p_path, normalize), q = load_prob(q_path, normalize);
  MajorizationVerdict v = majorizes_detail(p, q);
  json out{{"majorizes", v.holds}};
  if (!v.holds && v.violated_k) out["violated_k"] = *v.violated_k;
  emit(out);
  return v.holds ? 0 : 1;
}

int cmd_majorize_witness(const std::string& p_path, const std::string& q_path, bool normalize) {
  ProbVec p = load_prob(p_path, normalize), q = load_prob(q_path, normalize);
  try {
    WitnessReport w = witness_doubly_stochastic(p, q);
    emit(json{{"majorizes", true},
              {"matrix", io::dmatrix_to_json(w.matrix.matrix())},
              {"residual", w.residual_p}});
    return 0;
  } catch (const NotMajorizedError& e) {
    emit(json{{"majorizes", false}, {"violated_k", e.violated_k}});
    return 1;
  }
}

int cmd_dmajorize_check(const std::string& p_path, const std::string& q_path,
                        const std::string& pt_path, const std::string& qt_path, bool normalize) {
  ProbVec p = load_prob(p_path, normalize), q = load_prob(q_path, normalize);
  ProbVec pt = load_prob(pt_path, normalize), qt = load_prob(qt_path, normalize);
  const bool ok = d_majorizes(p, q, pt, qt);
  emit(json{{"d_majorizes", ok}});
  return ok ? 0 : 1;
}

int cmd_dmajorize_witness(const std::string& p_path, const std::string& q_path,
                          const std::string& pt_path, const std::string& qt_path, bool normalize) {
  ProbVec p = load_prob(p_path, normalize), q = load_prob(q_path, normalize);
  ProbVec pt = load_prob(pt_path, normalize), qt = load_prob(qt_path, normalize);
  try {
    WitnessReport w = witness_d_stochastic(p, q, pt, qt);
    const char* method = w.method == WitnessMethod::embedding ? "embedding" : "lp";
    emit(json{{"d_majorizes", true},
              {"matrix", io::dmatrix_to_json(w.matrix.matrix())},
              {"residual_p", w.residual_p},
              {"residual_q", w.residual_q ? json(*w.residual_q) : json()},
              {"method", method}});
    return 0;
  } catch (const NotMajorizedError&) {
    emit(json{{"d_majorizes", false}});
    return 1;
  }
}

int cmd_lorenz(const std::string& p_path, const std::string& q_path, const std::string& csv_path,
               bool normalize) {
  ProbVec p = load_prob(p_path, normalize);
  LorenzCurve c =
      q_path.empty() ? lorenz(p) : lorenz_relative(p, load_prob(q_path, normalize));
  if (!csv_path.empty()) io::write_lorenz_csv(c, csv_path);
  emit(io::lorenz_to_json(c));
  return 0;
}

// --- div / qdiv --------------------------------------------------------------

int cmd_div(const std::string& p_path, const std::string& q_path, std::optional<double> alpha,
            const std::string& fname, bool normalize) {
  ProbVec p = load_prob(p_path, normalize), q = load_prob(q_path, normalize);
  double value;
  if (alpha) {
    if (!fname.empty()) fail("bad_flags", "use either --alpha or --f, not both");
    value = renyi_divergence(p, q, *alpha);
  } else if (fname == "klf") {
    value = f_divergence(p, q, fn_kl());
  } else if (fname == "tv") {
    value = f_divergence(p, q, fn_total_variation());
  } else if (fname == "hellinger") {
    value = f_divergence(p, q, fn_hellinger());
  } else if (fname == "chi2") {
    value = f_divergence(p, q, fn_chi2());
  } else if (fname.rfind("alpha:", 0) == 0) {
    value = f_divergence(p, q, fn_power(std::stod(fname.substr(6))));
  } else if (fname.empty()) {
    fail("bad_flags", "div needs --alpha A or --f klf|tv|hellinger|chi2|alpha:A");
  } else {
    fail("bad_flags", "unknown f-divergence name: " + fname);
  }
  emit(json{{"value", io::num(value)}});
  return 0;
}

int cmd_qdiv(const std::string& rho_path, const std::string& sigma_path, const std::string& kind) {
  DensityMatrix rho = load_density(rho_path), sigma = load_density(sigma_path);
  double value;
  if (kind == "kl") {
    value = quantum_kl(rho, sigma);
  } else if (kind == "r0") {
    value = q_renyi_0(rho, sigma);
  } else if (kind == "rinf") {
    value = q_renyi_inf(rho, sigma);
  } else if (kind.rfind("petz:", 0) == 0) {
    value = petz_renyi(rho, sigma, std::stod(kind.substr(5)));
  } else if (kind.rfind("sandwich:", 0) == 0) {
    value = sandwiched_renyi(rho, sigma, std::stod(kind.substr(9)));
  } else {
    fail("bad_flags", "qdiv --kind must be kl|r0|rinf|petz:A|sandwich:A");
  }
  emit(json{{"value", io::num(value)}});
  return 0;
}

// --- catalysis ----------------------------------------------------------------

json verdict_to_json(const CatalysisVerdict& v) {
  json out{{"satisfied", v.satisfied}, {"caveat", v.caveat}};
  if (v.failing_alpha) out["failing_alpha"] = io::num(*v.failing_alpha);
  return out;
}

int cmd_catalysis(const std::string& which, const std::string& p_path, const std::string& pt_path,
                  const std::string& q_path, const std::string& qt_path,
                  const std::string& r_path, bool normalize) {
  ProbVec p = load_prob(p_path, normalize), pt = load_prob(pt_path, normalize);
  if (which == "verify") {
    if (r_path.empty()) fail("bad_flags", "catalysis verify needs --r");
    const bool ok = verify_catalyst(p, pt, load_prob(r_path, normalize));
    emit(json{{"verified", ok}});
    return ok ? 0 : 1;
  }
  CatalysisVerdict v;
  if (which == "trump") {
    v = trump_exact_conditions(p, pt);
  } else if (which == "trump-approx") {
    v = trump_approx_conditions(p, pt);
  } else if (which == "dtrump") {
    if (q_path.empty() || qt_path.empty()) fail("bad_flags", "catalysis dtrump needs --q and --qtarget");
    v = d_trump_conditions(p, load_prob(q_path, normalize), pt, load_prob(qt_path, normalize));
  } else if (which == "correlated") {
    v = correlated_catalysis_conditions(p, pt);
  } else {
    fail("bad_flags", "unknown catalysis mode: " + which);
  }
  emit(verdict_to_json(v));
  return v.satisfied ? 0 : 1;
}

// --- thermo -------------------------------------------------------------------

// Protocol JSON: {"beta": B, "p0": [..], "energies": [..], "steps": [
//   {"quench": [..]}, {"relax": "full"} | {"relax": [[..]]}, ...]}
// "relax": "full" thermalizes fully to the Gibbs state of the Hamiltonian in
// force at that step.
int cmd_thermo_protocol(const std::string& spec_path, const std::string& csv_path) {
  json j = io::load_json(spec_path);
  if (!j.is_object() || !j.contains("beta") || !j.contains("p0") || !j.contains("energies") ||
      !j.contains("steps"))
    fail("bad_input", "protocol spec needs beta, p0, energies, steps");
  Protocol proto;
  proto.beta = io::require_number(j.at("beta"), "beta");
  ProbVec p0(io::dvec_from_json(j.at("p0"), "p0"));
  std::vector<double> E = io::dvec_from_json(j.at("energies"), "energies");
  std::vector<double> cur = E;
  for (const auto& step : j.at("steps")) {
    if (!step.is_object()) fail("bad_input", "each step must be an object");
    if (step.contains("quench")) {
      cur = io::dvec_from_json(step.at("quench"), "quench");
      proto.steps.emplace_back(Quench{cur});
    } else if (step.contains("relax")) {
      const json& r = step.at("relax");
      if (r.is_string() && r.get<std::string>() == "full") {
        proto.steps.emplace_back(Relax{full_relaxation(GibbsSpec(cur, proto.beta).state())});
      } else {
        proto.steps.emplace_back(Relax{StochasticMatrix(io::dmatrix_from_json(r))});
      }
    } else {
      fail("bad_input", "each step must have \"quench\" or \"relax\"");
    }
  }
  ProtocolReport rep = simulate_protocol(proto, p0, E);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) fail("bad_output", "cannot write " + csv_path);
    out << "step";
    for (int i = 0; i < p0.dim(); ++i) out << ",p" << i;
    out << "\n";
    out.precision(17);
    for (std::size_t s = 0; s < rep.trajectory.size(); ++s) {
      out << s;
      for (int i = 0; i < rep.trajectory[s].dim(); ++i) out << ',' << rep.trajectory[s][i];
      out << "\n";
    }
  }
  emit(json{{"work", rep.work},
            {"heat", rep.heat},
            {"delta_S1", rep.delta_S1},
            {"sigma", rep.sigma},
            {"final_energies", rep.final_energies}});
  return 0;
}

int cmd_thermo_workbound(const std::string& case_name, const std::string& p_path,
                         const std::string& pt_path, const std::string& g_path,
                         const std::string& gt_path, std::optional<double> w_flag,
                         bool normalize) {
  GibbsSpec g = io::gibbs_from_json(io::load_json(g_path));
  GibbsSpec gt = gt_path.empty() ? g : io::gibbs_from_json(io::load_json(gt_path));
  ProbVec p = p_path.empty() ? g.state() : load_prob(p_path, normalize);
  ProbVec pt = pt_path.empty() ? gt.state() : load_prob(pt_path, normalize);
  const double beta = g.beta;
  const double dF = *gt.free_energy() - *g.free_energy();
  double w;
  if (w_flag) {
    w = *w_flag;
  } else if (case_name == "formation") {
    w = dF + renyi_divergence(pt, gt.state(), kInf) / beta;
  } else if (case_name == "extraction") {
    w = dF - renyi_divergence(p, g.state(), 0.0) / beta;
  } else if (case_name == "equilibrium") {
    w = dF;
  } else {
    fail("bad_flags", "--case must be formation|extraction|equilibrium");
  }
  WorkAssistedVerdict v = w_assisted_transformable(p, g, pt, gt, w);
  emit(json{{"case", case_name},
            {"w", w},
            {"delta_F", dF},
            {"composite", v.composite},
            {"analytic_necessary", v.analytic_necessary},
            {"analytic_sufficient", v.analytic_sufficient}});
  return v.composite ? 0 : 1;
}

// --- qwork --------------------------------------------------------------------

int cmd_qwork(const std::string& rho_path, const std::string& rhot_path, const std::string& h_path,
              const std::string& ht_path, double beta, double w) {
  DensityMatrix rho = load_density(rho_path), rhot = load_density(rhot_path);
  QGibbsSpec spec(io::cmatrix_from_json(io::load_json(h_path)), beta);
  QGibbsSpec spec_t(io::cmatrix_from_json(io::load_json(ht_path)), beta);
  SingleShotWorkVerdict v = single_shot_work_verdict(rho, rhot, spec, spec_t, w);
  const bool possible =
      v.necessary_alpha0 && v.necessary_alpha1 && v.necessary_alphainf;
  emit(json{{"necessary",
             {{"alpha0", v.necessary_alpha0},
              {"alpha1", v.necessary_alpha1},
              {"alphainf", v.necessary_alphainf}}},
            {"sufficient", v.sufficient}});
  return possible ? 0 : 1;
}

// --- sh / smooth / stein ------------------------------------------------------

int cmd_sh(const std::string& p_path, const std::string& q_path, const std::string& rho_path,
           const std::string& sigma_path, double eta, int n, bool normalize) {
  if (!rho_path.empty()) {
    ShQuantumResult r = sh_quantum(load_density(rho_path), load_density(sigma_path), eta);
    emit(json{{"value", io::num(r.value)}, {"mu", r.mu}, {"duality_gap", r.duality_gap}});
    return 0;
  }
  ProbVec p = load_prob(p_path, normalize), q = load_prob(q_path, normalize);
  const double value = n > 1 ? sh_classical_iid(p, q, eta, n) : sh_classical(p, q, eta);
  emit(json{{"value", io::num(value)}});
  return 0;
}

int cmd_smooth(const std::string& which, const std::string& p_path, const std::string& q_path,
               double eps, bool normalize) {
  ProbVec p = load_prob(p_path, normalize), q = load_prob(q_path, normalize);
  if (which == "r0") {
    SmoothValue v = smooth_r0_classical(p, q, eps);
    emit(json{{"value", io::num(v.value)}, {"exact", v.exact}});
  } else if (which == "rinf") {
    emit(json{{"value", io::num(smooth_rinf_classical(p, q, eps))}});
  } else {
    fail("bad_flags", "--which must be r0|rinf");
  }
  return 0;
}

void write_sweep_csv(const SteinSweep& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("bad_output", "cannot write " + path);
  out << "n,rate,target\n";
  out.precision(17);
  for (std::size_t i = 0; i < s.n_values.size(); ++i)
    out << s.n_values[i] << ',' << s.rates[i] << ',' << s.target << "\n";
}

int cmd_stein(const std::string& p_path, const std::string& q_path, const std::string& rho_path,
              const std::string& sigma_path, const std::string& chain_path,
              const std::string& pi_path, double eta, int n_max, const std::string& csv_path,
              bool normalize) {
  SteinSweep s;
  if (!chain_path.empty()) {
    if (pi_path.empty() || q_path.empty())
      fail("bad_flags", "stein with --chain needs --pi and --q");
    s = markov_source_sweep(StochasticMatrix(io::dmatrix_from_json(io::load_json(chain_path))),
                            load_prob(pi_path, normalize), load_prob(q_path, normalize), eta,
                            n_max);
  } else if (!rho_path.empty()) {
    s = stein_sweep_quantum(load_density(rho_path), load_density(sigma_path), eta, n_max);
  } else {
    s = stein_sweep_classical(load_prob(p_path, normalize), load_prob(q_path, normalize), eta,
                              n_max);
  }
  if (!csv_path.empty()) write_sweep_csv(s, csv_path);
  json rates = json::array();
  for (double r : s.rates) rates.push_back(io::num(r));
  emit(json{{"eta", s.eta},
            {"n", s.n_values},
            {"rate", std::move(rates)},
            {"target", io::num(s.target)},
            {"converged", s.converged}});
  return 0;
}

// --- witness / channel-check --------------------------------------------------

int cmd_witness(const std::string& rho_path, const std::string& rhot_path, bool mixture) {
  DensityMatrix rho = load_density(rho_path), rhot = load_density(rhot_path);
  try {
    if (mixture) {
      auto mix = mixture_of_unitaries_witness(rho, rhot);
      json terms = json::array();
      CMat img = CMat::Zero(rho.dim(), rho.dim());
      for (const auto& [wgt, u] : mix) {
        terms.push_back(json{{"weight", wgt}, {"unitary", io::cmatrix_to_json(u)}});
        img += wgt * u * rho.matrix() * u.adjoint();
      }
      const double res = trace_distance_q(DensityMatrix(img, true), rhot);
      emit(json{{"majorizes", true}, {"mixture", std::move(terms)}, {"residual", res}});
      return 0;
    }
    QuantumChannel e = q_majorization_witness(rho, rhot);
    const double res = trace_distance_q(apply_channel(e, rho), rhot);
    emit(json{{"majorizes", true},
              {"kraus", io::kraus_to_json(e.kraus())},
              {"unital", e.unital()},
              {"trace_preserving", e.trace_preserving()},
              {"residual", res}});
    return 0;
  } catch (const NotMajorizedError& e) {
    emit(json{{"majorizes", false}, {"violated_k", e.violated_k}});
    return 1;
  }
}

int cmd_channel_check(const std::string& kraus_path, const std::string& gibbs_path) {
  std::vector<CMat> kraus = io::kraus_from_json(io::load_json(kraus_path));
  bool cptp = true;
  std::string why;
  std::optional<QuantumChannel> e;
  try {
    e.emplace(std::move(kraus));
  } catch (const std::exception& ex) {
    cptp = false;
    why = ex.what();
  }
  json out{{"cptp", cptp}};
  if (!cptp) {
    out["reason"] = why;
    emit(out);
    return 1;
  }
  out["unital"] = e->unital();
  bool ok = true;
  if (!gibbs_path.empty()) {
    QGibbsSpec spec = io::qgibbs_from_json(io::load_json(gibbs_path));
    const bool gp = gibbs_preserving(*e, spec);
    out["gibbs_preserving"] = gp;
    ok = gp;
  }
  emit(out);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"majorization and single-shot thermodynamics toolkit"};
  app.require_subcommand(1);

  std::string p_path, q_path, pt_path, qt_path, r_path, rho_path, sigma_path, rhot_path;
  std::string h_path, ht_path, chain_path, pi_path, spec_path, kraus_path, gibbs_path;
  std::string csv_path, fname, kind, case_name, which;
  std::optional<double> alpha_flag, w_flag;
  double beta = 1.0, w = 0.0, eta = 0.5, eps = 0.0;
  int n = 1, n_max = 10;
  bool normalize = false, mixture = false;
  std::uint64_t seed = 0;
  (void)seed;

  auto add_norm = [&](CLI::App* c) { c->add_flag("--normalize", normalize, "renormalize inputs"); };

  // majorize
  CLI::App* maj = app.add_subcommand("majorize", "ordinary majorization");
  maj->require_subcommand(1);
  CLI::App* maj_check = maj->add_subcommand("check", "decide p majorizes q");
  CLI::App* maj_wit = maj->add_subcommand("witness", "doubly stochastic witness T with Tp = q");
  for (CLI::App* c : {maj_check, maj_wit}) {
    c->add_option("--p", p_path, "source distribution JSON")->required();
    c->add_option("--q", q_path, "target distribution JSON")->required();
    add_norm(c);
  }

  // dmajorize
  CLI::App* dmaj = app.add_subcommand("dmajorize", "relative (d-)majorization");
  dmaj->require_subcommand(1);
  CLI::App* dmaj_check = dmaj->add_subcommand("check", "decide (p,q) d-majorizes (pt,qt)");
  CLI::App* dmaj_wit = dmaj->add_subcommand("witness", "stochastic witness T with Tp=pt, Tq=qt");
  for (CLI::App* c : {dmaj_check, dmaj_wit}) {
    c->add_option("--p", p_path)->required();
    c->add_option("--q", q_path)->required();
    c->add_option("--pt", pt_path)->required();
    c->add_option("--qt", qt_path)->required();
    add_norm(c);
  }

  // lorenz
  CLI::App* lor = app.add_subcommand("lorenz", "Lorenz curve (relative if --q given)");
  lor->add_option("--p", p_path)->required();
  lor->add_option("--q", q_path, "reference distribution (relative curve)");
  lor->add_option("--csv", csv_path, "write x,y rows to this file");
  add_norm(lor);

  // div
  CLI::App* dv = app.add_subcommand("div", "classical divergences");
  dv->add_option("--p", p_path)->required();
  dv->add_option("--q", q_path)->required();
  dv->add_option("--alpha", alpha_flag, "Renyi order (any real; 0, 1 and +-inf included)");
  dv->add_option("--f", fname, "f-divergence: klf|tv|hellinger|chi2|alpha:A");
  add_norm(dv);

  // qdiv
  CLI::App* qdv = app.add_subcommand("qdiv", "quantum divergences");
  qdv->add_option("--rho", rho_path)->required();
  qdv->add_option("--sigma", sigma_path)->required();
  qdv->add_option("--kind", kind, "kl|r0|rinf|petz:A|sandwich:A")->required();

  // catalysis
  CLI::App* cat = app.add_subcommand("catalysis", "catalytic conversion conditions");
  cat->require_subcommand(1);
  CLI::App* cat_trump = cat->add_subcommand("trump", "exact trumping conditions");
  CLI::App* cat_trump_a = cat->add_subcommand("trump-approx", "vanishing-error trumping");
  CLI::App* cat_dtrump = cat->add_subcommand("dtrump", "catalytic d-majorization conditions");
  CLI::App* cat_corr = cat->add_subcommand("correlated", "correlated-catalyst conditions");
  CLI::App* cat_verify = cat->add_subcommand("verify", "verify a given catalyst r");
  for (CLI::App* c : {cat_trump, cat_trump_a, cat_dtrump, cat_corr, cat_verify}) {
    c->add_option("--p", p_path)->required();
    c->add_option("--ptarget", pt_path)->required();
    add_norm(c);
  }
  cat_dtrump->add_option("--q", q_path)->required();
  cat_dtrump->add_option("--qtarget", qt_path)->required();
  cat_verify->add_option("--r", r_path)->required();

  // thermo
  CLI::App* th = app.add_subcommand("thermo", "protocol simulation and work bounds");
  th->require_subcommand(1);
  CLI::App* th_proto = th->add_subcommand("protocol", "simulate a quench/relax protocol");
  th_proto->add_option("--spec", spec_path, "protocol JSON")->required();
  th_proto->add_option("--csv", csv_path, "write the state trajectory to this file");
  CLI::App* th_wb = th->add_subcommand("workbound", "work-assisted transformability");
  th_wb->add_option("--case", case_name, "formation|extraction|equilibrium")->required();
  th_wb->add_option("--gibbs", gibbs_path, "GibbsSpec JSON")->required();
  th_wb->add_option("--gibbs-target", qt_path, "target GibbsSpec JSON (default: same)");
  th_wb->add_option("--p", p_path, "initial state (default: Gibbs)");
  th_wb->add_option("--ptarget", pt_path, "target state (default: Gibbs)");
  th_wb->add_option("--w", w_flag, "work supplied (default: the analytic bound for --case)");
  add_norm(th_wb);

  // qwork
  CLI::App* qw = app.add_subcommand("qwork", "quantum single-shot work verdicts");
  qw->require_subcommand(1);
  CLI::App* qw_v = qw->add_subcommand("verdict", "necessary/sufficient work conditions");
  qw_v->add_option("--rho", rho_path)->required();
  qw_v->add_option("--rhoT", rhot_path)->required();
  qw_v->add_option("--H", h_path, "initial Hamiltonian matrix JSON")->required();
  qw_v->add_option("--HT", ht_path, "target Hamiltonian matrix JSON")->required();
  qw_v->add_option("--beta", beta, "inverse temperature")
      ->required()
      ->check(CLI::PositiveNumber);
  qw_v->add_option("--w", w, "work supplied")->required();

  // sh
  CLI::App* sh = app.add_subcommand("sh", "hypothesis-testing divergence");
  sh->add_option("--p", p_path, "classical: source distribution");
  sh->add_option("--q", q_path, "classical: reference distribution");
  sh->add_option("--rho", rho_path, "quantum: source state");
  sh->add_option("--sigma", sigma_path, "quantum: reference state");
  sh->add_option("--eta", eta, "type-I success level in (0,1)")
      ->required()
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  sh->add_option("--n", n, "i.i.d. copies (classical only)")->check(CLI::PositiveNumber);
  add_norm(sh);

  // smooth
  CLI::App* sm = app.add_subcommand("smooth", "smoothed 0/inf divergences");
  sm->add_option("--p", p_path)->required();
  sm->add_option("--q", q_path)->required();
  sm->add_option("--eps", eps, "smoothing radius in [0,1)")
      ->required()
      ->check(CLI::Range(0.0, std::nextafter(1.0, 0.0)));
  sm->add_option("--which", which, "r0|rinf")->required();
  add_norm(sm);

  // stein
  CLI::App* st = app.add_subcommand("stein", "finite-n hypothesis-testing rate sweeps");
  st->add_option("--p", p_path, "classical source (or Markov i.i.d. reference with --chain)");
  st->add_option("--q", q_path, "classical reference / i.i.d. reference for --chain");
  st->add_option("--rho", rho_path, "quantum source");
  st->add_option("--sigma", sigma_path, "quantum reference");
  st->add_option("--chain", chain_path, "column-stochastic transition matrix JSON");
  st->add_option("--pi", pi_path, "stationary distribution of --chain");
  st->add_option("--eta", eta)->required()->check(
      CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  st->add_option("--n-max", n_max)->required()->check(CLI::PositiveNumber);
  st->add_option("--csv", csv_path, "write n,rate,target rows to this file");
  add_norm(st);

  // witness
  CLI::App* wit = app.add_subcommand("witness", "unital channel for spectral majorization");
  wit->add_option("--rho", rho_path)->required();
  wit->add_option("--rhoT", rhot_path)->required();
  wit->add_flag("--mixture", mixture, "emit a mixture of unitaries instead of Kraus form");

  // channel-check
  CLI::App* cc = app.add_subcommand("channel-check", "CPTP/unital/Gibbs-preserving predicates");
  cc->add_option("--kraus", kraus_path, "channel as a JSON list of Kraus matrices")->required();
  cc->add_option("--gibbs", gibbs_path, "Hamiltonian + beta JSON (adds the Gibbs check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit(json{{"error", {{"code", "bad_flags"}, {"message", e.what()}}}});
    return 2;
  }

  try {
    if (maj_check->parsed()) return cmd_majorize_check(p_path, q_path, normalize);
    if (maj_wit->parsed()) return cmd_majorize_witness(p_path, q_path, normalize);
    if (dmaj_check->parsed())
      return cmd_dmajorize_check(p_path, q_path, pt_path, qt_path, normalize);
    if (dmaj_wit->parsed())
      return cmd_dmajorize_witness(p_path, q_path, pt_path, qt_path, normalize);
    if (lor->parsed()) return cmd_lorenz(p_path, q_path, csv_path, normalize);
    if (dv->parsed()) return cmd_div(p_path, q_path, alpha_flag, fname, normalize);
    if (qdv->parsed()) return cmd_qdiv(rho_path, sigma_path, kind);
    if (cat->parsed()) {
      for (CLI::App* c : {cat_trump, cat_trump_a, cat_dtrump, cat_corr, cat_verify})
        if (c->parsed())
          return cmd_catalysis(c->get_name(), p_path, pt_path, q_path, qt_path, r_path,
                               normalize);
    }
    if (th_proto->parsed()) return cmd_thermo_protocol(spec_path, csv_path);
    if (th_wb->parsed())
      return cmd_thermo_workbound(case_name, p_path, pt_path, gibbs_path, qt_path, w_flag,
                                  normalize);
    if (qw_v->parsed()) return cmd_qwork(rho_path, rhot_path, h_path, ht_path, beta, w);
    if (sh->parsed()) {
      if (rho_path.empty() && (p_path.empty() || q_path.empty()))
        fail("bad_flags", "sh needs --p/--q or --rho/--sigma");
      if (!rho_path.empty() && sigma_path.empty()) fail("bad_flags", "sh --rho needs --sigma");
      return cmd_sh(p_path, q_path, rho_path, sigma_path, eta, n, normalize);
    }
    if (sm->parsed()) return cmd_smooth(which, p_path, q_path, eps, normalize);
    if (st->parsed()) {
      if (chain_path.empty() && rho_path.empty() && (p_path.empty() || q_path.empty()))
        fail("bad_flags", "stein needs --p/--q, --rho/--sigma, or --chain/--pi/--q");
      return cmd_stein(p_path, q_path, rho_path, sigma_path, chain_path, pi_path, eta, n_max,
                       csv_path, normalize);
    }
    if (wit->parsed()) return cmd_witness(rho_path, rhot_path, mixture);
    if (cc->parsed()) return cmd_channel_check(kraus_path, gibbs_path);
  } catch (const majtherm::DimensionMismatch& e) {
    emit(json{{"error", {{"code", "dimension_mismatch"}, {"message", e.what()}}}});
    return 2;
  } catch (const majtherm::ValidationError& e) {
    emit(json{{"error", {{"code", "validation"}, {"message", e.what()}}}});
    return 2;
  } catch (const std::exception& e) {
    emit(json{{"error", {{"code", "internal"}, {"message", e.what()}}}});
    return 2;
  }
  emit(json{{"error", {{"code", "bad_flags"}, {"message", "no subcommand dispatched"}}}});
  return 2;
}
