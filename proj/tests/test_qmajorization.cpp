#include "majtherm/qmajorization.hpp"

#include "test_support.hpp"

namespace {

mt::CMat channel_image(const std::vector<std::pair<double, mt::CMat>>& mix,
                       const mt::DensityMatrix& rho) {
  mt::CMat out = mt::CMat::Zero(rho.dim(), rho.dim());
  for (const auto& [wt, u] : mix) out += wt * u * rho.matrix() * u.adjoint();
  return out;
}

double hs_dist(const mt::CMat& a, const mt::CMat& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("q_majorizes") {
  mt::Rng rng(301);
  auto rho = mt::random_density(3, rng);
  mt::CMat u = mt::haar_unitary(3, rng);
  mt::DensityMatrix rotated{mt::CMat(u * rho.matrix() * u.adjoint())};
  CHECK(mt::q_majorizes(rho, rotated));
  CHECK(mt::q_majorizes(rotated, rho));
  CHECK(mt::q_majorizes(rho, mt::DensityMatrix::maximally_mixed(3)));

  auto a = mt::DensityMatrix::diagonal(pv({2.0 / 3, 1.0 / 6, 1.0 / 6}));
  auto b = mt::DensityMatrix::diagonal(pv({0.5, 0.5, 0.0}));
  CHECK(!mt::q_majorizes(a, b));
}

TEST_CASE("q_majorization_witness") {
  mt::Rng rng(307);

  SUBCASE("target equals source up to a basis change") {
    auto rho = mt::random_density(3, rng);
    mt::CMat u = mt::haar_unitary(3, rng);
    mt::DensityMatrix target{mt::CMat(u * rho.matrix() * u.adjoint())};
    auto e = mt::q_majorization_witness(rho, target);
    CHECK(e.unital(1e-9));
    CHECK(hs_dist(mt::apply_channel(e, rho).matrix(), target.matrix()) <= 1e-8);
  }

  SUBCASE("pure source reaches anything") {
    auto rho = mt::DensityMatrix::pure(mt::random_pure(4, rng));
    auto target = mt::random_density(4, rng);
    auto e = mt::q_majorization_witness(rho, target);
    CHECK(e.unital(1e-9));
    CHECK(hs_dist(mt::apply_channel(e, rho).matrix(), target.matrix()) <= 1e-8);
  }

  SUBCASE("random majorizing pairs") {
    int built = 0;
    for (int trial = 0; trial < 50; ++trial) {
      auto rho = mt::random_density(3, rng, 1 + static_cast<int>(trial % 3));
      auto target = mt::random_density(3, rng);
      if (!mt::q_majorizes(rho, target)) {
        CHECK_THROWS_AS(mt::q_majorization_witness(rho, target), mt::NotMajorizedError);
        continue;
      }
      auto e = mt::q_majorization_witness(rho, target);
      CHECK(e.unital(1e-9));
      CHECK(hs_dist(mt::apply_channel(e, rho).matrix(), target.matrix()) <= 1e-8);
      ++built;
    }
    CHECK(built >= 10);
  }
}

TEST_CASE("mixture_of_unitaries_witness") {
  mt::Rng rng(311);
  auto check_mixture = [&](const mt::DensityMatrix& rho, const mt::DensityMatrix& target) {
    auto mix = mt::mixture_of_unitaries_witness(rho, target);
    double total = 0.0;
    for (const auto& [wt, u] : mix) {
      CHECK(wt > 0.0);
      total += wt;
      CHECK(hs_dist(mt::CMat(u * u.adjoint()), mt::CMat::Identity(rho.dim(), rho.dim())) <=
            1e-9);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hs_dist(channel_image(mix, rho), target.matrix()) <= 1e-8);
  };

  auto rho = mt::random_density(3, rng);
  mt::CMat u = mt::haar_unitary(3, rng);
  check_mixture(rho, mt::DensityMatrix{mt::CMat(u * rho.matrix() * u.adjoint())});
  check_mixture(mt::DensityMatrix::pure(mt::random_pure(3, rng)), mt::random_density(3, rng));
  for (int trial = 0; trial < 30; ++trial) {
    auto src = mt::random_density(4, rng, 1 + static_cast<int>(trial % 2));
    auto dst = mt::random_density(4, rng);
    if (mt::q_majorizes(src, dst)) check_mixture(src, dst);
  }
}

TEST_CASE("unital channels and doubly stochastic transition matrices") {
  mt::Rng rng(313);
  for (int trial = 0; trial < 100; ++trial) {
    auto e = mt::random_unital(3, rng);
    mt::CMat bu = mt::haar_unitary(3, rng), bv = mt::haar_unitary(3, rng);
    Eigen::MatrixXd t(3, 3);
    for (int i = 0; i < 3; ++i) {
      mt::CMat proj = bu.col(i) * bu.col(i).adjoint();
      mt::CMat img = e.apply_raw(proj);
      for (int j = 0; j < 3; ++j)
        t(j, i) = (bv.col(j).adjoint() * img * bv.col(j))(0, 0).real();
    }
    mt::StochasticMatrix ds{t};
    CHECK(ds.is_doubly_stochastic(1e-8));

    // and the image of any state under a unital channel is majorized by it
    auto rho = mt::random_density(3, rng);
    CHECK(mt::q_majorizes(rho, mt::apply_channel(e, rho)));
  }
}

TEST_CASE("q_dmaj_sufficient_witness") {
  mt::Rng rng(317);

  SUBCASE("identical targets always constructible") {
    auto rho = mt::random_density(3, rng, 2);
    auto sigma = mt::random_density(3, rng);
    auto target = mt::random_density(3, rng);
    auto wit = mt::q_dmaj_sufficient_witness(rho, sigma, target, target);
    REQUIRE(wit.channel.has_value());
    CHECK(hs_dist(mt::apply_channel(*wit.channel, rho).matrix(), target.matrix()) <= 1e-8);
    CHECK(hs_dist(mt::apply_channel(*wit.channel, sigma).matrix(), target.matrix()) <= 1e-8);
  }

  SUBCASE("commuting instance") {
    auto rho = mt::DensityMatrix::diagonal(pv({1.0, 0.0}));
    auto sigma = mt::DensityMatrix::diagonal(pv({0.3, 0.7}));
    auto rho_t = mt::DensityMatrix::diagonal(pv({0.5, 0.5}));
    auto sigma_t = mt::DensityMatrix::diagonal(pv({0.4, 0.6}));
    auto wit = mt::q_dmaj_sufficient_witness(rho, sigma, rho_t, sigma_t);
    REQUIRE(wit.channel.has_value());
    CHECK(hs_dist(mt::apply_channel(*wit.channel, rho).matrix(), rho_t.matrix()) <= 1e-8);
    CHECK(hs_dist(mt::apply_channel(*wit.channel, sigma).matrix(), sigma_t.matrix()) <= 1e-8);
  }

  SUBCASE("undecided when the sufficiency margin fails") {
    auto rho = mt::random_density(2, rng);  // full rank: S_0 = 0
    auto sigma = mt::random_density(2, rng);
    auto rho_t = mt::DensityMatrix::diagonal(pv({0.9, 0.1}));
    auto sigma_t = mt::DensityMatrix::diagonal(pv({0.5, 0.5}));
    auto wit = mt::q_dmaj_sufficient_witness(rho, sigma, rho_t, sigma_t);
    CHECK(!wit.channel.has_value());
    CHECK(wit.sinf_target > wit.s0);
  }

  SUBCASE("random instances inside the sufficient region") {
    for (int trial = 0; trial < 50; ++trial) {
      auto rho = mt::DensityMatrix::pure(mt::random_pure(3, rng));
      auto sigma = mt::random_density(3, rng);
      auto rho_t = mt::random_density(3, rng);
      double s0 = mt::q_renyi_0(rho, sigma);
      double c = std::min(0.95, 1.01 * std::exp(-s0));
      mt::CMat st = c * rho_t.matrix() +
                    (1.0 - c) * mt::random_density(3, rng).matrix();
      mt::DensityMatrix sigma_t{std::move(st)};
      auto wit = mt::q_dmaj_sufficient_witness(rho, sigma, rho_t, sigma_t);
      REQUIRE(wit.channel.has_value());
      CHECK(hs_dist(mt::apply_channel(*wit.channel, rho).matrix(), rho_t.matrix()) <= 1e-8);
      CHECK(hs_dist(mt::apply_channel(*wit.channel, sigma).matrix(), sigma_t.matrix()) <=
            1e-8);
    }
  }
}

namespace {

mt::QGibbsSpec qubit_spec(double e1, double beta) {
  mt::CMat h = mt::CMat::Zero(2, 2);
  h(1, 1) = e1;
  return {h, beta};
}

}  // namespace

TEST_CASE("build_scw") {
  SUBCASE("composite Gibbs structure") {
    double beta = 1.2;
    auto spec = qubit_spec(1.0, beta), spec_t = qubit_spec(0.4, beta);
    auto scw = mt::build_scw(spec, spec_t, 0.7);
    mt::CMat p0 = mt::CMat::Zero(2, 2), p1 = mt::CMat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    mt::CMat gsc = (scw.z_s * mt::tensor_c(spec.state().matrix(), p0) +
                    scw.z_s_target * mt::tensor_c(spec_t.state().matrix(), p1)) /
                   (scw.z_s + scw.z_s_target);
    mt::CMat gw = mt::CMat::Zero(2, 2);
    gw(0, 0) = std::exp(-beta * 0.7) / scw.z_w;
    gw(1, 1) = 1.0 / scw.z_w;
    CHECK(hs_dist(scw.gibbs.matrix(), mt::tensor_c(gsc, gw)) <= 1e-10);
  }

  SUBCASE("symmetric composite at w = 0 with equal Hamiltonians") {
    auto spec = qubit_spec(1.0, 2.0);
    auto scw = mt::build_scw(spec, spec, 0.0);
    // clock marginal of the Gibbs state is uniform
    auto sc = mt::partial_trace(scw.gibbs, 4, 2, mt::Subsystem::A);
    auto clock = mt::partial_trace(sc, 2, 2, mt::Subsystem::B);
    CHECK(clock.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-10));
  }

  SUBCASE("divergence decomposition identity") {
    double beta = 1.0;
    auto spec = qubit_spec(1.0, beta), spec_t = qubit_spec(0.3, beta);
    double w = std::log(3.0) / beta;
    auto scw = mt::build_scw(spec, spec_t, w);
    mt::Rng rng(331);
    auto rho_s = mt::random_density(2, rng, 1);  // pure: makes alpha = 0 non-trivial
    mt::DensityMatrix embedded{scw.embed(rho_s, 0, 0)};
    auto g_s = spec.state();
    double offset = beta * *spec.free_energy() + std::log(scw.z_s + scw.z_s_target) +
                    beta * w + std::log(scw.z_w);
    CHECK(mt::q_renyi_0(embedded, scw.gibbs) ==
          doctest::Approx(mt::q_renyi_0(rho_s, g_s) + offset).epsilon(1e-10));
    CHECK(mt::quantum_kl(embedded, scw.gibbs) ==
          doctest::Approx(mt::quantum_kl(rho_s, g_s) + offset).epsilon(1e-10));
    CHECK(mt::q_renyi_inf(embedded, scw.gibbs) ==
          doctest::Approx(mt::q_renyi_inf(rho_s, g_s) + offset).epsilon(1e-10));
  }

  SUBCASE("large beta collapses the clock to the lower-free-energy side") {
    auto spec = qubit_spec(1.0, 50.0);
    mt::CMat hs = mt::CMat::Zero(2, 2);
    hs(0, 0) = 0.5;
    hs(1, 1) = 1.5;
    mt::QGibbsSpec spec_t(hs, 50.0);  // ground energy 0.5: F' - F ~ 0.5 at low T
    auto scw = mt::build_scw(spec, spec_t, 0.0);
    auto sc = mt::partial_trace(scw.gibbs, 4, 2, mt::Subsystem::A);
    auto clock = mt::partial_trace(sc, 2, 2, mt::Subsystem::B);
    CHECK(clock.matrix()(0, 0).real() > 1.0 - 1e-9);
  }
}

TEST_CASE("single_shot_work_verdict") {
  double beta = 1.3;
  auto spec = qubit_spec(1.0, beta);
  auto g = spec.state();
  mt::Rng rng(337);

  SUBCASE("state formation") {
    auto rho_t = mt::DensityMatrix::diagonal(pv({0.9, 0.1}));
    double w = mt::q_renyi_inf(rho_t, g) / beta;
    auto v = mt::single_shot_work_verdict(g, rho_t, spec, spec, w);
    CHECK(v.sufficient);
    CHECK(v.necessary_alphainf);
    auto v2 = mt::single_shot_work_verdict(g, rho_t, spec, spec, w - 1e-6);
    CHECK(!v2.necessary_alphainf);
  }

  SUBCASE("work extraction") {
    auto rho = mt::DensityMatrix::diagonal(pv({1.0, 0.0}));
    double w = -mt::q_renyi_0(rho, g) / beta;
    auto v = mt::single_shot_work_verdict(rho, g, spec, spec, w);
    CHECK(v.sufficient);
    auto v2 = mt::single_shot_work_verdict(rho, g, spec, spec, w - 1e-6);
    CHECK(!v2.sufficient);
  }

  SUBCASE("equilibrium transition") {
    auto spec_t = qubit_spec(0.4, beta);
    double df = *spec_t.free_energy() - *spec.free_energy();
    auto v = mt::single_shot_work_verdict(g, spec_t.state(), spec, spec_t, df);
    CHECK(v.sufficient);
    CHECK(v.necessary_alpha0);
    CHECK(v.necessary_alpha1);
    CHECK(v.necessary_alphainf);
    auto v2 = mt::single_shot_work_verdict(g, spec_t.state(), spec, spec_t, df - 1e-6);
    CHECK(!v2.sufficient);
  }

  SUBCASE("sufficient implies necessary, and verdicts are monotone in w") {
    for (int trial = 0; trial < 200; ++trial) {
      auto rho = mt::random_density(2, rng);
      auto rho_t = mt::random_density(2, rng);
      std::uniform_real_distribution<double> wdist(-2.0, 2.0);
      double w = wdist(rng);
      auto v = mt::single_shot_work_verdict(rho, rho_t, spec, spec, w);
      if (v.sufficient) {
        CHECK(v.necessary_alpha0);
        CHECK(v.necessary_alpha1);
        CHECK(v.necessary_alphainf);
      }
      auto up = mt::single_shot_work_verdict(rho, rho_t, spec, spec, w + 0.5);
      if (v.sufficient) CHECK(up.sufficient);
      if (v.necessary_alpha0) CHECK(up.necessary_alpha0);
      if (v.necessary_alpha1) CHECK(up.necessary_alpha1);
      if (v.necessary_alphainf) CHECK(up.necessary_alphainf);
    }
  }
}

TEST_CASE("average work bound on the composite") {
  mt::Rng rng(347);
  double beta = 1.0;
  for (int trial = 0; trial < 25; ++trial) {
    auto spec = qubit_spec(1.0, beta);
    auto spec_t = qubit_spec(0.5, beta);
    auto g = spec.state(), gt = spec_t.state();
    auto rho_s = mt::DensityMatrix::pure(mt::random_pure(2, rng));
    auto rho_t = mt::random_density(2, rng);
    double df = *spec_t.free_energy() - *spec.free_energy();
    double w = df + (mt::q_renyi_inf(rho_t, gt) - mt::q_renyi_0(rho_s, g)) / beta + 0.1;
    auto scw = mt::build_scw(spec, spec_t, w);
    mt::DensityMatrix init{scw.embed(rho_s, 0, 0)};
    mt::DensityMatrix fin{scw.embed(rho_t, 1, 1)};
    auto wit = mt::q_dmaj_sufficient_witness(init, scw.gibbs, fin, scw.gibbs);
    REQUIRE(wit.channel.has_value());
    CHECK(mt::gibbs_preserving(*wit.channel, mt::QGibbsSpec(scw.hamiltonian, beta)));
    auto out = mt::apply_channel(*wit.channel, init);
    // work read off the work-storage marginal
    auto wmarg_in = mt::partial_trace(init, 4, 2, mt::Subsystem::B);
    auto wmarg_out = mt::partial_trace(out, 4, 2, mt::Subsystem::B);
    double work = w * (wmarg_in.matrix()(0, 0).real() - wmarg_out.matrix()(0, 0).real());
    CHECK(work == doctest::Approx(w).epsilon(1e-8));
    CHECK(beta * (work - df) >=
          mt::quantum_kl(rho_t, gt) - mt::quantum_kl(rho_s, g) - 1e-8);
  }
}

TEST_CASE("alpha_free_energy_q") {
  double beta = 1.7;
  auto spec = qubit_spec(0.8, beta);
  auto g = spec.state();
  double f = *spec.free_energy();
  for (double al : {0.0, 1.0, mt::kInf})
    CHECK(mt::alpha_free_energy_q(g, spec, al) == doctest::Approx(f).epsilon(1e-9));

  mt::Rng rng(353);
  for (int trial = 0; trial < 50; ++trial) {
    auto rho = mt::random_density(2, rng);
    double e = (rho.matrix() * spec.hamiltonian).trace().real();
    CHECK(mt::alpha_free_energy_q(rho, spec, 1.0) ==
          doctest::Approx(e - mt::von_neumann(rho) / beta).epsilon(1e-9));
    for (double al : {0.0, 1.0, mt::kInf})
      CHECK(mt::alpha_free_energy_q(rho, spec, al) >= f - 1e-9);
  }

  // qubit numeric spot check: F_inf of the excited state is E_1
  mt::CMat one = mt::CMat::Zero(2, 2);
  one(1, 1) = 1.0;
  CHECK(mt::alpha_free_energy_q(mt::DensityMatrix{std::move(one)}, spec, mt::kInf) ==
        doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("gibbs-preserving map creating coherence") {
  auto inst = mt::coherence_gap_instance(1.0, 1.0);
  CHECK(mt::gibbs_preserving(inst.channel, inst.spec));
  auto out = mt::apply_channel(inst.channel, inst.input);
  CHECK(hs_dist(out.matrix(), inst.output.matrix()) <= 1e-8);
  CHECK(std::abs(out.matrix()(0, 1)) > 0.4);  // genuine energy-basis coherence

  // thermal operations leave a nondegenerate-energy-diagonal input diagonal
  mt::Rng rng(359);
  Eigen::VectorXd etot(4);
  etot << 0.0, 1.0, 1.0, 2.0;  // qubit system + resonant qubit bath
  for (int trial = 0; trial < 20; ++trial) {
    mt::CMat u = mt::random_energy_conserving_unitary(etot, rng);
    auto e = mt::thermal_operation_channel(inst.spec, inst.spec, u);
    auto out_t = mt::apply_channel(e, inst.input);
    CHECK(std::abs(out_t.matrix()(0, 1)) <= 1e-10);
  }
}
