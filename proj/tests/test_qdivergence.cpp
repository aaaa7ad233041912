#include "majtherm/qdivergence.hpp"

#include "test_support.hpp"

namespace {

const mt::CVec kPlus = [] {
  mt::CVec v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}();

mt::ConvexFnSpec fn_neg_log() {
  return {[](double x) { return -std::log(x); }, mt::kInf, 0.0, "neglog"};
}

}  // namespace

TEST_CASE("von_neumann") {
  CHECK(mt::von_neumann(mt::DensityMatrix::pure(kPlus)) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(mt::von_neumann(mt::DensityMatrix::maximally_mixed(5)) == doctest::Approx(std::log(5.0)));
  CHECK(mt::von_neumann(mt::DensityMatrix::diagonal(pv({2.0 / 3, 1.0 / 6, 1.0 / 6}))) ==
        doctest::Approx(0.8676).epsilon(1e-4));
}

TEST_CASE("quantum_kl") {
  mt::Rng rng(199);
  auto rho = mt::random_density(3, rng);
  CHECK(mt::quantum_kl(rho, rho) == doctest::Approx(0.0).epsilon(1e-9));

  auto p = pv({0.5, 0.3, 0.2}), q = pv({0.2, 0.5, 0.3});
  CHECK(mt::quantum_kl(mt::DensityMatrix::diagonal(p), mt::DensityMatrix::diagonal(q)) ==
        doctest::Approx(mt::kl_divergence(p, q)));

  CHECK(mt::quantum_kl(mt::DensityMatrix::pure(kPlus), mt::DensityMatrix::maximally_mixed(2)) ==
        doctest::Approx(std::log(2.0)));

  // support violation
  auto zero = mt::DensityMatrix::diagonal(pv({1.0, 0.0}));
  auto one = mt::DensityMatrix::diagonal(pv({0.0, 1.0}));
  CHECK(std::isinf(mt::quantum_kl(zero, one)));
}

TEST_CASE("q_renyi_0 and q_renyi_inf") {
  mt::Rng rng(211);
  auto rho = mt::random_density(3, rng);
  auto sigma = mt::random_density(3, rng);
  CHECK(mt::q_renyi_0(rho, sigma) == doctest::Approx(0.0).epsilon(1e-9));  // equal supports
  CHECK(mt::q_renyi_inf(rho, rho) == doctest::Approx(0.0).epsilon(1e-9));

  auto zero = mt::DensityMatrix::diagonal(pv({1.0, 0.0}));
  CHECK(mt::q_renyi_0(zero, mt::DensityMatrix::maximally_mixed(2)) ==
        doctest::Approx(std::log(2.0)));
  auto g = mt::DensityMatrix::diagonal(pv({2.0 / 3, 1.0 / 3}));
  CHECK(mt::q_renyi_0(mt::DensityMatrix::pure(kPlus), g) == doctest::Approx(std::log(2.0)));
  CHECK(mt::q_renyi_inf(zero, g) == doctest::Approx(std::log(1.5)));
  CHECK(mt::q_renyi_inf(mt::DensityMatrix::diagonal(pv({0.0, 1.0})), g) ==
        doctest::Approx(std::log(3.0)));
}

TEST_CASE("petz_renyi") {
  auto p = pv({0.5, 0.3, 0.2}), q = pv({0.2, 0.5, 0.3});
  auto dp = mt::DensityMatrix::diagonal(p), dq = mt::DensityMatrix::diagonal(q);
  double direct2 = 0.0;
  for (int i = 0; i < 3; ++i) direct2 += p[i] * p[i] / q[i];
  CHECK(mt::petz_renyi(dp, dq, 2.0) == doctest::Approx(std::log(direct2)));

  mt::Rng rng(223);
  auto rho = mt::random_density(3, rng), sigma = mt::random_density(3, rng);
  CHECK(mt::petz_renyi(rho, rho, 0.7) == doctest::Approx(0.0).epsilon(1e-8));

  // alpha = 1/2 equals -2 ln tr[rho^{1/2} sigma^{1/2}]
  mt::CMat sr = rho.spectral_fn([](double x) { return std::sqrt(x); }, 0.0);
  mt::CMat ss = sigma.spectral_fn([](double x) { return std::sqrt(x); }, 0.0);
  CHECK(mt::petz_renyi(rho, sigma, 0.5) ==
        doctest::Approx(-2.0 * std::log((sr * ss).trace().real())));

  // limits toward the special points
  CHECK(std::abs(mt::petz_renyi(rho, sigma, 1.0 + 1e-4) - mt::quantum_kl(rho, sigma)) <= 1e-3);
  CHECK(std::abs(mt::petz_renyi(rho, sigma, 1.0 - 1e-4) - mt::quantum_kl(rho, sigma)) <= 1e-3);
  CHECK(std::abs(mt::petz_renyi(rho, sigma, 1e-6) - mt::q_renyi_0(rho, sigma)) <= 1e-4);

  CHECK(mt::petz_monotonicity_guaranteed(2.0));
  CHECK(!mt::petz_monotonicity_guaranteed(2.5));
}

TEST_CASE("sandwiched_renyi") {
  mt::Rng rng(227);
  auto rho = mt::random_density(3, rng), sigma = mt::random_density(3, rng);
  CHECK(mt::sandwiched_renyi(rho, sigma, 0.5) ==
        doctest::Approx(-2.0 * std::log(mt::fidelity(rho, sigma))));
  CHECK(std::abs(mt::sandwiched_renyi(rho, sigma, 1e4) - mt::q_renyi_inf(rho, sigma)) <= 1e-3);

  auto p = pv({0.5, 0.3, 0.2}), q = pv({0.2, 0.5, 0.3});
  for (double al : {0.5, 0.8, 1.5, 3.0})
    CHECK(mt::sandwiched_renyi(mt::DensityMatrix::diagonal(p), mt::DensityMatrix::diagonal(q),
                               al) == doctest::Approx(mt::renyi_divergence(p, q, al)));

  double prev = -1.0;
  for (double al : {0.5, 0.7, 1.0, 1.5, 2.0, 5.0, mt::kInf}) {
    double v = mt::sandwiched_renyi(rho, sigma, al);
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
}

TEST_CASE("ordering chain across the divergence zoo") {
  mt::Rng rng(229);
  for (int trial = 0; trial < 100; ++trial) {
    auto rho = mt::random_density(3, rng), sigma = mt::random_density(3, rng);
    double s0 = mt::q_renyi_0(rho, sigma);
    double s1 = mt::quantum_kl(rho, sigma);
    double si = mt::q_renyi_inf(rho, sigma);
    CHECK(s0 <= s1 + 1e-9);
    CHECK(s1 <= si + 1e-9);
    for (double al : {0.3, 0.6, 0.9})
      CHECK(mt::petz_renyi(rho, sigma, al) <= s1 + 1e-9);
    for (double al : {1.2, 2.0, 4.0}) {
      double v = mt::sandwiched_renyi(rho, sigma, al);
      CHECK(s1 <= v + 1e-9);
      CHECK(v <= si + 1e-9);
    }
  }
}

TEST_CASE("monotonicity under random CPTP channels") {
  mt::Rng rng(233);
  auto klf = mt::fn_kl();
  auto chi = mt::fn_chi2();
  auto nlog = fn_neg_log();
  auto pw = mt::fn_power(1.5);
  for (int trial = 0; trial < 250; ++trial) {
    auto rho = mt::random_density(3, rng), sigma = mt::random_density(3, rng);
    auto e = mt::random_cptp(3, rng);
    auto er = mt::apply_channel(e, rho), es = mt::apply_channel(e, sigma);
    CHECK(mt::quantum_kl(er, es) <= mt::quantum_kl(rho, sigma) + 1e-8);
    CHECK(mt::q_renyi_0(er, es) <= mt::q_renyi_0(rho, sigma) + 1e-8);
    CHECK(mt::q_renyi_inf(er, es) <= mt::q_renyi_inf(rho, sigma) + 1e-8);
    for (double al : {0.4, 0.8, 1.6, 2.0})
      CHECK(mt::petz_renyi(er, es, al) <= mt::petz_renyi(rho, sigma, al) + 1e-8);
    for (double al : {0.5, 1.5, 3.0, mt::kInf})
      CHECK(mt::sandwiched_renyi(er, es, al) <= mt::sandwiched_renyi(rho, sigma, al) + 1e-8);
    for (const auto& f : {klf, chi, nlog, pw})
      CHECK(mt::petz_quasi_entropy(er, es, f) <= mt::petz_quasi_entropy(rho, sigma, f) + 1e-8);
  }
}

TEST_CASE("joint convexity") {
  mt::Rng rng(239);
  for (int trial = 0; trial < 100; ++trial) {
    auto w = mt::random_prob(3, rng);
    std::vector<mt::DensityMatrix> rhos, sigmas;
    mt::CMat rmix = mt::CMat::Zero(3, 3), smix = mt::CMat::Zero(3, 3);
    for (int k = 0; k < 3; ++k) {
      rhos.push_back(mt::random_density(3, rng, 2));  // rank-deficient makes S_0 non-trivial
      sigmas.push_back(mt::random_density(3, rng));
      rmix += w[k] * rhos.back().matrix();
      smix += w[k] * sigmas.back().matrix();
    }
    mt::DensityMatrix rm(rmix), sm(smix);
    double lhs1 = mt::quantum_kl(rm, sm), rhs1 = 0.0;
    double lhs0 = mt::q_renyi_0(rm, sm), rhs0 = 0.0;
    for (int k = 0; k < 3; ++k) {
      rhs1 += w[k] * mt::quantum_kl(rhos[static_cast<std::size_t>(k)],
                                    sigmas[static_cast<std::size_t>(k)]);
      rhs0 += w[k] * mt::q_renyi_0(rhos[static_cast<std::size_t>(k)],
                                   sigmas[static_cast<std::size_t>(k)]);
    }
    CHECK(lhs1 <= rhs1 + 1e-8);
    CHECK(lhs0 <= rhs0 + 1e-8);
  }
}

TEST_CASE("subadditivity and strong subadditivity") {
  mt::Rng rng(241);
  for (int trial = 0; trial < 100; ++trial) {
    auto abc = mt::random_density(8, rng);
    auto ab = mt::partial_trace(abc, 4, 2, mt::Subsystem::A);   // traces out C
    auto bc = mt::partial_trace(abc, 2, 4, mt::Subsystem::B);   // traces out A
    auto b = mt::partial_trace(ab, 2, 2, mt::Subsystem::B);
    auto a = mt::partial_trace(ab, 2, 2, mt::Subsystem::A);
    CHECK(mt::von_neumann(ab) <= mt::von_neumann(a) + mt::von_neumann(b) + 1e-9);
    CHECK(mt::von_neumann(abc) + mt::von_neumann(b) <=
          mt::von_neumann(ab) + mt::von_neumann(bc) + 1e-8);
  }
}

TEST_CASE("petz_quasi_entropy") {
  mt::Rng rng(251);
  auto rho = mt::random_density(3, rng), sigma = mt::random_density(3, rng);
  CHECK(mt::petz_quasi_entropy(rho, sigma, mt::fn_kl()) ==
        doctest::Approx(mt::quantum_kl(rho, sigma)).epsilon(1e-9));

  mt::CMat sinv = sigma.spectral_fn([](double x) { return 1.0 / x; }, 0.0);
  double direct = (rho.matrix() * rho.matrix() * sinv).trace().real();
  CHECK(mt::petz_quasi_entropy(rho, sigma, mt::fn_chi2()) == doctest::Approx(direct));

  auto p = pv({0.5, 0.3, 0.2}), q = pv({0.2, 0.5, 0.3});
  CHECK(mt::petz_quasi_entropy(mt::DensityMatrix::diagonal(p), mt::DensityMatrix::diagonal(q),
                               mt::fn_hellinger()) ==
        doctest::Approx(mt::f_divergence(p, q, mt::fn_hellinger())));

  auto rd = mt::random_density(3, rng, 2);
  CHECK_THROWS_AS(mt::petz_quasi_entropy(rd, sigma, fn_neg_log()), mt::ValidationError);

  // modular-operator route reproduces the double spectral sum
  mt::ModularAction mod(rho, sigma);
  mt::CMat shalf = sigma.spectral_fn([](double x) { return std::sqrt(x); }, 0.0);
  mt::CMat applied = mod.apply(mt::fn_chi2(), shalf);
  CHECK((shalf * applied).trace().real() ==
        doctest::Approx(mt::petz_quasi_entropy(rho, sigma, mt::fn_chi2())).epsilon(1e-9));
}

TEST_CASE("quantum_fisher") {
  // diagonal family reduces to the classical Fisher information
  mt::QParamFamily diag;
  diag.m = 1;
  diag.state_at = [](const std::vector<double>& th) {
    return mt::DensityMatrix::diagonal(pv({th[0], 1.0 - th[0]}));
  };
  CHECK(mt::quantum_fisher(diag, {0.3}, mt::FisherKind::SLD)(0, 0) ==
        doctest::Approx(1.0 / (0.3 * 0.7)).epsilon(1e-6));

  // qubit z-family: J = 1/(1-theta^2)
  mt::QParamFamily zfam;
  zfam.m = 1;
  zfam.state_at = [](const std::vector<double>& th) {
    mt::CMat m = mt::CMat::Zero(2, 2);
    m(0, 0) = (1.0 + th[0]) / 2.0;
    m(1, 1) = (1.0 - th[0]) / 2.0;
    return mt::DensityMatrix(std::move(m));
  };
  CHECK(mt::quantum_fisher(zfam, {0.5}, mt::FisherKind::SLD)(0, 0) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-6));

  // constant family
  mt::Rng rng(257);
  auto fixed = mt::random_density(3, rng);
  mt::QParamFamily cfam;
  cfam.m = 2;
  cfam.state_at = [&](const std::vector<double>&) { return fixed; };
  CHECK(mt::quantum_fisher(cfam, {0.1, 0.2}, mt::FisherKind::SLD).cwiseAbs().maxCoeff() <= 1e-7);
  CHECK(mt::quantum_fisher(cfam, {0.1, 0.2}, mt::FisherKind::RLD).cwiseAbs().maxCoeff() <= 1e-7);

  // x-rotation family: RLD >= SLD and monotone under a fixed CPTP map
  auto rot_family = [&](const mt::QuantumChannel* post) {
    mt::QParamFamily fam;
    fam.m = 1;
    fam.state_at = [post](const std::vector<double>& th) {
      // exp(-i th sigma_y / 2) is a real rotation by th/2
      double c = std::cos(th[0] / 2.0), s = std::sin(th[0] / 2.0);
      mt::CMat u(2, 2);
      u << c, -s, s, c;
      mt::CMat base = mt::CMat::Zero(2, 2);
      base(0, 0) = 0.8;
      base(1, 1) = 0.2;
      mt::CMat m = u * base * u.adjoint();
      mt::DensityMatrix rho{std::move(m)};
      if (post) return mt::apply_channel(*post, rho);
      return rho;
    };
    return fam;
  };
  double sld = mt::quantum_fisher(rot_family(nullptr), {0.4}, mt::FisherKind::SLD)(0, 0);
  double rld = mt::quantum_fisher(rot_family(nullptr), {0.4}, mt::FisherKind::RLD)(0, 0);
  CHECK(rld >= sld - 1e-6);
  for (int trial = 0; trial < 20; ++trial) {
    auto e = mt::random_cptp(2, rng);
    double pushed = mt::quantum_fisher(rot_family(&e), {0.4}, mt::FisherKind::SLD)(0, 0);
    CHECK(pushed <= sld + 1e-6);
  }
}
