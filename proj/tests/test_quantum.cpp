#include "majtherm/quantum.hpp"

#include "test_support.hpp"

namespace {

mt::CMat cm2(std::initializer_list<mt::Cplx> xs) {
  mt::CMat m(2, 2);
  int k = 0;
  for (auto x : xs) m(k / 2, k % 2) = x, ++k;
  return m;
}

const mt::CVec kPlus = [] {
  mt::CVec v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}();

mt::QuantumChannel dephasing(int d) {
  std::vector<mt::CMat> kraus;
  for (int i = 0; i < d; ++i) {
    mt::CMat p = mt::CMat::Zero(d, d);
    p(i, i) = 1.0;
    kraus.push_back(p);
  }
  return mt::QuantumChannel(std::move(kraus));
}

}  // namespace

TEST_CASE("DensityMatrix construction and spectrum") {
  auto rho = mt::DensityMatrix::diagonal(pv({2.0 / 3, 1.0 / 3}));
  CHECK(rho.eigenvalues()(0) == doctest::Approx(2.0 / 3));
  CHECK(rho.eigenvalues()(1) == doctest::Approx(1.0 / 3));
  CHECK(rho.trace() == doctest::Approx(1.0));

  auto plus = mt::DensityMatrix::pure(kPlus);
  CHECK(plus.eigenvalues()(0) == doctest::Approx(1.0));
  CHECK(plus.eigenvalues()(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(plus.eigenvectors()(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(plus.rank() == 1);

  mt::Rng rng(157);
  for (int trial = 0; trial < 50; ++trial) {
    auto r = mt::random_density(4, rng);
    mt::CMat rebuilt =
        r.eigenvectors() * r.eigenvalues().asDiagonal().toDenseMatrix().cast<mt::Cplx>() *
        r.eigenvectors().adjoint();
    CHECK((rebuilt - r.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
    double prev = mt::kInf;
    for (int i = 0; i < 4; ++i) {
      CHECK(r.eigenvalues()(i) <= prev);
      prev = r.eigenvalues()(i);
    }
  }

  CHECK_THROWS_AS(mt::DensityMatrix(cm2({1.0, 0.5, 0.0, 0.0})), mt::ValidationError);
  CHECK_THROWS_AS(mt::DensityMatrix(cm2({0.8, 0.0, 0.0, 0.8})), mt::ValidationError);
  CHECK_THROWS_AS(mt::DensityMatrix(cm2({1.2, 0.0, 0.0, -0.2})), mt::ValidationError);
}

TEST_CASE("apply_channel") {
  mt::Rng rng(163);
  auto rho = mt::random_density(3, rng);
  auto same = mt::apply_channel(mt::QuantumChannel::identity(3), rho);
  CHECK((same.matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-10);

  auto dephased = mt::apply_channel(dephasing(3), rho);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      mt::Cplx expect = (i == j) ? rho.matrix()(i, i) : mt::Cplx(0, 0);
      CHECK(std::abs(dephased.matrix()(i, j) - expect) <= 1e-10);
    }

  for (int trial = 0; trial < 1000; ++trial) {
    auto e = mt::random_cptp(3, rng);
    auto out = mt::apply_channel(e, mt::random_density(3, rng));
    CHECK(out.eigenvalues().minCoeff() >= -1e-12);
    CHECK(out.trace() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("partial_trace") {
  mt::Rng rng(167);
  auto a = mt::random_density(2, rng), b = mt::random_density(3, rng);
  auto ab = mt::tensor_q(a, b);
  CHECK((mt::partial_trace(ab, 2, 3, mt::Subsystem::A).matrix() - a.matrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
  CHECK((mt::partial_trace(ab, 2, 3, mt::Subsystem::B).matrix() - b.matrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-10);

  mt::CVec bell(4);
  bell << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  auto red = mt::partial_trace(mt::DensityMatrix::pure(bell), 2, 2, mt::Subsystem::A);
  CHECK((red.matrix() - mt::CMat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <= 1e-10);

  auto big = mt::random_density(6, rng);
  CHECK(mt::partial_trace(big, 2, 3, mt::Subsystem::B).trace() == doctest::Approx(1.0));
  CHECK_THROWS_AS(mt::partial_trace(big, 4, 2, mt::Subsystem::A), mt::DimensionMismatch);
}

TEST_CASE("channel predicates") {
  mt::Rng rng(173);
  auto u = mt::haar_unitary(3, rng);
  mt::QuantumChannel uc({u});
  CHECK(uc.trace_preserving());
  CHECK(uc.unital());

  mt::CMat h = mt::CMat::Zero(3, 3);
  h(1, 1) = 0.7;
  h(2, 2) = 1.9;
  mt::QGibbsSpec spec(h, 1.0);
  CHECK(mt::gibbs_preserving(dephasing(3), spec));
  CHECK(!mt::gibbs_preserving(mt::QuantumChannel({mt::haar_unitary(3, rng)}), spec));

  // classical Gibbs-preserving construction holds by design
  for (int trial = 0; trial < 50; ++trial) {
    auto e = mt::random_gibbs_preserving_channel({0.0, 0.7, 1.9}, 1.0, trial);
    CHECK(mt::gibbs_preserving(e, spec));
    CHECK(mt::gibbs_sub_preserving(e, spec, spec));
  }
}

TEST_CASE("distances") {
  mt::Rng rng(179);
  auto rho = mt::random_density(3, rng);
  auto self = mt::distances(rho, rho);
  CHECK(self.trace == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(self.fidelity == doctest::Approx(1.0));
  CHECK(self.purified == doctest::Approx(0.0).epsilon(1e-4));

  auto zero = mt::DensityMatrix::diagonal(pv({1.0, 0.0}));
  auto one = mt::DensityMatrix::diagonal(pv({0.0, 1.0}));
  auto orth = mt::distances(zero, one);
  CHECK(orth.trace == doctest::Approx(1.0));
  CHECK(orth.fidelity == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(orth.purified == doctest::Approx(1.0));

  // commuting pair reduces to the classical quantities
  auto p = pv({0.5, 0.3, 0.2}), q = pv({0.2, 0.5, 0.3});
  auto cl = mt::distances(mt::DensityMatrix::diagonal(p), mt::DensityMatrix::diagonal(q));
  CHECK(cl.trace == doctest::Approx(mt::trace_distance(p, q)));
  double fid = 0.0;
  for (int i = 0; i < 3; ++i) fid += std::sqrt(p[i] * q[i]);
  CHECK(cl.fidelity == doctest::Approx(fid));

  // Fuchs-van de Graaf: D <= P <= sqrt(2D)
  for (int trial = 0; trial < 200; ++trial) {
    auto d = mt::distances(mt::random_density(3, rng), mt::random_density(3, rng));
    CHECK(d.trace <= d.purified + 1e-9);
    CHECK(d.purified <= std::sqrt(2.0 * d.trace) + 1e-9);
  }
}

TEST_CASE("distance monotonicity under CPTP maps") {
  mt::Rng rng(181);
  for (int trial = 0; trial < 300; ++trial) {
    auto rho = mt::random_density(3, rng), sigma = mt::random_density(3, rng);
    auto e = mt::random_cptp(3, rng);
    auto er = mt::apply_channel(e, rho), es = mt::apply_channel(e, sigma);
    CHECK(mt::trace_distance_q(er, es) <= mt::trace_distance_q(rho, sigma) + 1e-9);
    CHECK(mt::fidelity(rho, sigma) <= mt::fidelity(er, es) + 1e-9);
  }
}

TEST_CASE("thermal_operation_channel") {
  mt::CMat hs = mt::CMat::Zero(2, 2), hb = mt::CMat::Zero(2, 2);
  hs(1, 1) = 0.9;
  hb(1, 1) = 0.9;  // matched gap
  mt::QGibbsSpec sys(hs, 1.3), bath(hb, 1.3);

  auto idc = mt::thermal_operation_channel(sys, bath, mt::CMat::Identity(4, 4));
  mt::Rng rng(191);
  auto rho = mt::random_density(2, rng);
  CHECK((mt::apply_channel(idc, rho).matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-10);

  // resonant swap |01> <-> |10| conserves total energy
  mt::CMat swap = mt::CMat::Identity(4, 4);
  swap(1, 1) = swap(2, 2) = 0.0;
  swap(1, 2) = swap(2, 1) = 1.0;
  auto sw = mt::thermal_operation_channel(sys, bath, swap);
  CHECK(mt::gibbs_preserving(sw, sys));

  // random block-Haar unitaries in the degenerate total-energy eigenspaces
  Eigen::VectorXd etot(4);
  etot << 0.0, 0.9, 0.9, 1.8;
  for (int trial = 0; trial < 30; ++trial) {
    auto u = mt::random_energy_conserving_unitary(etot, rng);
    auto e = mt::thermal_operation_channel(sys, bath, u);
    CHECK(mt::gibbs_preserving(e, sys));
  }

  // an energy-non-conserving unitary is rejected
  mt::CMat bad = mt::CMat::Identity(4, 4);
  bad(0, 0) = bad(3, 3) = 0.0;
  bad(0, 3) = bad(3, 0) = 1.0;
  CHECK_THROWS_AS(mt::thermal_operation_channel(sys, bath, bad), mt::EnergyConservationError);
}

TEST_CASE("ancilla-unitary-trace form agrees with the Kraus form") {
  mt::Rng rng(193);
  const int ds = 2, da = 3;
  for (int trial = 0; trial < 30; ++trial) {
    auto sig = mt::random_density(da, rng);
    auto u = mt::haar_unitary(ds * da, rng);
    auto rho = mt::random_density(ds, rng);
    // direct: tr_A[U (rho (x) sigma) U^dagger]
    mt::DensityMatrix joint(u * mt::tensor_c(rho.matrix(), sig.matrix()) * u.adjoint());
    auto direct = mt::partial_trace(joint, ds, da, mt::Subsystem::A);
    // Kraus: M_{k,a} = sqrt(s_a) (I (x) <k|) U (I (x) |a>)
    std::vector<mt::CMat> kraus;
    for (int k = 0; k < da; ++k)
      for (int a = 0; a < da; ++a) {
        double s = sig.eigenvalues()(a);
        if (s <= 0.0) continue;
        mt::CMat m(ds, ds);
        for (int i = 0; i < ds; ++i)
          for (int j = 0; j < ds; ++j) {
            mt::Cplx acc = 0.0;
            for (int c = 0; c < da; ++c)
              acc += u(i * da + k, j * da + c) * sig.eigenvectors()(c, a);
            m(i, j) = acc;
          }
        kraus.push_back(std::sqrt(s) * m);
      }
    mt::QuantumChannel e(std::move(kraus));
    CHECK((e.apply_raw(rho.matrix()) - direct.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("unital random channels satisfy the Kadison inequality") {
  mt::Rng rng(197);
  for (int trial = 0; trial < 200; ++trial) {
    auto e = mt::random_unital(3, rng);
    CHECK(e.unital());
    mt::CMat x = mt::ginibre(3, 3, rng);
    x = ((x + x.adjoint()) / 2.0).eval();  // Hermitian
    mt::CMat gap = e.apply_raw(x * x) - e.apply_raw(x) * e.apply_raw(x);
    Eigen::SelfAdjointEigenSolver<mt::CMat> es(gap);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
}
