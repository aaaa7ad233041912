#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "majtherm/prob.hpp"
#include "majtherm/random.hpp"

namespace majtherm {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline bool is_hermitian(const CMat& m, double tol = 1e-10) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Density operator with its spectrum cached at construction. Eigenvalues are
// sorted non-increasing; tiny negatives (>= -1e-10) are clamped to zero and
// the operator is rebuilt from the clamped spectrum.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMat m, bool allow_subnormalized = false) {
    if (m.rows() != m.cols() || m.rows() < 1) throw ValidationError("DensityMatrix: not square");
    if (!is_hermitian(m)) throw ValidationError("DensityMatrix: not Hermitian within 1e-10");
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    const int d = static_cast<int>(m.rows());
    evals_.resize(d);
    evecs_.resize(d, d);
    for (int k = 0; k < d; ++k) {  // reverse into non-increasing order
      double v = es.eigenvalues()(d - 1 - k);
      if (v < -1e-10) throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(v));
      evals_(k) = std::max(v, 0.0);
      evecs_.col(k) = es.eigenvectors().col(d - 1 - k);
    }
    double tr = evals_.sum();
    if (allow_subnormalized) {
      if (tr > 1.0 + 1e-10) throw ValidationError("DensityMatrix: trace above 1");
    } else if (std::abs(tr - 1.0) > 1e-10) {
      throw ValidationError("DensityMatrix: trace off by " + std::to_string(tr - 1.0));
    }
    m_ = evecs_ * evals_.asDiagonal() * evecs_.adjoint();
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& matrix() const { return m_; }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const CMat& eigenvectors() const { return evecs_; }
  double trace() const { return evals_.sum(); }

  // Eigenvalues as a classical distribution (normalized input assumed).
  ProbVec spectrum() const {
    return ProbVec(std::vector<double>(evals_.data(), evals_.data() + dim()), true);
  }

  int rank(double rank_tol_rel = 1e-10) const {
    double cut = rank_tol_rel * std::max(evals_(0), 1e-300);
    int r = 0;
    for (int k = 0; k < dim(); ++k)
      if (evals_(k) > cut) ++r;
    return r;
  }

  CMat support_projector(double rank_tol_rel = 1e-10) const {
    int r = rank(rank_tol_rel);
    return evecs_.leftCols(r) * evecs_.leftCols(r).adjoint();
  }

  // f applied to the spectrum on the support, zero on the kernel.
  CMat spectral_fn(const std::function<double(double)>& f, double rank_tol_rel = 1e-10) const {
    double cut = rank_tol_rel * std::max(evals_(0), 1e-300);
    Eigen::VectorXd fv = Eigen::VectorXd::Zero(dim());
    for (int k = 0; k < dim(); ++k)
      if (evals_(k) > cut) fv(k) = f(evals_(k));
    return evecs_ * fv.asDiagonal() * evecs_.adjoint();
  }

  static DensityMatrix pure(const CVec& psi) {
    CVec n = psi / psi.norm();
    return DensityMatrix(n * n.adjoint());
  }
  static DensityMatrix diagonal(const ProbVec& p) {
    CMat m = CMat::Zero(p.dim(), p.dim());
    for (int i = 0; i < p.dim(); ++i) m(i, i) = p[i];
    return DensityMatrix(std::move(m));
  }
  static DensityMatrix maximally_mixed(int d) {
    return DensityMatrix(CMat::Identity(d, d) / static_cast<double>(d));
  }

 private:
  CMat m_;
  Eigen::VectorXd evals_;
  CMat evecs_;
};

// Channel in Kraus form E(rho) = sum_k M_k rho M_k^dagger. Trace-preserving
// within 1e-9, or merely trace-nonincreasing when the flag is set.
class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<CMat> kraus, bool allow_trace_nonincreasing = false)
      : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw ValidationError("QuantumChannel: no Kraus operators");
    const Eigen::Index din = kraus_.front().cols(), dout = kraus_.front().rows();
    for (const CMat& k : kraus_)
      if (k.cols() != din || k.rows() != dout)
        throw ValidationError("QuantumChannel: inconsistent Kraus shapes");
    CMat acc = CMat::Zero(din, din);
    for (const CMat& k : kraus_) acc += k.adjoint() * k;
    double dev = (acc - CMat::Identity(din, din)).cwiseAbs().maxCoeff();
    trace_preserving_ = dev <= 1e-9;
    if (!trace_preserving_) {
      if (!allow_trace_nonincreasing)
        throw ValidationError("QuantumChannel: not trace-preserving (deviation " +
                              std::to_string(dev) + ")");
      Eigen::SelfAdjointEigenSolver<CMat> es(acc);
      if (es.eigenvalues().maxCoeff() > 1.0 + 1e-9)
        throw ValidationError("QuantumChannel: trace-increasing");
    }
  }

  const std::vector<CMat>& kraus() const { return kraus_; }
  int dim_in() const { return static_cast<int>(kraus_.front().cols()); }
  int dim_out() const { return static_cast<int>(kraus_.front().rows()); }
  bool trace_preserving() const { return trace_preserving_; }

  CMat apply_raw(const CMat& rho) const {
    CMat out = CMat::Zero(dim_out(), dim_out());
    for (const CMat& k : kraus_) out += k * rho * k.adjoint();
    return out;
  }

  bool unital(double tol = 1e-8) const {
    if (dim_in() != dim_out()) return false;
    CMat acc = CMat::Zero(dim_out(), dim_out());
    for (const CMat& k : kraus_) acc += k * k.adjoint();
    return (acc - CMat::Identity(dim_out(), dim_out())).cwiseAbs().maxCoeff() <= tol;
  }

  static QuantumChannel identity(int d) {
    return QuantumChannel({CMat::Identity(d, d)});
  }

 private:
  std::vector<CMat> kraus_;
  bool trace_preserving_ = true;
};

inline DensityMatrix apply_channel(const QuantumChannel& e, const DensityMatrix& rho) {
  if (e.dim_in() != rho.dim()) throw DimensionMismatch("apply_channel: dims differ");
  return DensityMatrix(e.apply_raw(rho.matrix()), /*allow_subnormalized=*/true);
}

// Hermitian Hamiltonian with inverse temperature; rho^G = e^{-beta H}/Z.
struct QGibbsSpec {
  CMat hamiltonian;
  double beta = 1.0;

  QGibbsSpec(CMat h, double b) : hamiltonian(std::move(h)), beta(b) {
    if (hamiltonian.rows() != hamiltonian.cols())
      throw ValidationError("QGibbsSpec: Hamiltonian not square");
    if (!is_hermitian(hamiltonian, 1e-10)) throw ValidationError("QGibbsSpec: not Hermitian");
    if (beta < 0.0) throw ValidationError("QGibbsSpec: beta < 0");
  }

  int dim() const { return static_cast<int>(hamiltonian.rows()); }

  Eigen::VectorXd energies() const {
    Eigen::SelfAdjointEigenSolver<CMat> es(hamiltonian);
    return es.eigenvalues();
  }

  double log_z() const {
    Eigen::VectorXd e = energies();
    std::vector<double> a(static_cast<std::size_t>(e.size()));
    for (Eigen::Index i = 0; i < e.size(); ++i) a[static_cast<std::size_t>(i)] = -beta * e(i);
    return log_sum_exp(a);
  }
  double z() const { return std::exp(log_z()); }
  std::optional<double> free_energy() const {
    if (beta == 0.0) return std::nullopt;
    return -log_z() / beta;
  }

  DensityMatrix state() const {
    Eigen::SelfAdjointEigenSolver<CMat> es(hamiltonian);
    const double lz = log_z();
    Eigen::VectorXd w(dim());
    for (int i = 0; i < dim(); ++i) w(i) = std::exp(-beta * es.eigenvalues()(i) - lz);
    CMat m = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    return DensityMatrix(std::move(m));
  }

  // e^{-beta H}, unnormalized.
  CMat weight_operator() const {
    Eigen::SelfAdjointEigenSolver<CMat> es(hamiltonian);
    Eigen::VectorXd w(dim());
    for (int i = 0; i < dim(); ++i) w(i) = std::exp(-beta * es.eigenvalues()(i));
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  }
};

inline CMat tensor_c(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline DensityMatrix tensor_q(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(tensor_c(a.matrix(), b.matrix()), true);
}

enum class Subsystem { A, B };

inline DensityMatrix partial_trace(const DensityMatrix& rho, int d_a, int d_b, Subsystem keep) {
  if (d_a * d_b != rho.dim()) throw DimensionMismatch("partial_trace: bad factorization");
  const CMat& m = rho.matrix();
  if (keep == Subsystem::A) {
    CMat out = CMat::Zero(d_a, d_a);
    for (int i = 0; i < d_a; ++i)
      for (int j = 0; j < d_a; ++j)
        for (int b = 0; b < d_b; ++b) out(i, j) += m(i * d_b + b, j * d_b + b);
    return DensityMatrix(std::move(out), true);
  }
  CMat out = CMat::Zero(d_b, d_b);
  for (int i = 0; i < d_b; ++i)
    for (int j = 0; j < d_b; ++j)
      for (int a = 0; a < d_a; ++a) out(i, j) += m(a * d_b + i, a * d_b + j);
  return DensityMatrix(std::move(out), true);
}

// --- Distances ---------------------------------------------------------------

inline double trace_distance_q(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("trace_distance_q: dims differ");
  Eigen::SelfAdjointEigenSolver<CMat> es(rho.matrix() - sigma.matrix());
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// F = tr sqrt(sqrt(rho) sigma sqrt(rho)).
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("fidelity: dims differ");
  CMat sr = rho.spectral_fn([](double x) { return std::sqrt(x); }, 0.0);
  Eigen::SelfAdjointEigenSolver<CMat> es(sr * sigma.matrix() * sr);
  double f = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    f += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return std::min(f, 1.0);
}

inline double purified_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  double f = fidelity(rho, sigma);
  return std::sqrt(std::max(1.0 - f * f, 0.0));
}

struct QDistances {
  double trace, fidelity, purified;
};

inline QDistances distances(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return {trace_distance_q(rho, sigma), fidelity(rho, sigma), purified_distance(rho, sigma)};
}

// --- Channel predicates ------------------------------------------------------

inline bool gibbs_preserving(const QuantumChannel& e, const QGibbsSpec& spec, double tol = 1e-8) {
  if (e.dim_in() != spec.dim() || e.dim_out() != spec.dim()) return false;
  DensityMatrix g = spec.state();
  return trace_distance_q(apply_channel(e, g), g) <= tol;
}

// E(e^{-beta H_in}) <= e^{-beta H_out} as operators.
inline bool gibbs_sub_preserving(const QuantumChannel& e, const QGibbsSpec& spec_in,
                                 const QGibbsSpec& spec_out, double tol = 1e-8) {
  if (e.dim_in() != spec_in.dim() || e.dim_out() != spec_out.dim()) return false;
  CMat gap = spec_out.weight_operator() - e.apply_raw(spec_in.weight_operator());
  Eigen::SelfAdjointEigenSolver<CMat> es(gap);
  return es.eigenvalues().minCoeff() >= -tol;
}

// --- Thermal operations ------------------------------------------------------

struct EnergyConservationError : std::runtime_error {
  double commutator_norm;
  explicit EnergyConservationError(double n)
      : std::runtime_error("unitary violates total-energy conservation (norm " +
                           std::to_string(n) + ")"),
        commutator_norm(n) {}
};

// E_S(rho) = tr_B[U (rho (x) rho_B^G) U^dagger] with [U, H_S + H_B] = 0.
// Kraus operators M_{k,l} = sqrt(g_l) <k|_B U |l>_B in the bath eigenbasis.
inline QuantumChannel thermal_operation_channel(const QGibbsSpec& sys, const QGibbsSpec& bath,
                                                const CMat& u) {
  const int ds = sys.dim(), db = bath.dim(), d = ds * db;
  if (u.rows() != d || u.cols() != d)
    throw DimensionMismatch("thermal_operation_channel: unitary size");
  if ((u * u.adjoint() - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("thermal_operation_channel: not unitary");
  CMat htot = tensor_c(sys.hamiltonian, CMat::Identity(db, db)) +
              tensor_c(CMat::Identity(ds, ds), bath.hamiltonian);
  double comm = (u * htot - htot * u).norm();  // Frobenius bounds the operator norm
  if (comm > 1e-8) throw EnergyConservationError(comm);

  // Bath Gibbs weights in the bath eigenbasis; rotate U into that basis.
  Eigen::SelfAdjointEigenSolver<CMat> eb(bath.hamiltonian);
  Eigen::VectorXd g(db);
  const double lz = bath.log_z();
  for (int l = 0; l < db; ++l) g(l) = std::exp(-bath.beta * eb.eigenvalues()(l) - lz);
  CMat ub = tensor_c(CMat::Identity(ds, ds), eb.eigenvectors()).adjoint() * u *
            tensor_c(CMat::Identity(ds, ds), eb.eigenvectors());

  std::vector<CMat> kraus;
  kraus.reserve(static_cast<std::size_t>(db) * static_cast<std::size_t>(db));
  for (int k = 0; k < db; ++k) {
    for (int l = 0; l < db; ++l) {
      CMat m(ds, ds);
      for (int sp = 0; sp < ds; ++sp)
        for (int s = 0; s < ds; ++s) m(sp, s) = ub(sp * db + k, s * db + l);
      m *= std::sqrt(g(l));
      if (m.cwiseAbs().maxCoeff() > 1e-14) kraus.push_back(std::move(m));
    }
  }
  return QuantumChannel(std::move(kraus));
}

// --- Random generators -------------------------------------------------------

inline CMat ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = Cplx(gauss(rng), gauss(rng));
  return g;
}

// Haar-distributed unitary: QR of a Ginibre matrix with phase correction.
inline CMat haar_unitary(int d, Rng& rng) {
  CMat g = ginibre(d, d, rng);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    Cplx ph = r(j, j) / std::abs(r(j, j));
    q.col(j) *= ph;
  }
  return q;
}

inline DensityMatrix random_density(int d, Rng& rng, int rank = 0) {
  if (rank <= 0) rank = d;
  CMat g = ginibre(d, rank, rng);
  CMat w = g * g.adjoint();
  return DensityMatrix(w / w.trace().real());
}

inline CVec random_pure(int d, Rng& rng) {
  CVec v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

// Stinespring: first d columns of a Haar unitary on d*k give an isometry whose
// row blocks are the Kraus operators.
inline QuantumChannel random_cptp(int d, Rng& rng, int kraus_count = 0) {
  if (kraus_count <= 0) kraus_count = d;
  CMat u = haar_unitary(d * kraus_count, rng);
  std::vector<CMat> kraus;
  for (int k = 0; k < kraus_count; ++k) kraus.push_back(u.block(k * d, 0, d, d));
  return QuantumChannel(std::move(kraus));
}

// Random mixture of Haar unitaries: unital and CPTP by construction.
inline QuantumChannel random_unital(int d, Rng& rng, int terms = 3) {
  ProbVec w = random_prob(terms, rng);
  std::vector<CMat> kraus;
  for (int k = 0; k < terms; ++k) kraus.push_back(std::sqrt(w[k]) * haar_unitary(d, rng));
  return QuantumChannel(std::move(kraus));
}

// Block-Haar unitary acting within the degenerate clusters of the given
// diagonal energies: commutes with diag(energies) by construction.
inline CMat random_energy_conserving_unitary(const Eigen::VectorXd& energies, Rng& rng,
                                             double degeneracy_tol = 1e-9) {
  const int d = static_cast<int>(energies.size());
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return energies(a) < energies(b); });
  CMat u = CMat::Zero(d, d);
  int start = 0;
  while (start < d) {
    int stop = start + 1;
    while (stop < d &&
           energies(idx[static_cast<std::size_t>(stop)]) -
                   energies(idx[static_cast<std::size_t>(start)]) <=
               degeneracy_tol)
      ++stop;
    const int n = stop - start;
    CMat block = haar_unitary(n, rng);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        u(idx[static_cast<std::size_t>(start + a)], idx[static_cast<std::size_t>(start + b)]) =
            block(a, b);
    start = stop;
  }
  return u;
}

// Classical Gibbs-preserving stochastic map embedded in the eigenbasis
// (Kraus sqrt(T_ij)|i><j|): dephases, then mixes levels with the fixed point
// at the Gibbs distribution of `energies`.
inline QuantumChannel random_gibbs_preserving_channel(const std::vector<double>& energies,
                                                      double beta, std::uint64_t seed) {
  GibbsSpec spec(energies, beta);
  StochasticMatrix t = random_stochastic_fixed_point(spec.state(), seed);
  const int d = spec.dim();
  std::vector<CMat> kraus;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (t(i, j) <= 0.0) continue;
      CMat m = CMat::Zero(d, d);
      m(i, j) = std::sqrt(t(i, j));
      kraus.push_back(std::move(m));
    }
  return QuantumChannel(std::move(kraus));
}

}  // namespace majtherm
