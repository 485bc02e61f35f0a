#include "scramble/operators.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace scramble {

SubsystemSplit SubsystemSplit::qubits(int n_s, int n_e) {
  if (n_s < 0 || n_e < 0) throw std::invalid_argument("SubsystemSplit: negative qubit count");
  if (n_s + n_e > 40) throw std::invalid_argument("SubsystemSplit: joint space too large");
  SubsystemSplit s;
  s.n_s = n_s;
  s.n_e = n_e;
  s.d_s = Index{1} << n_s;
  s.d_e = Index{1} << n_e;
  s.d = s.d_s * s.d_e;
  return s;
}

Index max_dense_dim() {
  static const Index limit = [] {
    if (const char* env = std::getenv("SCRAMBLE_MAX_DIM")) {
      long v = std::atol(env);
      if (v > 0) return static_cast<Index>(v);
    }
    return Index{4096};
  }();
  return limit;
}

void check_dense_dim(Index dim) {
  if (dim > max_dense_dim())
    throw std::invalid_argument("dimension " + std::to_string(dim) +
                                " exceeds the dense-diagonalization guard (" +
                                std::to_string(max_dense_dim()) +
                                "); set SCRAMBLE_MAX_DIM to override");
}

const Matrix& DensityOperator::sqrt() const {
  if (!cached_sqrt) throw std::logic_error("DensityOperator: root not cached");
  return *cached_sqrt;
}

namespace operators {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kPsdTol = -1e-12;
constexpr double kTraceTol = 1e-10;

void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(who) + ": matrix is not square");
}

double hermiticity_deviation(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const Matrix& m, const char* who) {
  require_square(m, who);
  double dev = hermiticity_deviation(m);
  if (dev > kHermitianTol)
    throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian (deviation " +
                                std::to_string(dev) + ")");
}

// Uniform double in [0,1) from the top 53 bits; Box-Muller keeps seeded
// draws identical across standard libraries.
double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

std::pair<double, double> normal_pair(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 == 0.0) u1 = uniform01(rng);
  double u2 = uniform01(rng);
  double r = std::sqrt(-2.0 * std::log(u1));
  double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace

Matrix sample_gue(Index dim, std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("sample_gue: dim must be >= 2");
  check_dense_dim(dim);
  std::mt19937_64 rng(seed);
  Matrix h = Matrix::Zero(dim, dim);
  const double diag_sigma = 1.0 / std::sqrt(static_cast<double>(dim));
  const double off_sigma = 1.0 / std::sqrt(2.0 * static_cast<double>(dim));
  for (Index i = 0; i < dim; ++i) {
    auto [z, w] = normal_pair(rng);
    h(i, i) = Complex(diag_sigma * z, 0.0);
    for (Index j = i + 1; j < dim; ++j) {
      auto [x, y] = normal_pair(rng);
      h(i, j) = Complex(off_sigma * x, off_sigma * y);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

Spectrum eigendecompose(const Matrix& h) {
  check_dense_dim(h.rows());
  require_hermitian(h, "eigendecompose");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint()));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: eigensolver failed to converge");
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

DensityOperator thermal_state(const Matrix& h_env, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("thermal_state: beta must be finite and >= 0");
  Spectrum spec = eigendecompose(h_env);
  const Index d = h_env.rows();
  RealVector p(d);
  const double e_min = spec.energies.minCoeff();
  for (Index i = 0; i < d; ++i) p(i) = std::exp(-beta * (spec.energies(i) - e_min));
  p /= p.sum();
  DensityOperator rho;
  rho.entries = spec.vectors * p.asDiagonal() * spec.vectors.adjoint();
  rho.entries = 0.5 * (rho.entries + rho.entries.adjoint().eval());
  Matrix root = spec.vectors * p.cwiseSqrt().asDiagonal() * spec.vectors.adjoint();
  rho.cached_sqrt = 0.5 * (root + root.adjoint().eval());
  return rho;
}

DensityOperator density_from_matrix(const Matrix& rho_in) {
  require_hermitian(rho_in, "density_from_matrix");
  double tr = rho_in.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw std::invalid_argument("density_from_matrix: trace deviates from 1 by " +
                                std::to_string(tr - 1.0));
  DensityOperator rho;
  rho.entries = 0.5 * (rho_in + rho_in.adjoint());
  rho.cached_sqrt = operator_sqrt(rho.entries);
  return rho;
}

DensityOperator ground_state(const Matrix& h_env) {
  Spectrum spec = eigendecompose(h_env);
  Eigen::VectorXcd gs = spec.vectors.col(0);
  DensityOperator rho;
  rho.entries = gs * gs.adjoint();
  rho.cached_sqrt = rho.entries;  // projector is its own root
  return rho;
}

DensityOperator maximally_mixed(Index dim) {
  if (dim < 1) throw std::invalid_argument("maximally_mixed: dim must be >= 1");
  DensityOperator rho;
  rho.entries = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  rho.cached_sqrt = Matrix::Identity(dim, dim) / std::sqrt(static_cast<double>(dim));
  return rho;
}

DensityOperator diagonal_state(const RealVector& probabilities) {
  if (probabilities.size() < 1)
    throw std::invalid_argument("diagonal_state: empty probability vector");
  RealVector p = probabilities;
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) < kPsdTol)
      throw std::invalid_argument("diagonal_state: negative probability at entry " +
                                  std::to_string(i));
    if (p(i) < 0.0) p(i) = 0.0;
  }
  double sum = p.sum();
  if (sum <= 0.0) throw std::invalid_argument("diagonal_state: probabilities sum to zero");
  p /= sum;
  DensityOperator rho;
  rho.entries = p.cast<Complex>().asDiagonal();
  rho.cached_sqrt = p.cwiseSqrt().cast<Complex>().asDiagonal();
  return rho;
}

Matrix operator_sqrt(const Matrix& rho) {
  Spectrum spec = eigendecompose(rho);
  RealVector vals = spec.energies;
  for (Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < kPsdTol)
      throw std::invalid_argument("operator_sqrt: operator is not positive semidefinite "
                                  "(eigenvalue " + std::to_string(vals(i)) + ")");
    if (vals(i) < 0.0) vals(i) = 0.0;
  }
  Matrix root = spec.vectors * vals.cwiseSqrt().asDiagonal() * spec.vectors.adjoint();
  return 0.5 * (root + root.adjoint().eval());
}

Matrix embed_env(const Matrix& x_env, const SubsystemSplit& split) {
  require_square(x_env, "embed_env");
  if (x_env.rows() != split.d_e)
    throw std::invalid_argument("embed_env: operator dimension does not match d_e");
  Matrix full = Matrix::Zero(split.d, split.d);
  for (Index k = 0; k < split.d_s; ++k)
    full.block(k * split.d_e, k * split.d_e, split.d_e, split.d_e) = x_env;
  return full;
}

Matrix partial_trace_env(const Matrix& x_full, const SubsystemSplit& split) {
  require_square(x_full, "partial_trace_env");
  if (x_full.rows() != split.d)
    throw std::invalid_argument("partial_trace_env: operator dimension does not match d");
  Matrix out = Matrix::Zero(split.d_s, split.d_s);
  for (Index k1 = 0; k1 < split.d_s; ++k1)
    for (Index k2 = 0; k2 < split.d_s; ++k2) {
      Complex sum = 0.0;
      for (Index e = 0; e < split.d_e; ++e)
        sum += x_full(k1 * split.d_e + e, k2 * split.d_e + e);
      out(k1, k2) = sum;
    }
  return out;
}

double fidelity_inf(const DensityOperator& rho_env) {
  const double d_e = static_cast<double>(rho_env.dim());
  double f = rho_env.sqrt().trace().real() / std::sqrt(d_e);
  if (f < 0.0) f = 0.0;
  if (f > 1.0 + 1e-9) f = 1.0 + 1e-9;
  return f;
}

RegularizedDOS regularized_dos(const Spectrum& spec, const Matrix& sqrt_rho_embedded,
                               const SubsystemSplit& split, double beta, double f_beta) {
  if (spec.vectors.rows() != split.d || sqrt_rho_embedded.rows() != split.d)
    throw std::invalid_argument("regularized_dos: dimension mismatch");
  if (!(f_beta > 0.0))
    throw std::invalid_argument("regularized_dos: degenerate fidelity (f_beta = 0)");
  const Index d = split.d;
  const double scale = std::sqrt(static_cast<double>(split.d_e)) /
                       (f_beta * static_cast<double>(d));
  RegularizedDOS dos;
  dos.energies = spec.energies;
  dos.weights.resize(d);
  Matrix rv = sqrt_rho_embedded * spec.vectors;
  for (Index n = 0; n < d; ++n) {
    double w = scale * spec.vectors.col(n).dot(rv.col(n)).real();
    if (w < kPsdTol)
      throw std::invalid_argument("regularized_dos: negative weight " + std::to_string(w));
    dos.weights(n) = w < 0.0 ? 0.0 : w;
  }
  double sum = dos.weights.sum();
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::logic_error("regularized_dos: weights sum to " + std::to_string(sum));
  dos.beta = beta;
  dos.f_beta = f_beta;
  return dos;
}

}  // namespace operators
}  // namespace scramble
