#include "scramble/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace scramble {

void TimeGrid::validate() const {
  if (!(t_min <= t_max)) throw std::invalid_argument("TimeGrid: t_min must not exceed t_max");
  if (points < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
}

std::vector<double> SignalTrace::real_values(double imag_tol) const {
  std::vector<double> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i].imag()) > imag_tol)
      throw std::logic_error("SignalTrace '" + label + "': imaginary residue " +
                             std::to_string(values[i].imag()) + " at index " +
                             std::to_string(i));
    out[i] = values[i].real();
  }
  return out;
}

namespace dynamics {

namespace {

Eigen::VectorXcd evolution_phases(const RealVector& energies, double t) {
  Eigen::VectorXcd phases(energies.size());
  for (Index n = 0; n < energies.size(); ++n) {
    double arg = -energies(n) * t;
    phases(n) = Complex(std::cos(arg), std::sin(arg));
  }
  return phases;
}

}  // namespace

BlockEvolver::BlockEvolver(Spectrum spec, const Matrix& sqrt_rho_env, SubsystemSplit split)
    : spec_(std::move(spec)), split_(split) {
  if (spec_.vectors.rows() != split_.d)
    throw std::invalid_argument("BlockEvolver: spectrum dimension does not match split");
  if (sqrt_rho_env.rows() != split_.d_e)
    throw std::invalid_argument("BlockEvolver: environment root does not match d_e");
  // W = V^dagger (1_S ⊗ ρ^{1/2}); the embedding is applied blockwise.
  w_ = Matrix::Zero(split_.d, split_.d);
  for (Index k = 0; k < split_.d_s; ++k)
    w_.middleCols(k * split_.d_e, split_.d_e) =
        spec_.vectors.middleRows(k * split_.d_e, split_.d_e).adjoint() * sqrt_rho_env;
}

double BlockEvolver::return_probability(double t) const {
  const Index d_e = split_.d_e;
  Eigen::VectorXcd phases = evolution_phases(spec_.energies, t);
  Matrix scaled = phases.asDiagonal() * w_;
  double sum = 0.0;
  for (Index k = 0; k < split_.d_s; ++k) {
    Matrix block = spec_.vectors.middleRows(k * d_e, d_e) * scaled.middleCols(k * d_e, d_e);
    sum += block.squaredNorm();
  }
  return sum / static_cast<double>(split_.d_s);
}

std::pair<double, double> BlockEvolver::mean_reduced_purity(double t) const {
  const Index d_e = split_.d_e;
  const Index d_s = split_.d_s;
  Eigen::VectorXcd phases = evolution_phases(spec_.energies, t);
  Matrix b = spec_.vectors * (phases.asDiagonal() * w_);
  double purity_sum = 0.0;
  double renyi_sum = 0.0;
  Matrix rho_s(d_s, d_s);
  for (Index k = 0; k < d_s; ++k) {
    auto cols = b.middleCols(k * d_e, d_e);
    for (Index k1 = 0; k1 < d_s; ++k1)
      for (Index k2 = 0; k2 < d_s; ++k2)
        rho_s(k1, k2) = (cols.middleRows(k1 * d_e, d_e).array() *
                         cols.middleRows(k2 * d_e, d_e).array().conjugate())
                            .sum();
    double purity = rho_s.squaredNorm();
    purity_sum += purity;
    renyi_sum += -std::log(purity);
  }
  return {purity_sum / static_cast<double>(d_s), renyi_sum / static_cast<double>(d_s)};
}

double return_probability(const Spectrum& spec, const Matrix& sqrt_rho_env,
                          const SubsystemSplit& split, double t) {
  return BlockEvolver(spec, sqrt_rho_env, split).return_probability(t);
}

std::pair<double, double> mean_reduced_purity(const Spectrum& spec, const Matrix& sqrt_rho_env,
                                              const SubsystemSplit& split, double t) {
  return BlockEvolver(spec, sqrt_rho_env, split).mean_reduced_purity(t);
}

double regularized_sff(const RegularizedDOS& dos, double t) {
  Complex sum = 0.0;
  for (Index n = 0; n < dos.size(); ++n) {
    double arg = -dos.energies(n) * t;
    sum += dos.weights(n) * Complex(std::cos(arg), std::sin(arg));
  }
  return dos.f_beta * dos.f_beta * std::norm(sum);
}

double generalized_sff(std::span<const Complex> kraus_traces, Index dim) {
  if (kraus_traces.empty()) throw std::invalid_argument("generalized_sff: empty Kraus list");
  if (dim < 1) throw std::invalid_argument("generalized_sff: dim must be >= 1");
  double sum = 0.0;
  for (const Complex& tr : kraus_traces) sum += std::norm(tr);
  const double d = static_cast<double>(dim);
  return sum / (d * d);
}

Complex char_function(const RegularizedDOS& dos, double t, double tau) {
  if (tau == 0.0) {
    Complex sum = 0.0;
    for (Index n = 0; n < dos.size(); ++n) {
      double arg = -dos.energies(n) * t;
      sum += dos.weights(n) * Complex(std::cos(arg), std::sin(arg));
    }
    return sum;
  }
  double shift = -std::numeric_limits<double>::infinity();
  for (Index n = 0; n < dos.size(); ++n)
    if (dos.weights(n) > 0.0) shift = std::max(shift, -dos.energies(n) * tau);
  if (!std::isfinite(shift)) return Complex(0.0, 0.0);
  Complex sum = 0.0;
  for (Index n = 0; n < dos.size(); ++n) {
    if (dos.weights(n) == 0.0) continue;
    double mag = dos.weights(n) * std::exp(-dos.energies(n) * tau - shift);
    double arg = -dos.energies(n) * t;
    sum += mag * Complex(std::cos(arg), std::sin(arg));
  }
  double log_mag = shift + std::log(std::abs(sum));
  if (log_mag > 709.0)
    throw std::range_error("char_function: exponent overflow at tau = " + std::to_string(tau) +
                           " (log magnitude " + std::to_string(log_mag) +
                           "); use a narrower strip");
  return std::polar(std::exp(log_mag), std::arg(sum));
}

double partition_function(const RegularizedDOS& dos, double tau) {
  Complex z = char_function(dos, 0.0, tau);
  if (std::abs(z.imag()) > 1e-12)
    throw std::logic_error("partition_function: imaginary residue " +
                           std::to_string(z.imag()));
  return z.real();
}

double log_partition_function(const RegularizedDOS& dos, double tau) {
  double shift = -std::numeric_limits<double>::infinity();
  for (Index n = 0; n < dos.size(); ++n)
    if (dos.weights(n) > 0.0) shift = std::max(shift, -dos.energies(n) * tau);
  if (!std::isfinite(shift)) return -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (Index n = 0; n < dos.size(); ++n)
    if (dos.weights(n) > 0.0)
      sum += dos.weights(n) * std::exp(-dos.energies(n) * tau - shift);
  return shift + std::log(sum);
}

double energy_expectation(const RegularizedDOS& dos, double tau) {
  double shift = -std::numeric_limits<double>::infinity();
  for (Index n = 0; n < dos.size(); ++n)
    if (dos.weights(n) > 0.0) shift = std::max(shift, -dos.energies(n) * tau);
  if (!std::isfinite(shift))
    throw std::invalid_argument("energy_expectation: empty distribution");
  double num = 0.0, den = 0.0;
  for (Index n = 0; n < dos.size(); ++n) {
    if (dos.weights(n) == 0.0) continue;
    double w = dos.weights(n) * std::exp(-dos.energies(n) * tau - shift);
    num += w * dos.energies(n);
    den += w;
  }
  return num / den;
}

double renyi_half_env(const DensityOperator& rho_env) {
  double f = operators::fidelity_inf(rho_env);
  if (f <= 0.0) return -std::numeric_limits<double>::infinity();
  return 2.0 * std::log(std::sqrt(static_cast<double>(rho_env.dim())) * f);
}

SignalTrace sweep(const TimeGrid& grid, const std::string& label,
                  const std::function<Complex(double)>& f) {
  grid.validate();
  SignalTrace trace;
  trace.grid = grid;
  trace.label = label;
  trace.values.resize(grid.points);
  for (int i = 0; i < grid.points; ++i) {
    double t = grid.at(i);
    try {
      trace.values[i] = f(t);
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep '" + label + "' failed at t = " + std::to_string(t) +
                               ": " + e.what());
    }
  }
  return trace;
}

SignalTrace sweep_return_probability(const BlockEvolver& evolver, const TimeGrid& grid) {
  return sweep(grid, "P_S", [&](double t) { return Complex(evolver.return_probability(t), 0.0); });
}

SignalTrace sweep_regularized_sff(const RegularizedDOS& dos, const TimeGrid& grid) {
  return sweep(grid, "K_beta", [&](double t) { return Complex(regularized_sff(dos, t), 0.0); });
}

SignalTrace sweep_char_magnitude_sq(const RegularizedDOS& dos, const TimeGrid& grid) {
  return sweep(grid, "char_sq",
               [&](double t) { return Complex(std::norm(char_function(dos, t, 0.0)), 0.0); });
}

std::pair<SignalTrace, SignalTrace> sweep_purity(const BlockEvolver& evolver,
                                                 const TimeGrid& grid) {
  grid.validate();
  SignalTrace purity, renyi;
  purity.grid = renyi.grid = grid;
  purity.label = "purity";
  renyi.label = "S_2";
  purity.values.resize(grid.points);
  renyi.values.resize(grid.points);
  for (int i = 0; i < grid.points; ++i) {
    auto [p, s2] = evolver.mean_reduced_purity(grid.at(i));
    purity.values[i] = Complex(p, 0.0);
    renyi.values[i] = Complex(s2, 0.0);
  }
  return {std::move(purity), std::move(renyi)};
}

}  // namespace dynamics
}  // namespace scramble
