// Time-domain observables: mean return probability, reduced purities,
// regularized and generalized spectral form factors, the characteristic
// function on complex times, and the Euclidean partition function.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scramble/operators.hpp"
#include "scramble/types.hpp"

namespace scramble {

// Uniform closed grid; t_max doubles as the recurrence cutoff T_D.
struct TimeGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 2;

  double at(int i) const { return t_min + (t_max - t_min) * i / (points - 1); }
  double spacing() const { return (t_max - t_min) / (points - 1); }
  void validate() const;
};

struct SignalTrace {
  TimeGrid grid;
  std::vector<Complex> values;
  std::string label;

  // Real part after checking the imaginary residue.
  std::vector<double> real_values(double imag_tol = 1e-10) const;
};

namespace dynamics {

// Cached spectral data for B(t) = exp(-iHt)(1_S ⊗ ρ^{1/2}); one
// eigendecomposition serves every time point.
class BlockEvolver {
 public:
  BlockEvolver(Spectrum spec, const Matrix& sqrt_rho_env, SubsystemSplit split);

  // (1/D_S) sum_k ||B_kk(t)||_F^2, B_kk the (k,k) environment block.
  double return_probability(double t) const;

  // (mean purity of Tr_E rho_k(t), mean Renyi-2 entropy over k).
  std::pair<double, double> mean_reduced_purity(double t) const;

  const Spectrum& spectrum() const { return spec_; }
  const SubsystemSplit& split() const { return split_; }

 private:
  Spectrum spec_;
  SubsystemSplit split_;
  Matrix w_;  // V^dagger (1_S ⊗ ρ^{1/2})
};

double return_probability(const Spectrum& spec, const Matrix& sqrt_rho_env,
                          const SubsystemSplit& split, double t);

std::pair<double, double> mean_reduced_purity(const Spectrum& spec, const Matrix& sqrt_rho_env,
                                              const SubsystemSplit& split, double t);

// K_beta(t) = f_beta^2 |sum_n w_n e^{-i E_n t}|^2.
double regularized_sff(const RegularizedDOS& dos, double t);

// D^{-2} sum_r |Tr A_r(t)|^2.
double generalized_sff(std::span<const Complex> kraus_traces, Index dim);

// N~_beta(t - i tau) = sum_n w_n e^{-i E_n t - E_n tau}; max-exponent shift
// keeps tau != 0 overflow-safe.
Complex char_function(const RegularizedDOS& dos, double t, double tau);

// Z_beta(tau) = N~_beta(-i tau), real and >= 0.
double partition_function(const RegularizedDOS& dos, double tau);

// ln Z_beta(tau); never overflows.
double log_partition_function(const RegularizedDOS& dos, double tau);

// E_beta(tau) = -d ln Z / d tau = sum w_n E_n e^{-E_n tau} / Z.
double energy_expectation(const RegularizedDOS& dos, double tau);

// S_{1/2,E} = 2 ln(D_E^{1/2} f_beta); -inf for a degenerate fidelity.
double renyi_half_env(const DensityOperator& rho_env);

// Per-point evaluation of f over the grid; errors are rethrown with the
// offending t attached.
SignalTrace sweep(const TimeGrid& grid, const std::string& label,
                  const std::function<Complex(double)>& f);

SignalTrace sweep_return_probability(const BlockEvolver& evolver, const TimeGrid& grid);
SignalTrace sweep_regularized_sff(const RegularizedDOS& dos, const TimeGrid& grid);
// |N~_beta(t)|^2 on the real axis.
SignalTrace sweep_char_magnitude_sq(const RegularizedDOS& dos, const TimeGrid& grid);
// Returns {purity trace, mean Renyi-2 trace}.
std::pair<SignalTrace, SignalTrace> sweep_purity(const BlockEvolver& evolver, const TimeGrid& grid);

}  // namespace dynamics
}  // namespace scramble
