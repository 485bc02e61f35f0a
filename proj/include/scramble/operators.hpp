// Hilbert-space constructions: random and model Hamiltonians, spectra,
// density operators and their roots, embeddings, partial traces, the
// fidelity with the maximally mixed state, and the regularized density
// of states built from ⟨E_n| (1_S ⊗ ρ^{1/2}) |E_n⟩.
#pragma once

#include <cstdint>
#include <optional>

#include "scramble/types.hpp"

namespace scramble {

// Eigendecomposition of a Hermitian operator; energies ascending,
// vectors(:,n) is the eigenvector of energies(n).
struct Spectrum {
  RealVector energies;
  Matrix vectors;
};

// Hermitian, PSD, unit-trace state. Factories fill cached_sqrt with the
// positive Hermitian root.
struct DensityOperator {
  Matrix entries;
  std::optional<Matrix> cached_sqrt;

  Index dim() const { return entries.rows(); }
  const Matrix& sqrt() const;
};

// Probability weights w_n >= 0 attached to energies E_n (ascending),
// summing to 1. beta/f_beta record the construction context; imported
// spectra carry beta = NaN.
struct RegularizedDOS {
  RealVector energies;
  RealVector weights;
  double beta = 0.0;
  double f_beta = 1.0;

  Index size() const { return energies.size(); }
};

namespace operators {

// GUE draw: diagonal N(0,1/dim), off-diagonal complex variance 1/dim,
// so the spectral support approaches [-2,2]. Deterministic in the seed
// (self-contained Box-Muller; no library distributions).
Matrix sample_gue(Index dim, std::uint64_t seed);

Spectrum eigendecompose(const Matrix& h);

// exp(-beta*H_E)/Tr exp(-beta*H_E), computed through the spectrum with a
// max-eigenvalue shift. beta = 0 gives the maximally mixed state.
DensityOperator thermal_state(const Matrix& h_env, double beta);

// Validates Hermiticity/PSD/trace and caches the PSD root.
DensityOperator density_from_matrix(const Matrix& rho);

// Ground-state projector of h_env (lowest eigenvector).
DensityOperator ground_state(const Matrix& h_env);

DensityOperator maximally_mixed(Index dim);

// Diagonal state from a probability vector (renormalized).
DensityOperator diagonal_state(const RealVector& probabilities);

// Positive Hermitian root; eigenvalues in [-1e-12, 0) are clipped to 0,
// anything more negative is rejected.
Matrix operator_sqrt(const Matrix& rho);

// 1_S ⊗ X_E in system-major ordering.
Matrix embed_env(const Matrix& x_env, const SubsystemSplit& split);

// (Tr_E X)[k1][k2] = sum_e X[k1*d_e+e][k2*d_e+e].
Matrix partial_trace_env(const Matrix& x_full, const SubsystemSplit& split);

// f_beta = D_E^{-1/2} Tr sqrt(rho_env), clamped to [0, 1+1e-9].
double fidelity_inf(const DensityOperator& rho_env);

// w_n = (D_E^{1/2} / (f_beta * D)) ⟨E_n| (1_S ⊗ ρ^{1/2}) |E_n⟩.
RegularizedDOS regularized_dos(const Spectrum& spec, const Matrix& sqrt_rho_embedded,
                               const SubsystemSplit& split, double beta, double f_beta);

}  // namespace operators
}  // namespace scramble
