// The nearly-fast-scrambler construction: the double-exponential profile g,
// its normalized self-convolution, the inverse-Fourier density of states,
// decay-envelope checks, the Gaussian reference, and the continuum
// scrambling-time upper bound. All deep-tail arithmetic runs in the log
// domain with peak subtraction.
#pragma once

#include <optional>
#include <vector>

#include "scramble/operators.hpp"
#include "scramble/types.hpp"

namespace scramble {

struct QuadratureSpec {
  int panel_order = 32;       // Gauss-Legendre nodes per panel
  double rel_tol = 1e-10;     // refinement target on shifted integrals
  double drop_nats = 120.0;   // truncate where log-integrand < peak - drop_nats
};

struct ContinuumProfile {
  double width = 0.0;    // c*beta
  double norm_sq = 0.0;  // ||g||_2^2
  double int_g = 0.0;    // integral of g
  double c_const = 0.0;  // envelope constant for the normalized profile: 2*int_g/norm_sq
};

struct LogValue {
  double value = 0.0;
  double log_value = 0.0;
};

struct EnvelopeSlack {
  double log_lhs = 0.0;  // log N~(t)
  double log_rhs = 0.0;  // log c_const + log g(t/2)
  double slack = 0.0;    // log_rhs - log_lhs
  bool pass = false;
};

struct GaussianReference {
  double sigma_sq = 0.0;
  std::vector<double> e_grid;
  std::vector<double> dos_values;       // N(E)
  std::vector<double> gauss_dos;        // Gaussian(sigma_sq) density
  std::vector<double> t_grid;
  std::vector<double> ntilde_values;    // N~(t)
  std::vector<double> gauss_ntilde;     // exp(-sigma_sq t^2 / 2)
};

struct ContinuumTsUpper {
  std::optional<double> ts;   // nullopt when the inner logarithms are nonpositive
  double leading_order = 0.0; // (2 width / pi) ln(N_S ln 2)
};

namespace continuum {

// log g(t) = -e^{pi t/width} - e^{-pi t/width}; even in t.
double log_g(double t, double width);
double g(double t, double width);

// |g(t - i tau)| = exp[-(e^{pi t/w} + e^{-pi t/w}) cos(pi tau / w)];
// bounded by 1 only for |tau| < width/2.
double g_modulus_strip(double t, double tau, double width);

ContinuumProfile make_profile(double width, const QuadratureSpec& quad);

// N~(t) = (g*g)(t)/||g||^2 via log-domain panel quadrature with the peak
// located by golden section.
LogValue self_convolution(double t, const ContinuumProfile& profile, const QuadratureSpec& quad);

// Checks log N~(t) <= log c_const + log g(t/2) + 1e-9.
EnvelopeSlack decay_envelope_check(double t, const ContinuumProfile& profile,
                                   const QuadratureSpec& quad);

// N(E) = (2 pi/||g||^2) (g_vee(E))^2 with g_vee(E) = (1/pi) int_0^inf g cos(tE) dt,
// integrated on panels of length pi/max(|E|,1).
double inverse_fourier_dos(double e_value, const ContinuumProfile& profile,
                           const QuadratureSpec& quad);

GaussianReference gaussian_reference(const ContinuumProfile& profile, const QuadratureSpec& quad,
                                     const std::vector<double>& e_grid,
                                     const std::vector<double>& t_grid);

// Variance of N(E) by quadrature (also -d^2 N~/dt^2 at 0).
double dos_variance(const ContinuumProfile& profile, const QuadratureSpec& quad);

// Smallest t with f^2 C^2 exp(-e^{pi t/(2 width)}) <= d_s^{-1-eps}:
// t = (2 width/pi) ln ln(f^2 C^2 d_s^{1+eps}).
ContinuumTsUpper continuum_ts_upper(Index d_s, double epsilon, double f_beta,
                                    const ContinuumProfile& profile);
// Log-domain variant for large qubit counts (d_s = 2^{n_s} never materialized).
ContinuumTsUpper continuum_ts_upper_qubits(double n_s, double epsilon, double f_beta,
                                           const ContinuumProfile& profile);

// Discretized DOS on a uniform grid (spacing de), renormalized to sum 1;
// usable by the bound module.
RegularizedDOS discretized_dos(const ContinuumProfile& profile, const QuadratureSpec& quad,
                               double e_max, double de);

}  // namespace continuum
}  // namespace scramble
