// Quantitative speed-limit machinery: Z_max, the secant-weighted decay rate
// and its thermodynamic form, Lambda_ell rescalings, double-exponential
// envelopes and exceptional-set budgets, the t_s lower bounds, strip
// optimization, and the conformal/Poisson-kernel infrastructure behind the
// decay theorem.
#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "scramble/dynamics.hpp"
#include "scramble/operators.hpp"
#include "scramble/types.hpp"

namespace scramble {

// Euclidean-time interval [tau1, tau2] containing 0; width is the strip
// width c*beta.
struct StripInterval {
  double tau1 = 0.0;
  double tau2 = 0.0;

  double width() const { return tau2 - tau1; }
  double mid() const { return 0.5 * (tau1 + tau2); }
  void validate() const;
};

// Double-exponential lower envelope z_max^2 exp(-lambda exp(pi t / width)).
struct EnvelopeParams {
  double z_max = 1.0;
  double lambda = 0.0;
  double width = 1.0;
};

struct EnvelopeValue {
  double value = 0.0;
  double log_value = 0.0;
};

struct BoundReport {
  double z_max = 1.0;
  double log_z_max = 0.0;
  double lambda_tilde = 0.0;
  double ell = 0.0;
  double lambda_ell = 0.0;
  double lambda_eff = 0.0;  // e^ell * lambda_ell (effective rate; optimal at ell = sqrt(3)-1)
  double f_beta = 1.0;
  double p_scr = 0.0;
  double ts_raw = 0.0;    // formula value before triviality flagging (may be <= 0 or inf)
  double ts_lower = 0.0;  // meaningful when nontrivial; +inf allowed
  double ts_upper_uncertainty = 0.0;  // ts_lower + width*ell/pi (exceptional-set uncertainty)
  bool nontrivial = false;
  double exceptional_budget = 0.0;  // width*ell/pi
  StripInterval interval;
};

struct ExceptionalSetReport {
  double length = 0.0;
  double budget = 0.0;
  double grid_spacing = 0.0;
  bool pass = false;  // length <= budget + one grid spacing
  bool coarse_grid_warning = false;
};

// Boundary segments [a,b] on the positive axis, pairwise disjoint.
using Segments = std::vector<std::pair<double, double>>;

// log|F(z)| of an analytic test function on the half-plane.
using LogModulus = std::function<double(Complex)>;

struct LemmaProbe {
  Complex z;
  double lhs = 0.0;  // ln 1/|F(z)|
  double rhs = 0.0;
  double slack = 0.0;
};

struct Lemma1Report {
  double log_length = 0.0;  // L[V] = sum ln(b/a)
  double min_slack = 0.0;
  bool pass = false;
  std::vector<LemmaProbe> probes;
};

struct Lemma2Report {
  double lambda = 0.0;
  double ell = 0.0;
  double log_length = 0.0;  // of the exponential-decay set in [1, R]
  bool pass = false;        // log_length <= ell
};

namespace bound {

struct ZMax {
  double value = 1.0;
  double log_value = 0.0;
  double at_tau = 0.0;
  bool at_upper = false;  // true when attained at tau2 (ties go to tau2)
};

ZMax z_max(const RegularizedDOS& dos, const StripInterval& interval);

// min over [tau1,tau2] of sec[pi(tau-mid)/width] * ln(Z_max/Z(tau)),
// 2001-point closed grid refined by golden section; endpoint 0/0 limits
// taken as (width/pi)|E(tau_end)|.
double lambda_tilde(const RegularizedDOS& dos, const StripInterval& interval);

// Same quantity via sqrt(tau0^2 dF^2 + (width/pi)^2 E^2) at the stationary
// point of the secant expression (bisection), or the boundary limit.
double lambda_thermo(const RegularizedDOS& dos, const StripInterval& interval);

// (2+ell)/ell * 2(pi^2+8) * lambda_tilde.
double lambda_ell(const RegularizedDOS& dos, const StripInterval& interval, double ell);

EnvelopeValue envelope(const EnvelopeParams& params, double t);

// Trapezoidal measure of {t : trace(t) < envelope(t)*(1-1e-9)} against the
// budget width*ell/pi.
ExceptionalSetReport exceptional_set_measure(const SignalTrace& trace, const EnvelopeParams& params,
                                             double ell);

inline double optimal_ell() { return 0.7320508075688772; }  // sqrt(3)-1

BoundReport ts_lower_bound(const RegularizedDOS& dos, const StripInterval& interval, double f_beta,
                           double p_scr, double ell = optimal_ell());

// Entropy form (p_scr -> exp(-s2s/2)); agrees with ts_lower_bound to 1e-12.
BoundReport ts_entropy_lower_bound(const RegularizedDOS& dos, const StripInterval& interval,
                                   double f_beta, double s2s, double ell = optimal_ell());

struct OptimizeConstraints {
  double max_width = std::numeric_limits<double>::infinity();
  int grid_per_side = 24;  // candidate tau values per side (inclusive of 0)
  double p_scr = 0.0;
  double ell = optimal_ell();
};

struct OptimizerStep {
  StripInterval interval;
  double ts_raw = 0.0;
  bool nontrivial = false;
};

struct OptimizeResult {
  StripInterval interval;
  BoundReport report;
  bool any_nontrivial = false;
  std::vector<OptimizerStep> trail;
};

// Grid search over tau1 in [-0.49 beta, 0], tau2 in [0, 0.49 beta],
// maximizing the bound; ties break toward larger width, then larger tau2.
OptimizeResult optimize_interval(const RegularizedDOS& dos, double beta,
                                 const OptimizeConstraints& constraints);

// inf{t* on the grid : trace(t) <= threshold for all t in [t*, t_max]};
// nullopt if the trace still exceeds the threshold at t_max.
std::optional<double> measured_scrambling_time(const SignalTrace& trace, double threshold,
                                               double t_max);

// z = exp[pi (t - i tau + i(tau1+tau2)/2) / (tau2 - tau1)].
Complex strip_to_halfplane(double t, double tau, const StripInterval& interval);
std::pair<double, double> halfplane_to_strip(Complex z, const StripInterval& interval);

// (1/pi) sum over segments of int x/(x^2+(y'-y)^2) * data(y') dy'.
double poisson_potential_with_data(double x, double y, const Segments& segments,
                                   const std::function<double(double)>& boundary_data);
double poisson_potential(double x, double y, const Segments& v_set, double lambda);

Lemma1Report verify_lemma1(const LogModulus& log_abs_f, double lambda, const Segments& v_set,
                           const std::vector<Complex>& probe_points);

Lemma2Report verify_lemma2(const LogModulus& log_abs_f, double ell, double r_max = 50.0);

}  // namespace bound
}  // namespace scramble
