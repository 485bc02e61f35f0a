#include "scramble/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "scramble/quadrature.hpp"

namespace scramble {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPiSq8 = 2.0 * (kPi * kPi + 8.0);
}  // namespace

void StripInterval::validate() const {
  if (!(tau1 <= 0.0 && 0.0 <= tau2))
    throw std::invalid_argument("StripInterval: must contain tau = 0");
  if (!(width() > 0.0)) throw std::invalid_argument("StripInterval: width must be positive");
}

namespace bound {

ZMax z_max(const RegularizedDOS& dos, const StripInterval& interval) {
  interval.validate();
  double log1 = dynamics::log_partition_function(dos, interval.tau1);
  double log2 = dynamics::log_partition_function(dos, interval.tau2);
  ZMax out;
  out.at_upper = log2 >= log1;  // ties reported at tau2
  out.log_value = out.at_upper ? log2 : log1;
  out.at_tau = out.at_upper ? interval.tau2 : interval.tau1;
  out.value = std::exp(out.log_value);
  if (!std::isfinite(out.value))
    throw std::range_error("z_max: partition function overflows at tau = " +
                           std::to_string(out.at_tau) + "; use a narrower strip");
  return out;
}

namespace {

// sec[pi(tau-mid)/width] * (ln Z_max - ln Z(tau)) extended continuously to
// the endpoints: (width/pi)|E(tau_end)| where Z attains the maximum, +inf
// at the other endpoint.
struct RateObjective {
  const RegularizedDOS& dos;
  StripInterval interval;
  double log_z_max;

  double interior(double tau) const {
    double gap = log_z_max - dynamics::log_partition_function(dos, tau);
    if (gap < 0.0) {
      if (gap < -1e-9 * std::max(1.0, std::abs(log_z_max)))
        throw std::logic_error("lambda_tilde: Z(tau) exceeds Z_max (convexity violated)");
      gap = 0.0;
    }
    double c = std::cos(kPi * (tau - interval.mid()) / interval.width());
    if (c <= 0.0) return kInf;
    return gap / c;
  }

  double endpoint(double tau_end) const {
    double gap = log_z_max - dynamics::log_partition_function(dos, tau_end);
    double scale = std::max(1.0, std::abs(log_z_max));
    if (gap > 1e-10 * scale) return kInf;
    return interval.width() / kPi * std::abs(dynamics::energy_expectation(dos, tau_end));
  }
};

}  // namespace

double lambda_tilde(const RegularizedDOS& dos, const StripInterval& interval) {
  interval.validate();
  ZMax zm = z_max(dos, interval);
  RateObjective h{dos, interval, zm.log_value};

  constexpr int kGrid = 2001;
  std::vector<double> taus(kGrid), vals(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    taus[i] = interval.tau1 + interval.width() * i / (kGrid - 1);
    vals[i] = (i == 0)             ? h.endpoint(interval.tau1)
              : (i == kGrid - 1)   ? h.endpoint(interval.tau2)
                                   : h.interior(taus[i]);
  }
  double best = *std::min_element(vals.begin(), vals.end());
  // refine every interior local minimum bracket by golden section
  for (int i = 1; i + 1 < kGrid; ++i) {
    if (vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] && std::isfinite(vals[i])) {
      double tau = numerics::golden_section_min([&](double x) { return h.interior(x); },
                                                taus[i - 1], taus[i + 1], 1e-10);
      best = std::min(best, h.interior(tau));
    }
  }
  return std::max(best, 0.0);
}

double lambda_thermo(const RegularizedDOS& dos, const StripInterval& interval) {
  interval.validate();
  ZMax zm = z_max(dos, interval);
  const double w = interval.width();

  // lambda(tau) = sqrt(gap^2 + (w/pi)^2 E^2) with gap = ln(Z_max/Z); valid at
  // the stationary point of the secant form and at the argmax boundary.
  auto thermo_value = [&](double tau) {
    double gap = std::max(0.0, zm.log_value - dynamics::log_partition_function(dos, tau));
    double e = dynamics::energy_expectation(dos, tau);
    return std::sqrt(gap * gap + (w / kPi) * (w / kPi) * e * e);
  };
  // stationarity of sec * gap: G(tau) = E(tau) + gap * tan(theta) * pi/w
  auto stationarity = [&](double tau) {
    double gap = std::max(0.0, zm.log_value - dynamics::log_partition_function(dos, tau));
    double theta = kPi * (tau - interval.mid()) / w;
    return dynamics::energy_expectation(dos, tau) + gap * std::tan(theta) * kPi / w;
  };

  // every stationary point plus the argmax boundary limit is a candidate;
  // the minimum over them is the minimum of the secant expression
  double best = thermo_value(zm.at_tau);
  constexpr int kScan = 512;
  const double pad = 1e-9 * w;
  double prev_tau = interval.tau1 + pad;
  double prev_g = stationarity(prev_tau);
  for (int i = 1; i <= kScan; ++i) {
    double tau = interval.tau1 + pad + (w - 2 * pad) * i / kScan;
    double g = stationarity(tau);
    if (std::isfinite(prev_g) && std::isfinite(g) && (prev_g <= 0.0) != (g <= 0.0)) {
      double root = numerics::bisect(stationarity, prev_tau, tau, 1e-12 * std::max(1.0, w));
      best = std::min(best, thermo_value(root));
    }
    prev_tau = tau;
    prev_g = g;
  }
  return best;
}

double lambda_ell(const RegularizedDOS& dos, const StripInterval& interval, double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("lambda_ell: ell must be positive");
  return (2.0 + ell) / ell * kTwoPiSq8 * lambda_tilde(dos, interval);
}

EnvelopeValue envelope(const EnvelopeParams& params, double t) {
  EnvelopeValue out;
  double log_zsq = 2.0 * std::log(params.z_max);
  if (params.lambda == 0.0) {
    out.log_value = log_zsq;
  } else {
    out.log_value = log_zsq - params.lambda * std::exp(kPi * t / params.width);
  }
  out.value = std::exp(out.log_value);
  return out;
}

ExceptionalSetReport exceptional_set_measure(const SignalTrace& trace,
                                             const EnvelopeParams& params, double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("exceptional_set_measure: ell must be positive");
  std::vector<double> values = trace.real_values();
  const int n = trace.grid.points;
  ExceptionalSetReport report;
  report.budget = params.width * ell / kPi;
  report.grid_spacing = trace.grid.spacing();
  report.coarse_grid_warning = n < 100;
  std::vector<char> violated(n);
  for (int i = 0; i < n; ++i) {
    if (values[i] < 0.0 && values[i] > -1e-12) values[i] = 0.0;
    double env = envelope(params, trace.grid.at(i)).value;
    violated[i] = values[i] < env * (1.0 - 1e-9);
  }
  double length = 0.0;
  for (int i = 0; i + 1 < n; ++i)
    length += 0.5 * (violated[i] + violated[i + 1]) * report.grid_spacing;
  report.length = length;
  report.pass = length <= report.budget + report.grid_spacing;
  return report;
}

namespace {

// Shared body: L = ln(f^2 Z_max^2 / p_scr) computed in the log domain.
BoundReport make_report(const RegularizedDOS& dos, const StripInterval& interval, double f_beta,
                        double p_scr, double ell, double log_arg) {
  if (!(ell > 0.0)) throw std::invalid_argument("ts bound: ell must be positive");
  ZMax zm = z_max(dos, interval);
  BoundReport report;
  report.interval = interval;
  report.z_max = zm.value;
  report.log_z_max = zm.log_value;
  report.lambda_tilde = lambda_tilde(dos, interval);
  report.ell = ell;
  report.lambda_ell = (2.0 + ell) / ell * kTwoPiSq8 * report.lambda_tilde;
  report.lambda_eff = std::exp(ell) * report.lambda_ell;
  report.f_beta = f_beta;
  report.p_scr = p_scr;
  report.exceptional_budget = interval.width() * ell / kPi;

  const double w_over_pi = interval.width() / kPi;
  if (log_arg <= 0.0) {
    report.ts_raw = -kInf;
  } else if (report.lambda_ell == 0.0) {
    report.ts_raw = kInf;
  } else {
    report.ts_raw = w_over_pi * (std::log(log_arg / report.lambda_ell) - ell);
  }

  bool f_ok = f_beta * f_beta > p_scr;
  if (f_ok && report.ts_raw > 0.0) {
    report.nontrivial = true;
    report.ts_lower = report.ts_raw;
    report.ts_upper_uncertainty = report.ts_lower + report.exceptional_budget;
  } else {
    report.nontrivial = false;
    report.ts_lower = std::numeric_limits<double>::quiet_NaN();
    report.ts_upper_uncertainty = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace

BoundReport ts_lower_bound(const RegularizedDOS& dos, const StripInterval& interval,
                           double f_beta, double p_scr, double ell) {
  if (!(p_scr > 0.0 && p_scr < 1.0))
    throw std::invalid_argument("ts_lower_bound: p_scr must lie in (0,1)");
  if (!(f_beta > 0.0 && f_beta <= 1.0))
    throw std::invalid_argument("ts_lower_bound: f_beta must lie in (0,1]");
  ZMax zm = z_max(dos, interval);
  double log_arg = 2.0 * std::log(f_beta) + 2.0 * zm.log_value - std::log(p_scr);
  return make_report(dos, interval, f_beta, p_scr, ell, log_arg);
}

BoundReport ts_entropy_lower_bound(const RegularizedDOS& dos, const StripInterval& interval,
                                   double f_beta, double s2s, double ell) {
  if (!(s2s > 0.0)) throw std::invalid_argument("ts_entropy_lower_bound: s2s must be positive");
  if (!(f_beta > 0.0 && f_beta <= 1.0))
    throw std::invalid_argument("ts_entropy_lower_bound: f_beta must lie in (0,1]");
  ZMax zm = z_max(dos, interval);
  // [S_{2,S} + 4 ln(f Z_max)] / 2, the entropy form of the inner logarithm
  double log_arg = 0.5 * s2s + 2.0 * (std::log(f_beta) + zm.log_value);
  return make_report(dos, interval, f_beta, std::exp(-0.5 * s2s), ell, log_arg);
}

OptimizeResult optimize_interval(const RegularizedDOS& dos, double beta,
                                 const OptimizeConstraints& constraints) {
  if (!(beta > 0.0)) throw std::invalid_argument("optimize_interval: beta must be positive");
  if (constraints.grid_per_side < 1)
    throw std::invalid_argument("optimize_interval: grid resolution must be >= 1");
  if (!(constraints.p_scr > 0.0 && constraints.p_scr < 1.0))
    throw std::invalid_argument("optimize_interval: p_scr must lie in (0,1)");

  const int n = constraints.grid_per_side;
  OptimizeResult result;
  bool have_best = false;
  StripInterval best_interval;
  BoundReport best_report;

  auto better = [](const BoundReport& a, const StripInterval& ia, const BoundReport& b,
                   const StripInterval& ib) {
    double ta = a.nontrivial ? a.ts_lower : -kInf;
    double tb = b.nontrivial ? b.ts_lower : -kInf;
    if (ta != tb) return ta > tb;
    if (ia.width() != ib.width()) return ia.width() > ib.width();
    return ia.tau2 > ib.tau2;
  };

  for (int i = 0; i <= n; ++i) {
    double tau1 = -0.49 * beta * (n - i) / n;
    for (int j = 0; j <= n; ++j) {
      double tau2 = 0.49 * beta * j / n;
      StripInterval candidate{tau1, tau2};
      if (!(candidate.width() > 0.0) || candidate.width() > constraints.max_width) continue;
      BoundReport report = ts_lower_bound(dos, candidate, dos.f_beta, constraints.p_scr,
                                          constraints.ell);
      result.trail.push_back({candidate, report.ts_raw, report.nontrivial});
      result.any_nontrivial = result.any_nontrivial || report.nontrivial;
      if (!have_best || better(report, candidate, best_report, best_interval)) {
        have_best = true;
        best_interval = candidate;
        best_report = report;
      }
    }
  }
  if (!have_best)
    throw std::invalid_argument("optimize_interval: no feasible interval under max_width");
  result.interval = best_interval;
  result.report = best_report;
  return result;
}

std::optional<double> measured_scrambling_time(const SignalTrace& trace, double threshold,
                                               double t_max) {
  if (!(threshold > 0.0))
    throw std::invalid_argument("measured_scrambling_time: threshold must be positive");
  std::vector<double> values = trace.real_values();
  int last = trace.grid.points - 1;
  while (last > 0 && trace.grid.at(last) > t_max + 1e-12 * std::max(1.0, std::abs(t_max)))
    --last;
  if (values[last] > threshold) return std::nullopt;
  int j = -1;  // last exceedance before the sustained tail
  for (int i = last; i >= 0; --i) {
    if (values[i] > threshold) {
      j = i;
      break;
    }
  }
  return trace.grid.at(j + 1);
}

Complex strip_to_halfplane(double t, double tau, const StripInterval& interval) {
  interval.validate();
  if (tau < interval.tau1 - 1e-12 || tau > interval.tau2 + 1e-12)
    throw std::domain_error("strip_to_halfplane: tau outside the strip");
  Complex tt(t, -tau);
  return std::exp(kPi * (tt + Complex(0.0, interval.mid())) / interval.width());
}

std::pair<double, double> halfplane_to_strip(Complex z, const StripInterval& interval) {
  interval.validate();
  if (z == Complex(0.0, 0.0)) throw std::domain_error("halfplane_to_strip: z = 0");
  if (z.real() < 0.0) throw std::domain_error("halfplane_to_strip: Re z must be >= 0");
  Complex tt = std::log(z) * (interval.width() / kPi) - Complex(0.0, interval.mid());
  return {tt.real(), -tt.imag()};
}

namespace {

void validate_segments(const Segments& segments) {
  for (const auto& [a, b] : segments)
    if (!(a < b)) throw std::invalid_argument("segments: need a < b in every segment");
}

}  // namespace

double poisson_potential_with_data(double x, double y, const Segments& segments,
                                   const std::function<double(double)>& boundary_data) {
  if (!(x > 0.0)) throw std::domain_error("poisson_potential: x must be positive");
  validate_segments(segments);
  double total = 0.0;
  for (const auto& [a, b] : segments) {
    auto integrand = [&](double u) {
      double dy = u - y;
      return x / (x * x + dy * dy) * boundary_data(u);
    };
    // split at the kernel peak when it lies inside the segment
    if (y > a && y < b) {
      total += numerics::adaptive_simpson(integrand, a, y, 5e-11);
      total += numerics::adaptive_simpson(integrand, y, b, 5e-11);
    } else {
      total += numerics::adaptive_simpson(integrand, a, b, 1e-10);
    }
  }
  return total / kPi;
}

double poisson_potential(double x, double y, const Segments& v_set, double lambda) {
  return poisson_potential_with_data(x, y, v_set, [lambda](double u) { return lambda * u; });
}

Lemma1Report verify_lemma1(const LogModulus& log_abs_f, double lambda, const Segments& v_set,
                           const std::vector<Complex>& probe_points) {
  if (!(lambda > 0.0)) throw std::invalid_argument("verify_lemma1: lambda must be positive");
  validate_segments(v_set);
  for (const auto& [a, b] : v_set)
    if (!(a > 0.0)) throw std::invalid_argument("verify_lemma1: segments must lie in r > 0");

  Lemma1Report report;
  for (const auto& [a, b] : v_set) report.log_length += std::log(b / a);
  const double prefactor = 4.0 / ((2.0 + report.log_length) * (kPi * kPi + 8.0));

  report.min_slack = kInf;
  for (Complex z : probe_points) {
    if (!(z.real() > 0.0))
      throw std::invalid_argument("verify_lemma1: probes must lie in the open half-plane");
    double log_f = log_abs_f(z);
    if (log_f >= 0.0)
      throw std::invalid_argument("verify_lemma1: sampler returned |F| >= 1 (precondition)");
    double lhs = -log_f;
    const double x = z.real();
    const double ay = std::abs(z.imag());
    double integral = 0.0;
    for (const auto& [a, b] : v_set) {
      integral += numerics::adaptive_simpson(
          [&](double r) { return x / (x * x + (r + ay) * (r + ay)) * lambda * r; }, a, b, 1e-10);
    }
    double rhs = prefactor * integral;
    report.probes.push_back({z, lhs, rhs, lhs - rhs});
    report.min_slack = std::min(report.min_slack, lhs - rhs);
  }
  report.pass = report.min_slack > 0.0;
  return report;
}

Lemma2Report verify_lemma2(const LogModulus& log_abs_f, double ell, double r_max) {
  if (!(ell > 0.0)) throw std::invalid_argument("verify_lemma2: ell must be positive");
  if (!(r_max > 1.0)) throw std::invalid_argument("verify_lemma2: need r_max > 1");

  // min over the unit semicircle of sec(theta) * ln 1/|F|
  constexpr int kThetaGrid = 2001;
  auto objective = [&](double theta) {
    double log_f = log_abs_f(std::polar(1.0, theta));
    if (log_f >= 0.0)
      throw std::invalid_argument("verify_lemma2: sampler returned |F| >= 1 (precondition)");
    return -log_f / std::cos(theta);
  };
  const double theta_lim = kPi / 2.0 * (1.0 - 1e-6);
  double best = kInf;
  int best_i = -1;
  bool any_nonzero = false;
  for (int i = 0; i < kThetaGrid; ++i) {
    double theta = -theta_lim + 2.0 * theta_lim * i / (kThetaGrid - 1);
    double log_f = log_abs_f(std::polar(1.0, theta));
    if (std::isfinite(log_f)) any_nonzero = true;
    double v = objective(theta);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  if (!any_nonzero)
    throw std::invalid_argument("verify_lemma2: F vanishes identically on the semicircle");
  if (best_i > 0 && best_i + 1 < kThetaGrid) {
    double step = 2.0 * theta_lim / (kThetaGrid - 1);
    double theta0 = -theta_lim + step * (best_i - 1);
    double theta = numerics::golden_section_min(objective, theta0, theta0 + 2 * step, 1e-12);
    best = std::min(best, objective(theta));
  }

  Lemma2Report report;
  report.ell = ell;
  report.lambda = (2.0 + ell) / ell * (kPi * kPi + 8.0) * best;

  // logarithmic length of {r in [1, r_max] : min_theta |F(r e^{i theta})| <= e^{-lambda r}}
  constexpr int kRGrid = 2001;
  constexpr int kThetaScan = 801;
  const double log_r_max = std::log(r_max);
  std::vector<char> in_set(kRGrid);
  for (int i = 0; i < kRGrid; ++i) {
    double r = std::exp(log_r_max * i / (kRGrid - 1));
    double min_log = kInf;
    for (int j = 0; j < kThetaScan; ++j) {
      double theta = -theta_lim + 2.0 * theta_lim * j / (kThetaScan - 1);
      min_log = std::min(min_log, log_abs_f(std::polar(r, theta)));
    }
    in_set[i] = min_log <= -report.lambda * r;
  }
  double log_length = 0.0;
  const double dlog = log_r_max / (kRGrid - 1);
  for (int i = 0; i + 1 < kRGrid; ++i)
    log_length += 0.5 * (in_set[i] + in_set[i + 1]) * dlog;
  report.log_length = log_length;
  report.pass = log_length <= ell;
  return report;
}

}  // namespace bound
}  // namespace scramble
