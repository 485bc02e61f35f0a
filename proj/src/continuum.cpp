#include "scramble/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "scramble/quadrature.hpp"

namespace scramble::continuum {

namespace {

constexpr double kPi = std::numbers::pi;

// log-domain integral of exp(h) over [a,b]: peak-subtracted Gauss-Legendre
// panels, panel count doubled until the relative change meets tol.
double integrate_log(const std::function<double(double)>& h, double a, double b, double peak,
                     const QuadratureSpec& quad) {
  if (!(b > a)) throw std::invalid_argument("integrate_log: empty interval");
  auto f = [&](double y) { return std::exp(h(y) - peak); };
  double prev = 0.0;
  int panels = 8;
  for (int iter = 0; iter < 12; ++iter, panels *= 2) {
    double cur = numerics::gl_composite(f, a, b, panels, quad.panel_order);
    if (iter > 0 && std::abs(cur - prev) <= quad.rel_tol * std::abs(cur))
      return peak + std::log(cur);
    prev = cur;
  }
  throw std::runtime_error("integrate_log: panel refinement did not converge (final " +
                           std::to_string(prev) + ")");
}

// Rightmost y > y_peak with h(y) >= h_peak - drop (h decreasing there).
double truncation_bound(const std::function<double(double)>& h, double y_peak, double h_peak,
                        double drop, double step) {
  double lo = y_peak, hi = y_peak + step;
  while (h(hi) > h_peak - drop) {
    lo = hi;
    hi += step;
    step *= 2.0;
  }
  return numerics::bisect([&](double y) { return h(y) - (h_peak - drop); }, lo, hi, 1e-9);
}

}  // namespace

double log_g(double t, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("log_g: width must be positive");
  double a = kPi * t / width;
  return -std::exp(a) - std::exp(-a);
}

double g(double t, double width) { return std::exp(log_g(t, width)); }

double g_modulus_strip(double t, double tau, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("g_modulus_strip: width must be positive");
  double a = kPi * t / width;
  double c = std::cos(kPi * tau / width);
  return std::exp(-(std::exp(a) + std::exp(-a)) * c);
}

ContinuumProfile make_profile(double width, const QuadratureSpec& quad) {
  if (!(width > 0.0)) throw std::invalid_argument("make_profile: width must be positive");
  ContinuumProfile profile;
  profile.width = width;

  auto h_sq = [&](double y) { return 2.0 * log_g(y, width); };
  auto h_g = [&](double y) { return log_g(y, width); };
  double y_sq = truncation_bound(h_sq, 0.0, h_sq(0.0), quad.drop_nats, width);
  double y_g = truncation_bound(h_g, 0.0, h_g(0.0), quad.drop_nats, width);
  profile.norm_sq = std::exp(integrate_log(h_sq, -y_sq, y_sq, h_sq(0.0), quad));
  profile.int_g = std::exp(integrate_log(h_g, -y_g, y_g, h_g(0.0), quad));
  profile.c_const = 2.0 * profile.int_g / profile.norm_sq;
  return profile;
}

LogValue self_convolution(double t, const ContinuumProfile& profile, const QuadratureSpec& quad) {
  const double w = profile.width;
  auto h = [&](double y) { return log_g(y, w) + log_g(t - y, w); };
  // h is strictly concave; the peak sits at t/2 and golden section finds it
  double y_peak = numerics::golden_section_min([&](double y) { return -h(y); }, t / 2.0 - 4.0 * w,
                                               t / 2.0 + 4.0 * w, 1e-12 * std::max(1.0, w));
  double h_peak = h(y_peak);
  double y_hi = truncation_bound(h, y_peak, h_peak, quad.drop_nats, w);
  double y_lo = 2.0 * y_peak -
                truncation_bound([&](double y) { return h(2.0 * y_peak - y); }, y_peak, h_peak,
                                 quad.drop_nats, w);
  double log_conv = integrate_log(h, y_lo, y_hi, h_peak, quad);
  LogValue out;
  out.log_value = log_conv - std::log(profile.norm_sq);
  out.value = std::exp(out.log_value);
  return out;
}

EnvelopeSlack decay_envelope_check(double t, const ContinuumProfile& profile,
                                   const QuadratureSpec& quad) {
  if (!(t >= 0.0)) throw std::invalid_argument("decay_envelope_check: t must be >= 0");
  EnvelopeSlack slack;
  slack.log_lhs = self_convolution(t, profile, quad).log_value;
  slack.log_rhs = std::log(profile.c_const) + log_g(t / 2.0, profile.width);
  slack.slack = slack.log_rhs - slack.log_lhs;
  slack.pass = slack.log_lhs <= slack.log_rhs + 1e-9;
  return slack;
}

double inverse_fourier_dos(double e_value, const ContinuumProfile& profile,
                           const QuadratureSpec& quad) {
  const double w = profile.width;
  auto h_g = [&](double y) { return log_g(y, w); };
  const double t_cut = truncation_bound(h_g, 0.0, h_g(0.0), quad.drop_nats, w);
  const double panel_len = kPi / std::max(std::abs(e_value), 1.0);
  const int panels = std::max(1, static_cast<int>(std::ceil(t_cut / panel_len)));
  auto f = [&](double t) { return g(t, w) * std::cos(t * e_value); };

  double prev = numerics::gl_composite(f, 0.0, t_cut, panels, quad.panel_order);
  for (int mult = 2; mult <= 16; mult *= 2) {
    double cur = numerics::gl_composite(f, 0.0, t_cut, panels * mult, quad.panel_order);
    if (std::abs(cur - prev) <= 1e-12) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  double g_vee = prev / kPi;
  return 2.0 * kPi * g_vee * g_vee / profile.norm_sq;
}

double dos_variance(const ContinuumProfile& profile, const QuadratureSpec& quad) {
  // integrate E^2 N(E) out to where the integrand stops contributing
  const double scale = kPi / profile.width;  // energy scale of the tail
  double e_max = 4.0 * scale;
  while (e_max < 64.0 * scale) {
    double n = inverse_fourier_dos(e_max, profile, quad);
    if (e_max * e_max * n < 1e-14) break;
    e_max += 2.0 * scale;
  }
  auto f = [&](double e) { return e * e * inverse_fourier_dos(e, profile, quad); };
  int panels = std::max(16, static_cast<int>(std::ceil(e_max / (0.25 * scale))));
  return 2.0 * numerics::gl_composite(f, 0.0, e_max, panels, quad.panel_order);
}

GaussianReference gaussian_reference(const ContinuumProfile& profile, const QuadratureSpec& quad,
                                     const std::vector<double>& e_grid,
                                     const std::vector<double>& t_grid) {
  GaussianReference ref;
  ref.sigma_sq = dos_variance(profile, quad);
  const double norm = std::sqrt(2.0 * kPi * ref.sigma_sq);
  ref.e_grid = e_grid;
  ref.t_grid = t_grid;
  for (double e : e_grid) {
    ref.dos_values.push_back(inverse_fourier_dos(e, profile, quad));
    ref.gauss_dos.push_back(std::exp(-e * e / (2.0 * ref.sigma_sq)) / norm);
  }
  for (double t : t_grid) {
    ref.ntilde_values.push_back(self_convolution(t, profile, quad).value);
    ref.gauss_ntilde.push_back(std::exp(-ref.sigma_sq * t * t / 2.0));
  }
  return ref;
}

ContinuumTsUpper continuum_ts_upper_qubits(double n_s, double epsilon, double f_beta,
                                           const ContinuumProfile& profile) {
  if (!(n_s > 0.0)) throw std::invalid_argument("continuum_ts_upper: need n_s > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("continuum_ts_upper: epsilon must be > 0");
  if (!(f_beta > 0.0 && f_beta <= 1.0))
    throw std::invalid_argument("continuum_ts_upper: f_beta must lie in (0,1]");
  ContinuumTsUpper out;
  out.leading_order = 2.0 * profile.width / kPi * std::log(n_s * std::numbers::ln2);
  // log_arg = ln(f^2 C^2 d_s^{1+eps}); the bound is (2w/pi) ln(log_arg)
  double log_arg = 2.0 * std::log(f_beta) + 2.0 * std::log(profile.c_const) +
                   (1.0 + epsilon) * n_s * std::numbers::ln2;
  if (log_arg <= 1.0) return out;  // ln ln would be nonpositive: trivial
  out.ts = 2.0 * profile.width / kPi * std::log(log_arg);
  return out;
}

ContinuumTsUpper continuum_ts_upper(Index d_s, double epsilon, double f_beta,
                                    const ContinuumProfile& profile) {
  if (d_s < 2) throw std::invalid_argument("continuum_ts_upper: need d_s >= 2");
  return continuum_ts_upper_qubits(std::log2(static_cast<double>(d_s)), epsilon, f_beta, profile);
}

RegularizedDOS discretized_dos(const ContinuumProfile& profile, const QuadratureSpec& quad,
                               double e_max, double de) {
  if (!(e_max > 0.0 && de > 0.0))
    throw std::invalid_argument("discretized_dos: e_max and de must be positive");
  const int half = static_cast<int>(std::floor(e_max / de));
  const int count = 2 * half + 1;
  RegularizedDOS dos;
  dos.energies.resize(count);
  dos.weights.resize(count);
  for (int i = 0; i < count; ++i) {
    double e = (i - half) * de;
    dos.energies(i) = e;
    dos.weights(i) = inverse_fourier_dos(e, profile, quad);
  }
  double sum = dos.weights.sum();
  if (!(sum > 0.0)) throw std::runtime_error("discretized_dos: zero total weight");
  dos.weights /= sum;
  dos.beta = std::numeric_limits<double>::quiet_NaN();
  dos.f_beta = 1.0;
  return dos;
}

}  // namespace scramble::continuum
