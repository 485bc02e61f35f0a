#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scramble/bound.hpp"
#include "scramble/continuum.hpp"

using namespace scramble;
using namespace scramble::continuum;

namespace {

constexpr double kPi = std::numbers::pi;

const QuadratureSpec kQuad{};

const ContinuumProfile& width_pi_profile() {
  static const ContinuumProfile profile = make_profile(kPi, kQuad);
  return profile;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("profile g") {
  CHECK(g(0.0, kPi) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(log_g(3.0, kPi) ==
        doctest::Approx(-(std::exp(3.0) + std::exp(-3.0))).epsilon(1e-14));
  for (double t : {0.3, 1.1, 4.7, 9.9})
    CHECK(log_g(t, kPi) == doctest::Approx(log_g(-t, kPi)).epsilon(1e-14));
  // log form survives far into the tail, then saturates at -inf
  CHECK(log_g(600.0, kPi) == doctest::Approx(-std::exp(600.0)));
  CHECK(log_g(800.0, kPi) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(log_g(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("strip modulus") {
  for (double t : {0.0, 0.8, 2.2})
    CHECK(g_modulus_strip(t, 0.0, kPi) == doctest::Approx(g(t, kPi)).epsilon(1e-14));
  // cos(pi tau / w) -> 0 at the strip edge
  CHECK(g_modulus_strip(1.3, kPi / 2.0, kPi) == doctest::Approx(1.0).epsilon(1e-12));
  double expected = std::exp(-(std::exp(1.0) + std::exp(-1.0)) * std::sqrt(2.0) / 2.0);
  CHECK(g_modulus_strip(1.0, kPi / 4.0, kPi) == doctest::Approx(expected).epsilon(1e-13));
  // bounded by one inside the strip
  for (double tau : {-1.4, -0.3, 0.9})
    for (double t : {-2.0, 0.5, 3.0}) CHECK(g_modulus_strip(t, tau, kPi) <= 1.0 + 1e-13);
}

TEST_CASE("profile constants against Bessel closed forms") {
  const ContinuumProfile& p = width_pi_profile();
  // ||g||^2 = 2 K_0(4), int g = 2 K_0(2)
  CHECK(p.norm_sq == doctest::Approx(0.022319352171706046).epsilon(1e-9));
  CHECK(p.int_g == doctest::Approx(0.22778774549906683).epsilon(1e-9));
  CHECK(p.c_const == doctest::Approx(20.411680746525466).epsilon(1e-9));

  // reproducible across refinement
  QuadratureSpec finer;
  finer.rel_tol = 1e-12;
  finer.panel_order = 64;
  ContinuumProfile p2 = make_profile(kPi, finer);
  CHECK(std::abs(p2.norm_sq - p.norm_sq) / p.norm_sq < 1e-10);
  CHECK(std::abs(p2.int_g - p.int_g) / p.int_g < 1e-10);
}

TEST_CASE("self convolution") {
  const ContinuumProfile& p = width_pi_profile();

  CHECK(self_convolution(0.0, p, kQuad).value == doctest::Approx(1.0).epsilon(1e-8));
  for (double t : {0.7, 2.3, 5.1})
    CHECK(self_convolution(t, p, kQuad).value ==
          doctest::Approx(self_convolution(-t, p, kQuad).value).epsilon(1e-10));
  // ridge: the profile never exceeds its value at t = 0
  for (double t = 0.0; t <= 6.0 + 1e-9; t += 0.25)
    CHECK(self_convolution(t, p, kQuad).value <= 1.0 + 1e-9);

  // paper anchor: |N~(1.9)|^2 = 0.014(2); independent oracle value 0.0139976
  double v = self_convolution(1.9, p, kQuad).value;
  CHECK(v * v == doctest::Approx(0.014).epsilon(0.15));
  CHECK(v == doctest::Approx(0.11831139114387676).epsilon(1e-8));
  CHECK(self_convolution(3.0, p, kQuad).value ==
        doctest::Approx(0.0029619369990891895).epsilon(1e-8));
  CHECK(self_convolution(6.0, p, kQuad).value ==
        doctest::Approx(5.718236455909893e-17).epsilon(1e-8));

  SUBCASE("quadrature stability under refinement") {
    QuadratureSpec finer;
    finer.rel_tol = 5e-11;
    finer.panel_order = 64;
    for (double t : {0.5, 1.9, 4.0, 6.0}) {
      double a = self_convolution(t, p, kQuad).value;
      double b = self_convolution(t, make_profile(kPi, finer), finer).value;
      CHECK(std::abs(a - b) / std::abs(b) < 1e-7);
    }
  }

  SUBCASE("deep tail in the log domain") {
    // -ln N~(12) tracks 4 cosh(6) = 806.9 minus subleading terms
    LogValue deep = self_convolution(12.0, p, kQuad);
    CHECK(deep.log_value < -780.0);
    CHECK(deep.log_value > -830.0);
    CHECK(std::isfinite(deep.log_value));
  }
}

TEST_CASE("decay envelope") {
  const ContinuumProfile& p = width_pi_profile();

  EnvelopeSlack at0 = decay_envelope_check(0.0, p, kQuad);
  CHECK(at0.pass);
  CHECK(at0.slack > 0.0);  // 1 < C e^{-2} strictly

  for (double t : {2.0, 4.0, 6.0}) {
    EnvelopeSlack slack = decay_envelope_check(t, p, kQuad);
    CHECK(slack.pass);
    CHECK(slack.slack > 0.0);
  }

  SUBCASE("double-exponential window slopes") {
    auto window_slope = [&](double lo, double hi) {
      std::vector<double> xs, ys;
      for (double t = lo; t <= hi + 1e-9; t += 0.05) {
        xs.push_back(t);
        ys.push_back(std::log(-self_convolution(t, p, kQuad).log_value));
      }
      return fit_slope(xs, ys);
    };
    // pre-asymptotic window: characterization pinned by two independent oracles
    CHECK(window_slope(3.0, 6.0) == doctest::Approx(0.6135).epsilon(0.017));
    // asymptotic window reaches the pi/(2 c beta) rate
    double asym = window_slope(8.0, 11.0);
    CHECK(std::abs(asym - 0.5) <= 0.025);
  }
}

TEST_CASE("inverse Fourier density of states") {
  const ContinuumProfile& p = width_pi_profile();

  // closed form N(E) = (2 pi/||g||^2) (K_{iE}(2)/pi)^2
  CHECK(inverse_fourier_dos(0.0, p, kQuad) == doctest::Approx(0.3699979001).epsilon(1e-8));
  CHECK(inverse_fourier_dos(1.0, p, kQuad) == doctest::Approx(0.243447763).epsilon(1e-8));
  CHECK(inverse_fourier_dos(3.0, p, kQuad) == doctest::Approx(0.00578227845).epsilon(1e-8));
  CHECK(inverse_fourier_dos(5.0, p, kQuad) == doctest::Approx(3.421358069e-6).epsilon(1e-7));
  CHECK(inverse_fourier_dos(8.0, p, kQuad) == doctest::Approx(3.36686959e-12).epsilon(1e-4));

  for (double e : {0.6, 2.2, 7.5})
    CHECK(inverse_fourier_dos(e, p, kQuad) ==
          doctest::Approx(inverse_fourier_dos(-e, p, kQuad)).epsilon(1e-12));

  SUBCASE("normalization by sampled trapezoid") {
    double sum = 0.0;
    const double de = 0.025;
    double prev = inverse_fourier_dos(-12.0, p, kQuad);
    for (double e = -12.0 + de; e <= 12.0 + 1e-9; e += de) {
      double cur = inverse_fourier_dos(e, p, kQuad);
      sum += 0.5 * (prev + cur) * de;
      prev = cur;
    }
    CHECK(std::abs(sum - 1.0) < 1e-5);
  }

  SUBCASE("exponential tail envelope on [10,20]") {
    // K_{iE}(2) oscillates with zeros, so the pointwise values are not
    // log-affine; the peaks between consecutive zeros are, with slope -> -pi
    std::vector<double> es, lns;
    double e = 10.0;
    const double de = 0.025;
    std::vector<double> grid_vals;
    std::vector<double> grid_es;
    for (; e <= 20.0 + 1e-9; e += de) {
      grid_es.push_back(e);
      grid_vals.push_back(std::log(inverse_fourier_dos(e, p, kQuad)));
    }
    for (size_t i = 1; i + 1 < grid_vals.size(); ++i)
      if (grid_vals[i] > grid_vals[i - 1] && grid_vals[i] >= grid_vals[i + 1]) {
        es.push_back(grid_es[i]);
        lns.push_back(grid_vals[i]);
      }
    REQUIRE(es.size() >= 5);
    double slope = fit_slope(es, lns);
    CHECK(std::abs(slope + kPi) < 0.1 * kPi);
    // peaks individually close to the fitted line
    double sx = 0, sy = 0;
    for (size_t i = 0; i < es.size(); ++i) {
      sx += es[i];
      sy += lns[i];
    }
    double intercept = (sy - slope * sx) / static_cast<double>(es.size());
    for (size_t i = 0; i < es.size(); ++i)
      CHECK(std::abs(lns[i] - (slope * es[i] + intercept)) < 0.6);
  }
}

TEST_CASE("gaussian reference") {
  const ContinuumProfile& p = width_pi_profile();
  double sigma_sq = dos_variance(p, kQuad);
  CHECK(sigma_sq == doctest::Approx(1.1186255578774014).epsilon(1e-6));

  SUBCASE("variance equals the curvature of N~ at zero") {
    const double h = 1e-3;
    double d2 = (self_convolution(h, p, kQuad).value - 2.0 +
                 self_convolution(-h, p, kQuad).value) /
                (h * h);
    CHECK(std::abs(-d2 - sigma_sq) / sigma_sq < 1e-4);
  }

  SUBCASE("deviation from the Gaussian crosses 10% near t = 1.9") {
    GaussianReference ref = gaussian_reference(p, kQuad, {0.0}, {1.5, 1.9});
    double dev_15 = std::abs(ref.ntilde_values[0] - ref.gauss_ntilde[0]) / ref.gauss_ntilde[0];
    double dev_19 = std::abs(ref.ntilde_values[1] - ref.gauss_ntilde[1]) / ref.gauss_ntilde[1];
    CHECK(dev_15 < 0.10);
    CHECK(dev_19 > 0.10);
    // both equal one at t = 0
    GaussianReference at0 = gaussian_reference(p, kQuad, {}, {0.0});
    CHECK(at0.ntilde_values[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(at0.gauss_ntilde[0] == 1.0);
  }
}

TEST_CASE("continuum scrambling-time upper bound") {
  const ContinuumProfile& p = width_pi_profile();

  SUBCASE("trivial sentinel when the inner logs close") {
    ContinuumTsUpper res = continuum_ts_upper(2, 0.1, 1e-3, p);
    CHECK_FALSE(res.ts.has_value());
  }

  SUBCASE("doubling the width doubles the bound") {
    ContinuumProfile wide = make_profile(2.0 * kPi, kQuad);
    auto a = continuum_ts_upper(1 << 8, 0.1, 1.0, p);
    auto b = continuum_ts_upper(1 << 8, 0.1, 1.0, wide);
    REQUIRE(a.ts.has_value());
    REQUIRE(b.ts.has_value());
    CHECK(*b.ts == doctest::Approx(2.0 * *a.ts).epsilon(1e-9));
  }

  SUBCASE("near-saturation factor against (width/pi) ln S") {
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double n_s : {1e3, 1e4, 1e5, 1e6}) {
      auto res = continuum_ts_upper_qubits(n_s, 0.01, 1.0, p);
      REQUIRE(res.ts.has_value());
      double s2s = n_s * std::numbers::ln2;
      double ratio = *res.ts / (p.width / kPi * std::log(s2s));
      CHECK(ratio < prev_ratio);
      prev_ratio = ratio;
    }
    CHECK(prev_ratio <= 2.05);
    CHECK(prev_ratio > 2.0);
  }
}

TEST_CASE("discretized DOS feeds the bound module") {
  const ContinuumProfile& p = width_pi_profile();
  RegularizedDOS dos = discretized_dos(p, kQuad, 12.0, 0.025);
  CHECK(std::abs(dos.weights.sum() - 1.0) < 1e-12);
  CHECK(dos.weights.minCoeff() >= 0.0);
  CHECK(dos.energies(1) - dos.energies(0) == doctest::Approx(0.025).epsilon(1e-12));

  StripInterval interval{-0.7, 0.7};
  bound::ZMax zm = bound::z_max(dos, interval);
  CHECK(zm.value > 1.0);
  double tilde = bound::lambda_tilde(dos, interval);
  CHECK(tilde > 0.0);
  // ridge: the sampled continuum profile never exceeds its tau = 0 value
  for (double t : {0.4, 1.1, 2.8})
    CHECK(std::abs(dynamics::char_function(dos, t, 0.0)) <= 1.0 + 1e-12);
}
