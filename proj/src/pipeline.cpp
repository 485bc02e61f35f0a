#include "scramble/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "scramble/bound.hpp"
#include "scramble/continuum.hpp"
#include "scramble/dynamics.hpp"
#include "scramble/io.hpp"
#include "scramble/operators.hpp"
#include "scramble/quadrature.hpp"

namespace scramble {

namespace {

namespace fs = std::filesystem;
using namespace scramble::operators;
using namespace scramble::dynamics;
using namespace scramble::bound;

constexpr double kPi = std::numbers::pi;

// splitmix64 step; derives the environment-Hamiltonian seed from the run seed
std::uint64_t derive_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct OutputTracker {
  fs::path dir;
  std::vector<fs::path> written;

  fs::path file(const std::string& name) {
    fs::path p = dir / name;
    written.push_back(p);
    return p;
  }
  void remove_all() {
    for (const fs::path& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }
};

struct System {
  SubsystemSplit split;
  Spectrum spectrum;
  DensityOperator rho_env;
  double f_beta = 1.0;
  RegularizedDOS dos;
};

RealVector load_probability_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open env_file " + path.string());
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    size_t a = line.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r\n");
    try {
      values.push_back(std::stod(line.substr(a, b - a + 1)));
    } catch (const std::exception&) {
      throw std::runtime_error("env_file line " + std::to_string(line_no) + ": malformed value");
    }
  }
  RealVector p(static_cast<Index>(values.size()));
  for (size_t i = 0; i < values.size(); ++i) p(static_cast<Index>(i)) = values[i];
  return p;
}

System build_system(const RunConfig& config) {
  System sys;
  sys.split = SubsystemSplit::qubits(config.n_s, config.n_e);
  // the environment Hamiltonian is only sampled when something consumes it
  std::optional<Matrix> h_env;
  auto env_hamiltonian = [&]() -> const Matrix& {
    if (!h_env) h_env = sample_gue(sys.split.d_e, derive_seed(config.seed));
    return *h_env;
  };
  Matrix h = config.ensemble == Ensemble::free_env
                 ? embed_env(env_hamiltonian(), sys.split)
                 : sample_gue(sys.split.d, config.seed);
  sys.spectrum = eigendecompose(h);
  switch (config.env) {
    case EnvKind::thermal:
      sys.rho_env = thermal_state(env_hamiltonian(), config.beta);
      break;
    case EnvKind::pure:
      sys.rho_env = ground_state(env_hamiltonian());
      break;
    case EnvKind::mixed:
      sys.rho_env = maximally_mixed(sys.split.d_e);
      break;
    case EnvKind::custom:
      sys.rho_env = diagonal_state(load_probability_file(config.env_file));
      if (sys.rho_env.dim() != sys.split.d_e)
        throw std::runtime_error("env_file dimension does not match d_e");
      break;
  }
  sys.f_beta = fidelity_inf(sys.rho_env);
  Matrix embedded_root = embed_env(sys.rho_env.sqrt(), sys.split);
  sys.dos = regularized_dos(sys.spectrum, embedded_root, sys.split, config.beta, sys.f_beta);
  return sys;
}

int run_simulate(const RunConfig& config, OutputTracker& out, bool quiet, std::ostream& log) {
  System sys = build_system(config);
  TimeGrid grid{0.0, config.t_max ? *config.t_max : config.default_t_max(), config.grid_points};

  BlockEvolver evolver(sys.spectrum, sys.rho_env.sqrt(), sys.split);
  SignalTrace ps = sweep_return_probability(evolver, grid);
  SignalTrace ksff = sweep_regularized_sff(sys.dos, grid);
  SignalTrace char_sq = sweep_char_magnitude_sq(sys.dos, grid);
  auto [purity, renyi2] = sweep_purity(evolver, grid);

  io::write_trace_csv(ps, out.file("ps.csv"));
  io::write_trace_csv(ksff, out.file("regularized_sff.csv"));
  io::write_trace_csv(char_sq, out.file("char_magnitude_sq.csv"));
  io::write_trace_csv(purity, out.file("purity.csv"));
  io::write_trace_csv(renyi2, out.file("renyi2.csv"));
  io::save_spectrum(sys.dos, out.file("spectrum.csv"));

  auto ps_v = ps.real_values();
  auto k_v = ksff.real_values();
  auto pur_v = purity.real_values();
  double min_speed_slack = std::numeric_limits<double>::infinity();
  double min_purity_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.points; ++i) {
    min_speed_slack = std::min(min_speed_slack, ps_v[i] - k_v[i]);
    min_purity_slack = std::min(min_purity_slack, pur_v[i] - ps_v[i] * ps_v[i]);
  }
  double p_scr = config.p_scr_or_default();
  double anchor_ps = std::abs(ps_v[0] - 1.0);
  double anchor_k = std::abs(k_v[0] - sys.f_beta * sys.f_beta);
  double anchor_z = std::abs(partition_function(sys.dos, 0.0) - 1.0);

  bool pass = min_speed_slack >= -1e-9 && min_purity_slack >= -1e-9 && anchor_ps <= 1e-12 &&
              anchor_k <= 1e-12 && anchor_z <= 1e-12;

  io::JsonReport summary;
  summary.add("mode", std::string("simulate"));
  summary.add("d", static_cast<long long>(sys.split.d));
  summary.add("f_beta", sys.f_beta);
  summary.add("f_beta_sq", sys.f_beta * sys.f_beta);
  summary.add("p_scr", p_scr);
  summary.add("nontrivial", sys.f_beta * sys.f_beta > p_scr);
  summary.add("s_half_env", renyi_half_env(sys.rho_env));
  summary.add("min_slack_speed_limit", min_speed_slack);
  summary.add("min_slack_purity", min_purity_slack);
  summary.add("anchor_ps0", anchor_ps);
  summary.add("anchor_k0", anchor_k);
  summary.add("anchor_z0", anchor_z);
  summary.add("pass", pass);
  summary.write(out.file("summary.json"));

  if (!quiet)
    log << "simulate: min P_S - K_beta slack " << io::format_double(min_speed_slack)
        << ", min purity slack " << io::format_double(min_purity_slack)
        << (pass ? " [ok]" : " [violated]") << "\n";
  return pass ? 0 : 1;
}

int run_bound(const RunConfig& config, OutputTracker& out, bool quiet, std::ostream& log) {
  RegularizedDOS dos;
  double f_beta = 1.0;
  if (!config.spectrum_file.empty()) {
    io::SpectrumLoad load = io::load_spectrum(config.spectrum_file);
    dos = load.dos;
    if (config.f_beta_override) dos.f_beta = *config.f_beta_override;
    f_beta = dos.f_beta;
    for (const std::string& w : load.warnings)
      if (!quiet) log << "warning: " << w << "\n";
  } else {
    System sys = build_system(config);
    dos = sys.dos;
    f_beta = sys.f_beta;
  }
  double p_scr = config.p_scr ? *config.p_scr
                              : (config.s2s ? std::exp(-0.5 * *config.s2s)
                                            : config.p_scr_or_default());

  StripInterval interval;
  BoundReport report;
  if (config.optimize_strip) {
    OptimizeConstraints constraints;
    constraints.max_width = config.max_width;
    constraints.grid_per_side = config.optimize_grid;
    constraints.p_scr = p_scr;
    constraints.ell = config.ell;
    OptimizeResult result = optimize_interval(dos, config.beta, constraints);
    interval = result.interval;
    report = result.report;
    std::ofstream trail(out.file("optimizer_trail.csv"));
    trail << "tau1,tau2,ts_raw,nontrivial\n";
    for (const OptimizerStep& step : result.trail)
      trail << io::format_double(step.interval.tau1) << ","
            << io::format_double(step.interval.tau2) << "," << io::format_double(step.ts_raw)
            << "," << (step.nontrivial ? 1 : 0) << "\n";
  } else {
    interval = StripInterval{config.strip_tau1(), config.strip_tau2()};
    report = config.s2s ? ts_entropy_lower_bound(dos, interval, f_beta, *config.s2s, config.ell)
                        : ts_lower_bound(dos, interval, f_beta, p_scr, config.ell);
  }

  // internal consistency on the real-time grid
  TimeGrid grid{0.0, config.t_max ? *config.t_max : config.default_t_max(), config.grid_points};
  SignalTrace char_sq = sweep_char_magnitude_sq(dos, grid);
  EnvelopeParams env{report.z_max, report.lambda_ell, interval.width()};
  ExceptionalSetReport exc = exceptional_set_measure(char_sq, env, report.ell);

  bool consistent = true;
  std::optional<double> measured;
  if (report.nontrivial) {
    measured = measured_scrambling_time(char_sq, p_scr / (f_beta * f_beta), grid.t_max);
    if (measured && std::isfinite(report.ts_lower))
      consistent = *measured >= report.ts_lower - grid.spacing();
  }
  bool pass = exc.pass && consistent;

  io::JsonReport json;
  json.add_raw("report", io::bound_report_json(report));
  json.add("exceptional_length", exc.length);
  json.add("exceptional_budget", exc.budget);
  json.add("exceptional_pass", exc.pass);
  if (measured)
    json.add("measured_scrambling_time", *measured);
  else
    json.add("measured_scrambling_time", std::string(report.nontrivial ? "none" : "trivial"));
  json.add("bound_consistent", consistent);
  json.add("pass", pass);
  json.write(out.file("bound_report.json"));

  if (!quiet)
    log << "bound: " << (report.nontrivial ? "nontrivial" : "trivial") << ", ts_lower "
        << (report.nontrivial ? io::format_double(report.ts_lower) : "trivial")
        << (pass ? " [ok]" : " [violated]") << "\n";
  return pass ? 0 : 1;
}

int run_continuum(const RunConfig& config, OutputTracker& out, bool quiet, std::ostream& log) {
  QuadratureSpec quad;
  quad.panel_order = config.panel_order;
  ContinuumProfile profile = continuum::make_profile(config.width, quad);

  double t_max = config.t_max ? *config.t_max : 6.0 * config.width / kPi;
  int t_points = static_cast<int>(std::round(t_max / config.dt)) + 1;
  double e_max = 12.0 * kPi / config.width;
  int e_half = static_cast<int>(std::floor(e_max / config.de));

  std::vector<double> t_grid(t_points), e_grid(2 * e_half + 1);
  for (int i = 0; i < t_points; ++i) t_grid[i] = i * config.dt;
  for (int i = 0; i < 2 * e_half + 1; ++i) e_grid[i] = (i - e_half) * config.de;

  GaussianReference ref = continuum::gaussian_reference(profile, quad, e_grid, t_grid);

  double max_ntilde = 0.0;
  double min_dos = std::numeric_limits<double>::infinity();
  double worst_envelope = -std::numeric_limits<double>::infinity();
  {
    std::ofstream nt(out.file("ntilde.csv"));
    nt << "t,value,log_value,gaussian\n";
    std::ofstream env_csv(out.file("envelope.csv"));
    env_csv << "t,log_ntilde,log_envelope\n";
    for (int i = 0; i < t_points; ++i) {
      LogValue v = continuum::self_convolution(t_grid[i], profile, quad);
      max_ntilde = std::max(max_ntilde, std::abs(v.value));
      EnvelopeSlack slack = continuum::decay_envelope_check(t_grid[i], profile, quad);
      worst_envelope = std::max(worst_envelope, -slack.slack);
      nt << io::format_double(t_grid[i]) << "," << io::format_double(v.value) << ","
         << io::format_double(v.log_value) << "," << io::format_double(ref.gauss_ntilde[i])
         << "\n";
      env_csv << io::format_double(t_grid[i]) << "," << io::format_double(slack.log_lhs) << ","
              << io::format_double(slack.log_rhs) << "\n";
    }
    std::ofstream dos_csv(out.file("dos_continuum.csv"));
    dos_csv << "E,value,gaussian\n";
    for (size_t i = 0; i < e_grid.size(); ++i) {
      min_dos = std::min(min_dos, ref.dos_values[i]);
      dos_csv << io::format_double(e_grid[i]) << "," << io::format_double(ref.dos_values[i])
              << "," << io::format_double(ref.gauss_dos[i]) << "\n";
    }
  }

  double ntilde0 = continuum::self_convolution(0.0, profile, quad).value;
  double int_n = 0.0;  // trapezoid over the sampled grid
  for (size_t i = 0; i + 1 < e_grid.size(); ++i)
    int_n += 0.5 * (ref.dos_values[i] + ref.dos_values[i + 1]) * config.de;

  // ln(-ln N~) least-squares slope on [3,6]*(width/pi)
  double slope = 0.0;
  {
    double lo = 3.0 * config.width / kPi, hi = 6.0 * config.width / kPi;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = 0; i < t_points; ++i) {
      if (t_grid[i] < lo - 1e-12 || t_grid[i] > hi + 1e-12) continue;
      double log_nt = continuum::self_convolution(t_grid[i], profile, quad).log_value;
      double y = std::log(-log_nt);
      sx += t_grid[i];
      sy += y;
      sxx += t_grid[i] * t_grid[i];
      sxy += t_grid[i] * y;
      ++n;
    }
    if (n >= 2) slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }

  RegularizedDOS dos = continuum::discretized_dos(profile, quad, e_max, config.de);
  io::save_spectrum(dos, out.file("continuum_spectrum.csv"));

  auto ts = continuum::continuum_ts_upper_qubits(std::max(1.0, static_cast<double>(config.n_s)),
                                                 config.epsilon, 1.0, profile);

  bool pass = std::abs(ntilde0 - 1.0) <= 1e-8 && std::abs(int_n - 1.0) <= 1e-5 &&
              min_dos >= 0.0 && worst_envelope <= 1e-9 && max_ntilde <= 1.0 + 1e-9;

  io::JsonReport json;
  json.add("mode", std::string("continuum"));
  json.add("width", profile.width);
  json.add("norm_sq", profile.norm_sq);
  json.add("int_g", profile.int_g);
  json.add("c_const", profile.c_const);
  json.add("sigma_sq", ref.sigma_sq);
  json.add("ntilde_at_0", ntilde0);
  json.add("int_dos", int_n);
  json.add("min_dos", min_dos);
  json.add("max_envelope_violation", worst_envelope);
  json.add("log_log_slope", slope);
  if (ts.ts)
    json.add("ts_upper", *ts.ts);
  else
    json.add("ts_upper", std::string("trivial"));
  json.add("ts_leading_order", ts.leading_order);
  json.add("pass", pass);
  json.write(out.file("continuum_report.json"));

  if (!quiet)
    log << "continuum: N~(0) = " << io::format_double(ntilde0) << ", int N = "
        << io::format_double(int_n) << (pass ? " [ok]" : " [violated]") << "\n";
  return pass ? 0 : 1;
}

int run_verify(const RunConfig& config, OutputTracker& out, bool quiet, std::ostream& log) {
  io::JsonReport json;
  bool all_pass = true;

  // Lemma 1 with F = e^{-z} (lambda = 1) and F = e^{-2z} (lambda = 2), V = [1,10]
  Segments v{{1.0, 10.0}};
  std::vector<Complex> probes{{1.0, 0.0}};
  for (int k = 0; k < 8; ++k)
    probes.push_back(std::polar(1.0, -kPi / 2 * (1.0 - (k + 1) / 9.0)));
  for (double rate : {1.0, 2.0}) {
    auto log_f = [rate](Complex z) { return -rate * z.real(); };
    Lemma1Report rep = verify_lemma1(log_f, rate, v, probes);
    json.add("lemma1_min_slack_rate_" + std::to_string(static_cast<int>(rate)), rep.min_slack);
    all_pass = all_pass && rep.pass;
  }

  // Lemma 2 with the same functions at the default ell
  for (double rate : {1.0, 2.0}) {
    auto log_f = [rate](Complex z) { return -rate * z.real(); };
    Lemma2Report rep = verify_lemma2(log_f, config.ell);
    json.add("lemma2_lambda_rate_" + std::to_string(static_cast<int>(rate)), rep.lambda);
    json.add("lemma2_log_length_rate_" + std::to_string(static_cast<int>(rate)), rep.log_length);
    all_pass = all_pass && rep.pass;
  }

  // conformal round trip
  {
    StripInterval interval{-0.3, 0.7};
    std::mt19937_64 rng(12345);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    double max_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
      double t = -5.0 + 10.0 * uniform();
      double tau = interval.tau1 + interval.width() * uniform();
      auto [t2, tau2] = halfplane_to_strip(strip_to_halfplane(t, tau, interval), interval);
      max_err = std::max({max_err, std::abs(t - t2), std::abs(tau - tau2)});
    }
    json.add("conformal_roundtrip_max_err", max_err);
    all_pass = all_pass && max_err < 1e-12;
  }

  // Poisson kernel normalization: constant data over a wide segment
  {
    double val = poisson_potential_with_data(1.0, 0.0, {{-1e9, 0.0}, {0.0, 1e9}},
                                             [](double) { return 1.0; });
    json.add("poisson_unit_data", val);
    all_pass = all_pass && std::abs(val - 1.0) < 1e-6;
  }

  // decay-theorem budget on the triangle density of states (sinc^2 transform)
  {
    const double beta = 1.0;
    const double omega = 2.0 * kPi / beta;
    RegularizedDOS tri;
    tri.energies.resize(2001);
    tri.weights.resize(2001);
    for (int i = 0; i < 2001; ++i) {
      double e = -omega + 2.0 * omega * i / 2000;
      tri.energies(i) = e;
      tri.weights(i) = 1.0 - std::abs(e) / omega;
    }
    tri.weights /= tri.weights.sum();
    StripInterval interval{-beta / 4.0, beta / 4.0};
    TimeGrid grid{0.0, 40.0, 2001};
    SignalTrace trace = sweep_char_magnitude_sq(tri, grid);
    EnvelopeParams params{z_max(tri, interval).value,
                          lambda_ell(tri, interval, config.ell), interval.width()};
    ExceptionalSetReport exc = exceptional_set_measure(trace, params, config.ell);
    json.add("theorem_exceptional_length", exc.length);
    json.add("theorem_exceptional_budget", exc.budget);
    all_pass = all_pass && exc.pass;
  }

  json.add("pass", all_pass);
  json.write(out.file("verification_report.json"));
  if (!quiet) log << "verify: " << (all_pass ? "[ok]" : "[violated]") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int run(const RunConfig& config, const std::filesystem::path& out_dir, bool quiet,
        std::ostream& log) {
  OutputTracker out;
  out.dir = out_dir;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    log << "error: cannot create output directory " << out_dir.string() << "\n";
    return 2;
  }
  for (const std::string& w : config.warnings)
    if (!quiet) log << "warning: " << w << "\n";
  try {
    switch (config.mode) {
      case RunMode::simulate:
        return run_simulate(config, out, quiet, log);
      case RunMode::bound:
        return run_bound(config, out, quiet, log);
      case RunMode::continuum:
        return run_continuum(config, out, quiet, log);
      case RunMode::verify:
        return run_verify(config, out, quiet, log);
    }
    return 2;
  } catch (const std::exception& e) {
    out.remove_all();
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace scramble
