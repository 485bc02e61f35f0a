// Run configuration: flat `key = value` documents with '#' comments,
// validated per mode with spec'd defaults.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scramble {

enum class RunMode { simulate, bound, continuum, verify };
enum class Ensemble { gue, free_env };  // free_env: H = 1_S ⊗ H_E
enum class EnvKind { thermal, pure, mixed, custom };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  RunMode mode = RunMode::simulate;

  // system construction (simulate/bound)
  int n_s = 0;
  int n_e = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  Ensemble ensemble = Ensemble::gue;
  EnvKind env = EnvKind::thermal;
  std::string env_file;       // env = custom: diagonal probabilities, one per line
  std::string spectrum_file;  // bound: import an E_n,w_n spectrum instead
  std::optional<double> f_beta_override;  // fidelity for imported spectra

  // time grid
  std::optional<double> t_max;
  int grid_points = 2001;

  // strip settings
  std::optional<double> tau1;
  std::optional<double> tau2;
  bool optimize_strip = false;
  double max_width = std::numeric_limits<double>::infinity();
  int optimize_grid = 24;

  double ell = 0.7320508075688772;         // sqrt(3)-1
  std::optional<double> p_scr;
  std::optional<double> s2s;

  // continuum
  double width = 3.141592653589793;
  double epsilon = 0.1;
  double de = 0.025;
  double dt = 0.05;
  int panel_order = 32;

  std::vector<std::string> warnings;

  // Defaults that depend on other fields.
  double strip_tau1() const;
  double strip_tau2() const;
  double default_t_max() const;
  double p_scr_or_default() const;  // 1/D_S when unset
};

RunConfig parse_config(const std::string& text);

}  // namespace scramble
