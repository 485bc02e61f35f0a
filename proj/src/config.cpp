#include "scramble/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace scramble {

double RunConfig::strip_tau1() const { return tau1 ? *tau1 : -beta / 4.0; }
double RunConfig::strip_tau2() const { return tau2 ? *tau2 : beta / 4.0; }

double RunConfig::default_t_max() const {
  double width = strip_tau2() - strip_tau1();
  return width > 0.0 ? 10.0 * width : 50.0;
}

double RunConfig::p_scr_or_default() const {
  if (p_scr) return *p_scr;
  return 1.0 / static_cast<double>(1LL << n_s);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

double to_double(const std::string& key, const Entry& e) {
  try {
    size_t pos = 0;
    double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(e.line, "key '" + key + "' expects a number, got '" + e.value + "'");
  }
}

long long to_int(const std::string& key, const Entry& e) {
  try {
    size_t pos = 0;
    long long v = std::stoll(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(e.line, "key '" + key + "' expects an integer, got '" + e.value + "'");
  }
}

const std::set<std::string> kKnownKeys = {
    "mode",     "n_s",       "n_e",        "beta",          "seed",          "ensemble",
    "env",      "env_file",  "spectrum_file", "f_beta",     "t_max",         "grid_points",
    "tau1",     "tau2",      "strip",      "max_width",     "optimize_grid", "ell",
    "p_scr",    "s2s",       "width",      "epsilon",       "de",            "dt",
    "panel_order"};

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> entries;
  RunConfig config;

  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (value.empty()) fail(line_no, "empty value for key '" + key + "'");
    if (!kKnownKeys.count(key)) fail(line_no, "unknown key '" + key + "'");
    if (entries.count(key))
      config.warnings.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key +
                                "' (last value wins)");
    entries[key] = Entry{value, line_no};
  }

  auto take = [&](const char* key) -> std::optional<Entry> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    Entry e = it->second;
    entries.erase(it);
    return e;
  };
  auto require = [&](const char* key) -> Entry {
    auto e = take(key);
    if (!e) throw ConfigError(std::string("config: missing required key '") + key + "'");
    return *e;
  };

  Entry mode = require("mode");
  if (mode.value == "simulate")
    config.mode = RunMode::simulate;
  else if (mode.value == "bound")
    config.mode = RunMode::bound;
  else if (mode.value == "continuum")
    config.mode = RunMode::continuum;
  else if (mode.value == "verify")
    config.mode = RunMode::verify;
  else
    fail(mode.line, "mode must be simulate|bound|continuum|verify, got '" + mode.value + "'");

  const bool needs_system =
      config.mode == RunMode::simulate ||
      (config.mode == RunMode::bound && !entries.count("spectrum_file"));

  if (auto e = take("spectrum_file")) {
    if (config.mode != RunMode::bound)
      fail(e->line, "spectrum_file is only meaningful in bound mode");
    config.spectrum_file = e->value;
  }

  if (needs_system) {
    Entry n_s = require("n_s");
    Entry n_e = require("n_e");
    config.n_s = static_cast<int>(to_int("n_s", n_s));
    config.n_e = static_cast<int>(to_int("n_e", n_e));
    if (config.n_s < 0 || config.n_e < 0 || config.n_s + config.n_e < 1)
      fail(n_s.line, "n_s and n_e must be nonnegative with n_s + n_e >= 1");
    Entry beta = require("beta");
    config.beta = to_double("beta", beta);
    if (!(config.beta >= 0.0) || !std::isfinite(config.beta))
      fail(beta.line, "key 'beta' must be finite and >= 0");
    Entry seed = require("seed");
    config.seed = static_cast<std::uint64_t>(to_int("seed", seed));
  } else {
    for (const char* key : {"n_s", "n_e", "seed"})
      if (auto e = take(key)) {
        if (config.mode == RunMode::bound)
          fail(e->line, std::string("key '") + key + "' conflicts with spectrum_file");
        fail(e->line, std::string("key '") + key + "' is not used in this mode");
      }
    if (auto e = take("beta")) {
      config.beta = to_double("beta", *e);
      if (!(config.beta >= 0.0)) fail(e->line, "key 'beta' must be >= 0");
    }
  }

  if (auto e = take("ensemble")) {
    if (e->value == "gue")
      config.ensemble = Ensemble::gue;
    else if (e->value == "free")
      config.ensemble = Ensemble::free_env;
    else
      fail(e->line, "ensemble must be gue|free, got '" + e->value + "'");
  }
  if (auto e = take("env")) {
    if (e->value == "thermal")
      config.env = EnvKind::thermal;
    else if (e->value == "pure")
      config.env = EnvKind::pure;
    else if (e->value == "maximally-mixed" || e->value == "mixed")
      config.env = EnvKind::mixed;
    else if (e->value == "custom")
      config.env = EnvKind::custom;
    else
      fail(e->line, "env must be thermal|pure|maximally-mixed|custom, got '" + e->value + "'");
  }
  if (auto e = take("env_file")) {
    if (config.env != EnvKind::custom) fail(e->line, "env_file requires env = custom");
    config.env_file = e->value;
  } else if (config.env == EnvKind::custom) {
    throw ConfigError("config: env = custom requires env_file");
  }
  if (auto e = take("f_beta")) {
    double v = to_double("f_beta", *e);
    if (!(v > 0.0 && v <= 1.0)) fail(e->line, "key 'f_beta' must lie in (0,1]");
    config.f_beta_override = v;
  }

  if (auto e = take("t_max")) {
    double v = to_double("t_max", *e);
    if (!(v > 0.0)) fail(e->line, "key 't_max' must be positive");
    config.t_max = v;
  }
  if (auto e = take("grid_points")) {
    long long v = to_int("grid_points", *e);
    if (v < 2) fail(e->line, "key 'grid_points' must be >= 2");
    config.grid_points = static_cast<int>(v);
  }

  if (auto e = take("strip")) {
    if (e->value != "optimize") fail(e->line, "key 'strip' only accepts 'optimize'");
    config.optimize_strip = true;
  }
  if (auto e = take("tau1")) {
    double v = to_double("tau1", *e);
    if (v > 0.0) fail(e->line, "key 'tau1' must be <= 0");
    if (config.optimize_strip) fail(e->line, "tau1 conflicts with strip = optimize");
    config.tau1 = v;
  }
  if (auto e = take("tau2")) {
    double v = to_double("tau2", *e);
    if (v < 0.0) fail(e->line, "key 'tau2' must be >= 0");
    if (config.optimize_strip) fail(e->line, "tau2 conflicts with strip = optimize");
    config.tau2 = v;
  }
  if (auto e = take("max_width")) {
    double v = to_double("max_width", *e);
    if (!(v > 0.0)) fail(e->line, "key 'max_width' must be positive");
    config.max_width = v;
  }
  if (auto e = take("optimize_grid")) {
    long long v = to_int("optimize_grid", *e);
    if (v < 1) fail(e->line, "key 'optimize_grid' must be >= 1");
    config.optimize_grid = static_cast<int>(v);
  }

  if (auto e = take("ell")) {
    double v = to_double("ell", *e);
    if (!(v > 0.0)) fail(e->line, "key 'ell' must be positive");
    config.ell = v;
  }
  if (auto e = take("p_scr")) {
    double v = to_double("p_scr", *e);
    if (!(v > 0.0 && v < 1.0)) fail(e->line, "key 'p_scr' must lie in (0,1)");
    config.p_scr = v;
  }
  if (auto e = take("s2s")) {
    double v = to_double("s2s", *e);
    if (!(v > 0.0)) fail(e->line, "key 's2s' must be positive");
    config.s2s = v;
  }
  if (config.p_scr && config.s2s)
    throw ConfigError("config: p_scr and s2s are mutually exclusive");

  if (auto e = take("width")) {
    double v = to_double("width", *e);
    if (!(v > 0.0)) fail(e->line, "key 'width' must be positive");
    config.width = v;
  }
  if (auto e = take("epsilon")) {
    double v = to_double("epsilon", *e);
    if (!(v > 0.0)) fail(e->line, "key 'epsilon' must be positive");
    config.epsilon = v;
  }
  if (auto e = take("de")) {
    double v = to_double("de", *e);
    if (!(v > 0.0)) fail(e->line, "key 'de' must be positive");
    config.de = v;
  }
  if (auto e = take("dt")) {
    double v = to_double("dt", *e);
    if (!(v > 0.0)) fail(e->line, "key 'dt' must be positive");
    config.dt = v;
  }
  if (auto e = take("panel_order")) {
    long long v = to_int("panel_order", *e);
    if (v < 2 || v > 128) fail(e->line, "key 'panel_order' must lie in [2,128]");
    config.panel_order = static_cast<int>(v);
  }

  for (const auto& [key, entry] : entries)
    fail(entry.line, "key '" + key + "' is not used in this mode");

  if (config.mode == RunMode::bound && !config.optimize_strip) {
    double t1 = config.strip_tau1();
    double t2 = config.strip_tau2();
    if (!(t2 - t1 > 0.0))
      throw ConfigError("config: strip has zero width; set tau1/tau2, strip = optimize, "
                        "or beta > 0");
  }
  return config;
}

}  // namespace scramble
