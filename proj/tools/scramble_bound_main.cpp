// scramble-bound: run configurations against the scrambling speed-limit
// toolkit. Modes: simulate | bound | continuum | verify.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "scramble/config.hpp"
#include "scramble/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Scrambling speed-limit laboratory"};
  std::string mode;
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed_override = -1;
  bool quiet = false;

  app.add_option("mode", mode, "simulate|bound|continuum|verify")->required();
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--out", out_dir, "output directory (default: current)");
  app.add_option("--seed", seed_override, "override the config seed");
  app.add_flag("--quiet", quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config file " << config_path << "\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  scramble::RunConfig config;
  try {
    config = scramble::parse_config(buffer.str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  static const std::map<std::string, scramble::RunMode> kModes = {
      {"simulate", scramble::RunMode::simulate},
      {"bound", scramble::RunMode::bound},
      {"continuum", scramble::RunMode::continuum},
      {"verify", scramble::RunMode::verify}};
  auto it = kModes.find(mode);
  if (it == kModes.end()) {
    std::cerr << "error: unknown mode '" << mode << "'\n";
    return 2;
  }
  if (it->second != config.mode) {
    std::cerr << "error: mode argument '" << mode << "' disagrees with the config file\n";
    return 2;
  }
  if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);

  return scramble::run(config, out_dir, quiet, std::cout);
}
