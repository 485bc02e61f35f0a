// On-disk formats shared with the CLI: the E_n,w_n spectrum format, CSV
// traces, and flat JSON reports at 17 significant digits.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scramble/bound.hpp"
#include "scramble/dynamics.hpp"
#include "scramble/operators.hpp"

namespace scramble::io {

struct SpectrumLoad {
  RegularizedDOS dos;
  std::vector<std::string> warnings;
};

// Text format: one `E_n,w_n` record per line, weights optional (uniform
// when the column is absent), '#' comments; sorted by energy on load and
// renormalized, with a warning when |sum w - 1| > 1e-6.
SpectrumLoad load_spectrum(const std::filesystem::path& path);
void save_spectrum(const RegularizedDOS& dos, const std::filesystem::path& path);

// Header `t,value` for real traces, `t,re,im` for complex ones.
void write_trace_csv(const SignalTrace& trace, const std::filesystem::path& path,
                     bool force_complex = false);

// %.17g rendering used by every writer.
std::string format_double(double v);

// Flat JSON object writer with deterministic field order and
// 17-significant-digit floats; "inf"/"nan" rendered as strings.
class JsonReport {
 public:
  void add(const std::string& key, double value);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, bool value);
  void add(const std::string& key, long long value);
  void add_raw(const std::string& key, const std::string& raw_json);
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string bound_report_json(const BoundReport& report);

}  // namespace scramble::io
