#include "scramble/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace scramble::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& field, int line_no, const char* what) {
  try {
    size_t pos = 0;
    double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("line ") + std::to_string(line_no) + ": malformed " +
                             what + " '" + field + "'");
  }
}

}  // namespace

SpectrumLoad load_spectrum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spectrum file " + path.string());

  std::vector<std::pair<double, double>> records;
  int with_weight = 0, without_weight = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos) {
      records.emplace_back(parse_number(line, line_no, "energy"), 0.0);
      ++without_weight;
    } else {
      double e = parse_number(trim(line.substr(0, comma)), line_no, "energy");
      std::string wfield = trim(line.substr(comma + 1));
      double w = parse_number(wfield, line_no, "weight");
      if (w < -1e-12)
        throw std::runtime_error("line " + std::to_string(line_no) + ": negative weight " +
                                 wfield);
      records.emplace_back(e, std::max(w, 0.0));
      ++with_weight;
    }
  }
  if (records.empty()) throw std::runtime_error("spectrum file " + path.string() + " is empty");
  if (with_weight != 0 && without_weight != 0)
    throw std::runtime_error("spectrum file " + path.string() +
                             ": mixed lines with and without weights");

  SpectrumLoad out;
  if (without_weight > 0)
    for (auto& r : records) r.second = 1.0 / static_cast<double>(records.size());

  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  double sum = 0.0;
  for (const auto& r : records) sum += r.second;
  if (!(sum > 0.0)) throw std::runtime_error("spectrum file: weights sum to zero");
  if (std::abs(sum - 1.0) > 1e-6)
    out.warnings.push_back("weights summed to " + format_double(sum) + "; renormalized");

  out.dos.energies.resize(static_cast<Index>(records.size()));
  out.dos.weights.resize(static_cast<Index>(records.size()));
  for (size_t i = 0; i < records.size(); ++i) {
    out.dos.energies(static_cast<Index>(i)) = records[i].first;
    out.dos.weights(static_cast<Index>(i)) = records[i].second / sum;
  }
  out.dos.beta = std::numeric_limits<double>::quiet_NaN();
  out.dos.f_beta = 1.0;
  return out;
}

void save_spectrum(const RegularizedDOS& dos, const std::filesystem::path& path) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write spectrum file " + path.string());
  outf << "# E_n,w_n\n";
  for (Index n = 0; n < dos.size(); ++n)
    outf << format_double(dos.energies(n)) << "," << format_double(dos.weights(n)) << "\n";
  if (!outf) throw std::runtime_error("write failed for " + path.string());
}

void write_trace_csv(const SignalTrace& trace, const std::filesystem::path& path,
                     bool force_complex) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write trace file " + path.string());
  bool complex_trace = force_complex;
  if (!complex_trace)
    for (const Complex& v : trace.values)
      if (std::abs(v.imag()) > 1e-10) {
        complex_trace = true;
        break;
      }
  outf << (complex_trace ? "t,re,im\n" : "t,value\n");
  for (int i = 0; i < trace.grid.points; ++i) {
    outf << format_double(trace.grid.at(i)) << ",";
    if (complex_trace)
      outf << format_double(trace.values[i].real()) << ","
           << format_double(trace.values[i].imag()) << "\n";
    else
      outf << format_double(trace.values[i].real()) << "\n";
  }
  if (!outf) throw std::runtime_error("write failed for " + path.string());
}

void JsonReport::add(const std::string& key, double value) {
  if (std::isfinite(value))
    fields_.emplace_back(key, format_double(value));
  else
    fields_.emplace_back(key, "\"" + format_double(value) + "\"");
}

void JsonReport::add(const std::string& key, const std::string& value) {
  std::string escaped;
  for (char c : value) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += c;
  }
  fields_.emplace_back(key, "\"" + escaped + "\"");
}

void JsonReport::add(const std::string& key, bool value) {
  fields_.emplace_back(key, value ? "true" : "false");
}

void JsonReport::add(const std::string& key, long long value) {
  fields_.emplace_back(key, std::to_string(value));
}

void JsonReport::add_raw(const std::string& key, const std::string& raw_json) {
  std::string trimmed = raw_json;
  while (!trimmed.empty() && (trimmed.back() == '\n' || trimmed.back() == ' '))
    trimmed.pop_back();
  fields_.emplace_back(key, trimmed);
}

std::string JsonReport::str() const {
  std::string out = "{\n";
  for (size_t i = 0; i < fields_.size(); ++i) {
    out += "  \"" + fields_[i].first + "\": " + fields_[i].second;
    if (i + 1 < fields_.size()) out += ",";
    out += "\n";
  }
  out += "}\n";
  return out;
}

void JsonReport::write(const std::filesystem::path& path) const {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write report " + path.string());
  outf << str();
  if (!outf) throw std::runtime_error("write failed for " + path.string());
}

std::string bound_report_json(const BoundReport& report) {
  JsonReport json;
  json.add("z_max", report.z_max);
  json.add("log_z_max", report.log_z_max);
  json.add("lambda_tilde", report.lambda_tilde);
  json.add("ell", report.ell);
  json.add("lambda_ell", report.lambda_ell);
  json.add("lambda_eff", report.lambda_eff);
  json.add("f_beta", report.f_beta);
  json.add("p_scr", report.p_scr);
  json.add("ts_raw", report.ts_raw);
  if (report.nontrivial) {
    if (std::isinf(report.ts_lower)) {
      json.add("ts_lower", std::string("inf"));
      json.add("ts_upper_uncertainty", std::string("inf"));
    } else {
      json.add("ts_lower", report.ts_lower);
      json.add("ts_upper_uncertainty", report.ts_upper_uncertainty);
    }
  } else {
    json.add("ts_lower", std::string("trivial"));
    json.add("ts_upper_uncertainty", std::string("trivial"));
  }
  json.add("nontrivial", report.nontrivial);
  json.add("exceptional_budget", report.exceptional_budget);
  json.add("tau1", report.interval.tau1);
  json.add("tau2", report.interval.tau2);
  return json.str();
}

}  // namespace scramble::io
