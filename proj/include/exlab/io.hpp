#pragma once

// Serialization: CSV time series and JSON reports.  Numbers carry 17
// significant digits so that rereading a file reproduces the doubles exactly;
// output is byte-deterministic for a fixed input.

#include <cstdio>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "exlab/cumulant.hpp"

namespace exlab {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string time_series_csv(const TimeSeries& series) {
  std::string out = "t,delta_e,v_e,chi_re,chi_im\n";
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    out += format_double(series.t[i]);
    out += ',';
    out += format_double(series.delta_e[i]);
    out += ',';
    out += format_double(series.v_e[i]);
    out += ',';
    out += format_double(series.chi[i].real());
    out += ',';
    out += format_double(series.chi[i].imag());
    out += '\n';
  }
  return out;
}

inline nlohmann::json time_series_json(const TimeSeries& series) {
  nlohmann::json doc;
  doc["model"] = series.model_name;
  doc["commutation_class"] = series.commutation_class;
  doc["reference_eta"] = series.reference_eta;
  // Sign conventions: delta_e > 0 means the environment gained energy;
  // v_e > 0 means energy flowing from the system to the environment.
  doc["sign_convention"] = {{"delta_e", "environment energy gain"},
                           {"v_e", "positive for system-to-environment flow"}};
  doc["t"] = series.t;
  doc["delta_e"] = series.delta_e;
  doc["v_e"] = series.v_e;
  nlohmann::json chi = nlohmann::json::array();
  for (const auto& z : series.chi) chi.push_back({z.real(), z.imag()});
  doc["chi"] = chi;
  return doc;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open output file: " + path);
  out << content;
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

}  // namespace exlab
