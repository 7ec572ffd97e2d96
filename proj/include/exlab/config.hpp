#pragma once

// JSON run configuration: strict schema validation (unknown keys and wrong
// types fail before any computation), model construction from a validated
// document.

#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "exlab/analytic.hpp"
#include "exlab/cumulant.hpp"
#include "exlab/model.hpp"

namespace exlab {

using nlohmann::json;

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

struct RunConfig {
  std::string model;
  json model_params;
  Vector amplitudes;      // c over the H_S eigenbasis
  RealVector weights;     // d over the H_E eigenbasis
  double t_max = 1.0;
  int steps = 1;
  CumulantConfig numerics;
  double reference_eta = 0.0;
  std::string output_path;
  std::string output_format = "csv";
};

namespace detail {

inline void require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& required,
                         const std::set<std::string>& optional = {}) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!required.count(key) && !optional.count(key))
      throw ConfigError(where + ": unknown key '" + key + "'");
  for (const auto& key : required)
    if (!obj.contains(key))
      throw ConfigError(where + ": missing key '" + key + "'");
}

inline double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

inline int get_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
  return v.get<int>();
}

inline Complex get_complex(const json& v, const std::string& where) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex(v[0].get<double>(), v[1].get<double>());
  throw ConfigError(where + " must be a number or [re, im] pair");
}

inline std::vector<double> get_number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_number(x, where + " entry"));
  return out;
}

inline Matrix get_complex_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a nonempty array of rows");
  const std::size_t n = v.size();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].is_array() || v[i].size() != n)
      throw ConfigError(where + " must be square");
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = get_complex(v[i][j], where + " entry");
  }
  return out;
}

inline void validate_model_params(const std::string& model, const json& p) {
  if (model == "generic") {
    require_keys(p, "params", {"h_s", "h_e", "h_se"});
  } else if (model == "impurity-bec-q0") {
    require_keys(p, "params", {"modes", "eps", "e", "n_max"},
                 {"v_b", "volume", "q", "variant"});
    if (p.contains("variant")) {
      const auto& v = p["variant"];
      if (!v.is_string() || (v != "exchange" && v != "density"))
        throw ConfigError("params.variant must be 'exchange' or 'density'");
    }
  } else if (model == "two-level-env") {
    require_keys(p, "params", {"levels", "e1", "e2", "d11", "d22"}, {"c_damp"});
    if (!p["levels"].is_array() || p["levels"].empty())
      throw ConfigError("params.levels must be a nonempty array");
    for (const auto& l : p["levels"])
      require_keys(l, "params.levels entry", {"eps", "c"}, {"r12", "i12", "h11", "h22"});
  } else if (model == "electron-phonon-q0") {
    require_keys(p, "params", {"nu", "eps", "omega0", "v0", "n_max"}, {"n0", "n0p"});
  } else {
    throw ConfigError("unknown model '" + model + "'");
  }
}

}  // namespace detail

inline const std::vector<std::string>& known_models() {
  static const std::vector<std::string> names = {
      "generic", "impurity-bec-q0", "two-level-env", "electron-phonon-q0"};
  return names;
}

inline RunConfig parse_run_config(const json& doc) {
  using namespace detail;
  require_keys(doc, "config", {"model", "params", "initial_state", "grid", "output"},
               {"numerics"});
  RunConfig cfg;
  if (!doc["model"].is_string()) throw ConfigError("model must be a string");
  cfg.model = doc["model"].get<std::string>();
  validate_model_params(cfg.model, doc["params"]);
  cfg.model_params = doc["params"];

  const json& init = doc["initial_state"];
  require_keys(init, "initial_state", {"c", "d"});
  if (!init["c"].is_array() || !init["d"].is_array())
    throw ConfigError("initial_state.c and .d must be arrays");
  cfg.amplitudes = Vector(init["c"].size());
  for (std::size_t i = 0; i < init["c"].size(); ++i)
    cfg.amplitudes(i) = get_complex(init["c"][i], "initial_state.c entry");
  cfg.weights = RealVector(init["d"].size());
  for (std::size_t i = 0; i < init["d"].size(); ++i)
    cfg.weights(i) = get_number(init["d"][i], "initial_state.d entry");

  const json& grid = doc["grid"];
  require_keys(grid, "grid", {"t_max", "steps"});
  cfg.t_max = get_number(grid["t_max"], "grid.t_max");
  cfg.steps = get_int(grid["steps"], "grid.steps");
  if (cfg.steps < 1) throw ConfigError("grid.steps must be >= 1");
  if (cfg.t_max <= 0) throw ConfigError("grid.t_max must be > 0");

  if (doc.contains("numerics")) {
    const json& num = doc["numerics"];
    require_keys(num, "numerics", {},
                 {"eta_step", "dt_step", "method", "path_tol", "reference_eta"});
    if (num.contains("eta_step")) cfg.numerics.eta_step = get_number(num["eta_step"], "numerics.eta_step");
    if (num.contains("dt_step")) cfg.numerics.dt_step = get_number(num["dt_step"], "numerics.dt_step");
    if (num.contains("path_tol")) cfg.numerics.path_tol = get_number(num["path_tol"], "numerics.path_tol");
    if (num.contains("reference_eta"))
      cfg.reference_eta = get_number(num["reference_eta"], "numerics.reference_eta");
    if (num.contains("method")) {
      const auto& m = num["method"];
      if (!m.is_string()) throw ConfigError("numerics.method must be a string");
      const std::string s = m.get<std::string>();
      if (s == "analytic") cfg.numerics.method = Method::Analytic;
      else if (s == "finite_difference") cfg.numerics.method = Method::FiniteDifference;
      else if (s == "both") cfg.numerics.method = Method::Both;
      else throw ConfigError("numerics.method must be analytic|finite_difference|both");
    }
  }

  const json& out = doc["output"];
  require_keys(out, "output", {"path"}, {"format"});
  if (!out["path"].is_string()) throw ConfigError("output.path must be a string");
  cfg.output_path = out["path"].get<std::string>();
  if (out.contains("format")) {
    const auto& f = out["format"];
    if (!f.is_string() || (f != "csv" && f != "json"))
      throw ConfigError("output.format must be 'csv' or 'json'");
    cfg.output_format = f.get<std::string>();
  }
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

inline ModelSpec build_model_from_config(const RunConfig& cfg) {
  using namespace detail;
  const json& p = cfg.model_params;
  if (cfg.model == "generic") {
    const Matrix h_s = get_complex_matrix(p["h_s"], "params.h_s");
    const Matrix h_e = get_complex_matrix(p["h_e"], "params.h_e");
    const Matrix h_se = get_complex_matrix(p["h_se"], "params.h_se");
    if (h_s.rows() * h_e.rows() != h_se.rows())
      throw ConfigError("params: dim(h_s) * dim(h_e) must equal dim(h_se)");
    auto space = make_space({Factor::levels(static_cast<int>(h_s.rows())),
                             Factor::levels(static_cast<int>(h_e.rows()))});
    return build_generic(space, 1, h_s, h_e, h_se);
  }
  if (cfg.model == "impurity-bec-q0") {
    ImpurityBecParams ip;
    ip.modes = get_int(p["modes"], "params.modes");
    ip.eps = get_number_list(p["eps"], "params.eps");
    ip.e = get_number_list(p["e"], "params.e");
    ip.n_max = get_int(p["n_max"], "params.n_max");
    if (p.contains("v_b")) ip.v_b = get_number(p["v_b"], "params.v_b");
    if (p.contains("volume")) ip.volume = get_number(p["volume"], "params.volume");
    if (p.contains("q")) ip.q = get_int(p["q"], "params.q");
    if (p.contains("variant"))
      ip.variant = p["variant"] == "exchange" ? BecCouplingVariant::Exchange
                                              : BecCouplingVariant::Density;
    return build_impurity_bec(ip);
  }
  if (cfg.model == "two-level-env") {
    TwoLevelParams tp;
    for (const auto& l : p["levels"]) {
      TwoLevelLevel level;
      level.eps = get_number(l["eps"], "levels.eps");
      level.c = get_complex(l["c"], "levels.c");
      if (l.contains("r12")) level.r12 = get_number(l["r12"], "levels.r12");
      if (l.contains("i12")) level.i12 = get_number(l["i12"], "levels.i12");
      if (l.contains("h11")) level.h11 = get_number(l["h11"], "levels.h11");
      if (l.contains("h22")) level.h22 = get_number(l["h22"], "levels.h22");
      tp.levels.push_back(level);
    }
    tp.e1 = get_number(p["e1"], "params.e1");
    tp.e2 = get_number(p["e2"], "params.e2");
    tp.d11 = get_number(p["d11"], "params.d11");
    tp.d22 = get_number(p["d22"], "params.d22");
    if (p.contains("c_damp")) tp.c_damp = get_number(p["c_damp"], "params.c_damp");
    return build_two_level_env(tp);
  }
  if (cfg.model == "electron-phonon-q0") {
    ElectronPhononParams ep;
    ep.nu = get_int(p["nu"], "params.nu");
    ep.eps = get_number_list(p["eps"], "params.eps");
    ep.omega0 = get_number(p["omega0"], "params.omega0");
    ep.v0 = get_number(p["v0"], "params.v0");
    ep.n_max = get_int(p["n_max"], "params.n_max");
    if (p.contains("n0")) ep.n0 = get_int(p["n0"], "params.n0");
    if (p.contains("n0p")) ep.n0p = get_int(p["n0p"], "params.n0p");
    return build_electron_phonon_q0(ep);
  }
  throw ConfigError("unknown model '" + cfg.model + "'");
}

}  // namespace exlab
