// exlab: energy-exchange sweeps, verification suites, and exponential-splitting
// reports from the command line.
//
// Exit codes: 0 success, 1 I/O failure, 2 configuration/schema violation,
// 3 dual-path numeric disagreement, 4 verification failure.

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "exlab/config.hpp"
#include "exlab/io.hpp"
#include "exlab/verify.hpp"
#include "exlab/zassenhaus.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitSchema = 2;
constexpr int kExitPathDisagreement = 3;
constexpr int kExitVerifyFailure = 4;

unsigned thread_count() {
  const char* env = std::getenv("EXCHANGE_LAB_THREADS");
  unsigned cap = 0;  // 0 = auto
  if (env && *env) {
    try {
      const long v = std::stol(env);
      if (v < 0) throw std::invalid_argument("negative");
      cap = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw exlab::ConfigError("EXCHANGE_LAB_THREADS must be a non-negative integer");
    }
  }
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return cap == 0 ? hw : std::min(cap, hw);
}

int cmd_simulate(const std::string& config_path, const std::string& out_override) {
  exlab::RunConfig cfg = exlab::load_run_config(config_path);
  if (!out_override.empty()) cfg.output_path = out_override;

  const exlab::ModelSpec model = exlab::build_model_from_config(cfg);
  const exlab::InitialState state = exlab::initial_state(model, cfg.amplitudes, cfg.weights);

  std::vector<double> grid(cfg.steps);
  for (int i = 0; i < cfg.steps; ++i)
    grid[i] = cfg.steps == 1 ? 0.0 : cfg.t_max * i / (cfg.steps - 1);
  const exlab::TimeSeries series =
      exlab::sweep(model, state, grid, cfg.numerics, thread_count(), cfg.reference_eta);

  const std::string payload = cfg.output_format == "json"
                                  ? exlab::time_series_json(series).dump(2) + "\n"
                                  : exlab::time_series_csv(series);
  exlab::write_text_file(cfg.output_path, payload);
  return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& json_path,
               bool negative_control) {
  const exlab::VerificationReport report = exlab::run_suite(suite, negative_control);
  const nlohmann::json doc = exlab::report_json(report);
  if (!json_path.empty())
    exlab::write_text_file(json_path, doc.dump(2) + "\n");
  else
    std::cout << doc.dump(2) << "\n";
  return report.overall() ? kExitOk : kExitVerifyFailure;
}

struct ScenarioPair {
  exlab::Matrix x;
  exlab::Matrix y;
};

ScenarioPair scenario_at(const std::string& scenario, double t) {
  using exlab::Complex;
  using exlab::Matrix;
  if (scenario == "commuting") {
    Matrix x = Matrix::Zero(3, 3), y = Matrix::Zero(3, 3);
    x.diagonal() << Complex(0, -0.3 * t), Complex(0, 0.8 * t), Complex(0, -1.1 * t);
    y.diagonal() << Complex(0, 0.5 * t), Complex(0, -0.2 * t), Complex(0, 0.9 * t);
    return {x, y};
  }
  if (scenario == "pauli") {
    Matrix sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    return {Complex(0, -t) * sx, Complex(0, -t) * sz};
  }
  if (scenario == "ladder") {
    auto [a, adag] = exlab::boson_ladder(16);
    return {t * Matrix(a), t * Matrix(adag)};
  }
  throw exlab::ConfigError("unknown scenario '" + scenario +
                           "' (expected commuting|pauli|ladder)");
}

int cmd_zassenhaus(int order, const std::string& scenario, const std::string& out_path) {
  const auto expansion = exlab::zassenhaus_terms(order);
  std::string table = "exponent factors for truncation order " + std::to_string(order) + ":\n";
  for (std::size_t i = 0; i < expansion.terms.size(); ++i) {
    table += "  c" + std::to_string(i + 2) + " =";
    for (std::size_t w = 0; w < expansion.terms[i].size(); ++w) {
      if (w) table += " +";
      table += " " + expansion.terms[i][w].to_string();
    }
    table += "\n";
  }
  std::cout << table;

  std::vector<double> ts;
  for (double t = 1e-3; t <= 1.1e-1; t *= 2.0) ts.push_back(t);

  std::string csv = "t,error_order2,error_order3,error_order4\n";
  std::vector<std::vector<double>> log_err(3);
  std::vector<double> log_t;
  for (double t : ts) {
    const ScenarioPair ops = scenario_at(scenario, t);
    const exlab::Matrix exact = exlab::expm(exlab::Matrix(ops.x + ops.y));
    csv += exlab::format_double(t);
    log_t.push_back(std::log(t));
    for (int k = 2; k <= 4; ++k) {
      const double err =
          exlab::max_abs(exlab::Matrix(exlab::zassenhaus_apply(ops.x, ops.y, k) - exact));
      csv += ',';
      csv += exlab::format_double(err);
      log_err[k - 2].push_back(std::log(std::max(err, 1e-18)));
    }
    csv += '\n';
  }
  csv += "slope";
  for (int k = 2; k <= 4; ++k) {
    csv += ',';
    csv += exlab::format_double(exlab::verify_detail::fit_slope(log_t, log_err[k - 2]));
  }
  csv += '\n';

  if (!out_path.empty())
    exlab::write_text_file(out_path, csv);
  else
    std::cout << csv;
  return kExitOk;
}

int cmd_models_list() {
  for (const auto& name : exlab::known_models()) std::cout << name << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy exchange between an open quantum system and its environment"};
  app.require_subcommand(1);

  std::string config_path, out_path, suite = "all", json_path, scenario = "pauli";
  int order = 4;
  bool negative_control = false;

  auto* simulate = app.add_subcommand("simulate", "run a configured time sweep");
  simulate->add_option("--config", config_path, "JSON run configuration")->required();
  simulate->add_option("--out", out_path, "override the configured output path");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite,
                     "all|case-a|case-b|zassenhaus|analytic|numerics");
  verify->add_option("--json", json_path, "write the JSON report to a file");
  verify->add_flag("--negative-control", negative_control,
                   "corrupt one model input; the run must then fail");

  auto* zassenhaus = app.add_subcommand("zassenhaus", "term table and error scaling");
  zassenhaus->add_option("--order", order, "truncation order, 2..4")->required();
  zassenhaus->add_option("--scenario", scenario, "commuting|pauli|ladder")->required();
  zassenhaus->add_option("--out", out_path, "write the error-scaling CSV to a file");

  auto* models = app.add_subcommand("models", "model registry");
  models->add_subcommand("list", "list the available model names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSchema;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, out_path);
    if (verify->parsed()) return cmd_verify(suite, json_path, negative_control);
    if (zassenhaus->parsed()) {
      if (order < 2 || order > 4) throw exlab::ConfigError("--order must be 2, 3, or 4");
      return cmd_zassenhaus(order, scenario, out_path);
    }
    if (models->parsed()) {
      if (models->get_subcommands().empty())
        throw exlab::ConfigError("usage: models list");
      return cmd_models_list();
    }
    return kExitSchema;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const exlab::PathDisagreement& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPathDisagreement;
  } catch (const exlab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const exlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  }
}
