#include <catch2/catch.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef EXLAB_CLI_PATH
#error "EXLAB_CLI_PATH must point at the built command-line binary"
#endif

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EXLAB_CLI_PATH) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

const char* kCaseAConfig = R"({
  "model": "impurity-bec-q0",
  "params": {"modes": 1, "eps": [0.8], "e": [1.2], "n_max": 5, "variant": "density"},
  "initial_state": {"c": [0.70710678118654752, 0.70710678118654752],
                    "d": [0.4, 0.3, 0.3, 0, 0, 0]},
  "grid": {"t_max": 6.0, "steps": 25},
  "output": {"path": "case_a_out.csv", "format": "csv"}
})";

}  // namespace

TEST_CASE("simulate: case (a) run produces an all-quiet CSV") {
  write_file("case_a.json", kCaseAConfig);
  REQUIRE(run_cli("simulate --config case_a.json") == 0);

  const std::string csv = slurp("case_a_out.csv");
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "t,delta_e,v_e,chi_re,chi_im");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string field;
    std::getline(fields, field, ',');  // t
    std::getline(fields, field, ',');
    CHECK(std::abs(std::strtod(field.c_str(), nullptr)) <= 1e-10);  // delta_e
    std::getline(fields, field, ',');
    CHECK(std::abs(std::strtod(field.c_str(), nullptr)) <= 1e-10);  // v_e
    std::getline(fields, field, ',');
    CHECK(std::strtod(field.c_str(), nullptr) == Approx(1.0).margin(1e-12));  // chi_re
  }
  CHECK(rows == 25);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("simulate: single-step grid and repeat determinism") {
  std::string cfg(kCaseAConfig);
  const auto pos = cfg.find("\"steps\": 25");
  REQUIRE(pos != std::string::npos);
  cfg.replace(pos, 11, "\"steps\": 1");
  write_file("one_step.json", cfg);

  REQUIRE(run_cli("simulate --config one_step.json --out one_step.csv") == 0);
  const std::string first = slurp("one_step.csv");
  std::istringstream lines(first);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "t,delta_e,v_e,chi_re,chi_im");
  REQUIRE(std::getline(lines, line));
  {
    std::istringstream fields(line);
    std::string field;
    std::getline(fields, field, ',');
    CHECK(std::strtod(field.c_str(), nullptr) == 0.0);  // t
    std::getline(fields, field, ',');
    CHECK(std::abs(std::strtod(field.c_str(), nullptr)) <= 1e-12);  // delta_e
    std::getline(fields, field, ',');
    CHECK(std::abs(std::strtod(field.c_str(), nullptr)) <= 1e-12);  // v_e
    std::getline(fields, field, ',');
    CHECK(std::strtod(field.c_str(), nullptr) == Approx(1.0).margin(1e-12));  // chi_re
  }
  CHECK_FALSE(std::getline(lines, line));  // exactly one data row

  // byte-identical reruns, including under a different thread cap
  REQUIRE(run_cli("simulate --config case_a.json --out run1.csv") == 0);
  REQUIRE(std::system((std::string("EXCHANGE_LAB_THREADS=3 ") + EXLAB_CLI_PATH +
                       " simulate --config case_a.json --out run2.csv > /dev/null 2>&1")
                          .c_str()) == 0);
  REQUIRE(std::system((std::string("EXCHANGE_LAB_THREADS=1 ") + EXLAB_CLI_PATH +
                       " simulate --config case_a.json --out run3.csv > /dev/null 2>&1")
                          .c_str()) == 0);
  const std::string a = slurp("run1.csv"), b = slurp("run2.csv"), c = slurp("run3.csv");
  CHECK(a == b);
  CHECK(a == c);
  CHECK_FALSE(a.empty());
}

TEST_CASE("simulate: error channels") {
  // unreadable config: I/O failure
  CHECK(run_cli("simulate --config missing_file.json") == 1);

  // schema violation
  write_file("bad_schema.json", R"({"model": "generic", "mystery": 1})");
  CHECK(run_cli("simulate --config bad_schema.json") == 2);

  // invalid JSON
  write_file("bad_json.json", "{ nope");
  CHECK(run_cli("bad_json.json") == 2);
  CHECK(run_cli("simulate --config bad_json.json") == 2);

  // unwritable output path: I/O failure
  write_file("bad_out.json", kCaseAConfig);
  CHECK(run_cli("simulate --config bad_out.json --out /nonexistent_dir/x.csv") == 1);

  // impossible dual-path tolerance: disagreement channel
  std::string cfg(kCaseAConfig);
  const auto pos = cfg.find("\"grid\"");
  REQUIRE(pos != std::string::npos);
  cfg.insert(pos, "\"numerics\": {\"path_tol\": 1e-16}, ");
  write_file("tight_tol.json", cfg);
  CHECK(run_cli("simulate --config tight_tol.json --out tight.csv") == 3);
}

TEST_CASE("verify: suites and the negative control") {
  REQUIRE(run_cli("verify --suite zassenhaus --json zass_report.json") == 0);
  const std::string report = slurp("zass_report.json");
  CHECK(report.find("\"overall\": \"pass\"") != std::string::npos);
  CHECK(report.find("pauli/slope-order-4") != std::string::npos);

  CHECK(run_cli("verify --suite no-such-suite") == 2);

  // corrupted model input must surface as a named failing check and exit 4
  CHECK(run_cli("verify --suite numerics --negative-control --json neg_report.json") == 4);
  const std::string neg = slurp("neg_report.json");
  CHECK(neg.find("\"overall\": \"fail\"") != std::string::npos);
  CHECK(neg.find("hermiticity/non-hermitian-coupling-rejected") != std::string::npos);
}

TEST_CASE("zassenhaus subcommand") {
  REQUIRE(run_cli("zassenhaus --order 3 --scenario pauli --out zass.csv") == 0);
  const std::string table = slurp("cli_stdout.txt");
  CHECK(table.find("c2 = [X,Y]") != std::string::npos);
  CHECK(table.find("c3 = 2[[X,Y],Y] + [[X,Y],X]") != std::string::npos);

  const std::string csv = slurp("zass.csv");
  CHECK(csv.rfind("t,error_order2,error_order3,error_order4\n", 0) == 0);
  CHECK(csv.find("slope,") != std::string::npos);

  // commuting scenario: all error columns vanish
  REQUIRE(run_cli("zassenhaus --order 2 --scenario commuting --out zass_comm.csv") == 0);
  std::istringstream lines(slurp("zass_comm.csv"));
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (line.rfind("slope", 0) == 0) continue;
    std::istringstream fields(line);
    std::string field;
    std::getline(fields, field, ',');  // t
    for (int k = 0; k < 3; ++k) {
      std::getline(fields, field, ',');
      CHECK(std::abs(std::strtod(field.c_str(), nullptr)) <= 1e-10);
    }
  }

  CHECK(run_cli("zassenhaus --order 5 --scenario pauli") == 2);
  CHECK(run_cli("zassenhaus --order 3 --scenario unknown") == 2);
}

TEST_CASE("models list") {
  REQUIRE(run_cli("models list") == 0);
  const std::string out = slurp("cli_stdout.txt");
  CHECK(out.find("generic") != std::string::npos);
  CHECK(out.find("impurity-bec-q0") != std::string::npos);
  CHECK(out.find("two-level-env") != std::string::npos);
  CHECK(out.find("electron-phonon-q0") != std::string::npos);
}
