#pragma once

// Verification suites: executable forms of the structure theorems and the
// numeric-hygiene contracts.  Shared between the CLI `verify` command and the
// acceptance test binary.  All randomness is seeded; reruns are reproducible.

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "exlab/analytic.hpp"
#include "exlab/cumulant.hpp"
#include "exlab/model.hpp"
#include "exlab/zassenhaus.hpp"

namespace exlab {

struct Check {
  std::string name;
  std::string model;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<Check> checks;
  bool overall() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline nlohmann::json report_json(const VerificationReport& report) {
  nlohmann::json doc;
  doc["overall"] = report.overall() ? "pass" : "fail";
  doc["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks)
    doc["checks"].push_back({{"name", c.name}, {"model", c.model},
                             {"measured", c.measured}, {"bound", c.bound},
                             {"pass", c.pass ? "pass" : "fail"}});
  return doc;
}

namespace verify_detail {

inline Matrix random_hermitian(std::int64_t n, std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  return 0.5 * (m + Matrix(m.adjoint())).eval();
}

inline Vector random_amplitudes(std::int64_t n, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector c(n);
  for (std::int64_t i = 0; i < n; ++i) c(i) = Complex(dist(rng), dist(rng));
  c /= c.norm();
  return c;
}

inline RealVector random_weights(std::int64_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  RealVector d(n);
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) sum += d(i) = dist(rng);
  return d / sum;
}

// Random model with H_SE diagonal in the H_E eigenbasis: certified case (a).
inline ModelSpec random_case_a_model(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto space = make_space({Factor::levels(2), Factor::levels(2)});
  const Matrix h_s = random_hermitian(2, rng);
  Matrix h_e = Matrix::Zero(2, 2);
  h_e(0, 0) = 0.4;
  h_e(1, 1) = 1.3;
  Matrix h_se = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) h_se(i, i) = dist(rng);
  return build_generic(space, 1, h_s, h_e, h_se, "random-diagonal-coupling");
}

// Random model with H_SE block-diagonal in the H_S eigenbasis: case (b).
inline ModelSpec random_case_b_model(unsigned seed, std::int64_t s_dim = 2,
                                     std::int64_t e_dim = 3) {
  std::mt19937 rng(seed);
  auto space = make_space({Factor::levels(static_cast<int>(s_dim)),
                           Factor::levels(static_cast<int>(e_dim))});
  Matrix h_s = Matrix::Zero(s_dim, s_dim);
  for (std::int64_t j = 0; j < s_dim; ++j) h_s(j, j) = 0.3 + 0.7 * j;
  const Matrix h_e = random_hermitian(e_dim, rng);
  Matrix h_se = Matrix::Zero(s_dim * e_dim, s_dim * e_dim);
  for (std::int64_t j = 0; j < s_dim; ++j)
    h_se.block(j * e_dim, j * e_dim, e_dim, e_dim) = random_hermitian(e_dim, rng, 0.5);
  return build_generic(space, 1, h_s, h_e, h_se, "random-case-b");
}

inline ModelSpec random_generic_model(unsigned seed, std::int64_t s_dim = 2,
                                      std::int64_t e_dim = 3) {
  std::mt19937 rng(seed);
  auto space = make_space({Factor::levels(static_cast<int>(s_dim)),
                           Factor::levels(static_cast<int>(e_dim))});
  const Matrix h_s = random_hermitian(s_dim, rng);
  const Matrix h_e = random_hermitian(e_dim, rng);
  const Matrix h_se = random_hermitian(s_dim * e_dim, rng, 0.5);
  return build_generic(space, 1, h_s, h_e, h_se, "random-generic");
}

inline InitialState random_state(const ModelSpec& model, unsigned seed) {
  std::mt19937 rng(seed);
  return initial_state(model, random_amplitudes(model.s_dim, rng),
                       random_weights(model.e_dim, rng));
}

inline std::vector<double> linear_grid(double t_max, int points) {
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = t_max * i / (points - 1);
  grid[0] = 0.0;
  return grid;
}

inline double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline TwoLevelParams reference_two_level_params() {
  TwoLevelParams p;
  p.levels = {{0.3, Complex(0.6, 0.2), 0.35, -0.20, 0.10, -0.25},
              {1.1, Complex(-0.4, 0.66332495807108), -0.15, 0.40, -0.05, 0.30}};
  p.e1 = 1.7;
  p.e2 = 0.6;
  p.d11 = 0.7;
  p.d22 = 0.3;
  p.c_damp = 0.0;
  return p;
}

inline ElectronPhononParams reference_electron_phonon_params(int n_max = 8) {
  ElectronPhononParams p;
  p.nu = 2;
  p.eps = {0.4, 0.9};
  p.omega0 = 1.0;
  p.v0 = 0.15;
  p.n_max = n_max;
  p.n0 = 1;
  p.n0p = 0;
  return p;
}

inline InitialState electron_phonon_reference_state(const ModelSpec& model) {
  // superposition across electron-number sectors, phonon state mixing the
  // lowest two Fock levels
  Vector c = Vector::Zero(model.s_dim);
  c(0) = 0.5;
  c(1) = Complex(0.5, 0.3);
  c(3) = Complex(-0.2, 0.61644140029689764);
  c /= c.norm();
  RealVector d = RealVector::Zero(model.e_dim);
  d(0) = 0.8;
  d(1) = 0.2;
  return initial_state(model, c, d);
}

}  // namespace verify_detail

// --- case (a): commuting environment implies zero exchange -----------------

inline VerificationReport suite_case_a() {
  using namespace verify_detail;
  VerificationReport report;

  auto zero_exchange_check = [&](const ModelSpec& model, const InitialState& state,
                                 const std::string& label) {
    CumulantContext ctx(model, state);
    const auto cls = classify_commutation(model, 1e-12);
    report.checks.push_back({label + "/classified-case-a", model.name,
                             cls.case_a ? 1.0 : 0.0, 1.0, cls.case_a});
    const double t_max = 20.0 / std::max(1.0, ctx.h_norm());
    double max_de = 0.0, max_v = 0.0;
    for (double t : linear_grid(t_max, 200)) {
      max_de = std::max(max_de, std::abs(energy_exchange(ctx, t)));
      max_v = std::max(max_v, std::abs(exchange_speed(ctx, t)));
    }
    const double bound = 1e-10 * std::max(1.0, ctx.he_norm());
    report.checks.push_back({label + "/max-delta-e", model.name, max_de, bound,
                             max_de <= bound});
    report.checks.push_back({label + "/max-v-e", model.name, max_v, bound,
                             max_v <= bound});
  };

  {
    ImpurityBecParams p;
    p.modes = 1;
    p.eps = {0.8};
    p.e = {1.2};
    p.n_max = 8;
    p.variant = BecCouplingVariant::Density;
    const ModelSpec model = build_impurity_bec(p);
    zero_exchange_check(model, random_state(model, 11), "impurity-bec-single-mode");

    // environment stationarity: a single H_E eigenstate weight stays put
    std::mt19937 rng(17);
    Vector c = random_amplitudes(model.s_dim, rng);
    RealVector d = RealVector::Zero(model.e_dim);
    d(2) = 1.0;
    const InitialState state = initial_state(model, c, d);
    CumulantContext ctx(model, state);
    double max_dev = 0.0;
    for (double t : {0.7, 2.9, 11.0}) {
      const Matrix rho_t = propagate_density(state.rho0, ctx.evolution_at(t));
      // partial trace over S
      Matrix rho_e = Matrix::Zero(model.e_dim, model.e_dim);
      for (std::int64_t j = 0; j < model.s_dim; ++j)
        rho_e += rho_t.block(j * model.e_dim, j * model.e_dim, model.e_dim, model.e_dim);
      const Matrix rho_e0 = model.e_eig.eigenvectors *
                            d.cast<Complex>().asDiagonal() *
                            model.e_eig.eigenvectors.adjoint();
      max_dev = std::max(max_dev, max_abs(Matrix(rho_e - rho_e0)));
    }
    report.checks.push_back({"impurity-bec-single-mode/env-stationary", model.name,
                             max_dev, 1e-10, max_dev <= 1e-10});
  }
  {
    ImpurityBecParams p;
    p.modes = 1;
    p.eps = {0.8};
    p.e = {1.2};
    p.n_max = 6;
    p.v_b = 0.5;
    p.variant = BecCouplingVariant::Density;
    const ModelSpec model = build_impurity_bec(p);
    zero_exchange_check(model, random_state(model, 13), "impurity-bec-quartic");
  }
  {
    const ModelSpec model = random_case_a_model(23);
    zero_exchange_check(model, random_state(model, 29), "random-diagonal-coupling");
  }
  {
    // literal exchange coupling with nondegenerate boson energies: the
    // commutator does not vanish; the norm is reported, not assumed zero
    ImpurityBecParams p;
    p.modes = 2;
    p.eps = {0.5, 0.9};
    p.e = {1.0, 1.6};
    p.n_max = 3;
    p.variant = BecCouplingVariant::Exchange;
    const ModelSpec model = build_impurity_bec(p);
    const auto [he_norm, hs_norm] = commutator_norms(model);
    report.checks.push_back({"impurity-bec-exchange/commutator-he-hse-measured",
                             model.name, he_norm,
                             std::numeric_limits<double>::infinity(), true});
    const bool nonzero = he_norm > 1e-8;
    report.checks.push_back({"impurity-bec-exchange/nondegenerate-not-case-a",
                             model.name, he_norm, 1e-8, nonzero});
  }
  return report;
}

// --- case (b): diagonal-in-S structure --------------------------------------

inline VerificationReport suite_case_b() {
  using namespace verify_detail;
  VerificationReport report;

  const ModelSpec model = build_electron_phonon_q0(reference_electron_phonon_params());
  const InitialState state = electron_phonon_reference_state(model);
  CumulantContext ctx(model, state);

  const auto cls = classify_commutation(model, 1e-12);
  report.checks.push_back({"electron-phonon/case-b", model.name, cls.case_b ? 1.0 : 0.0,
                           1.0, cls.case_b && !cls.case_a});

  double scale = 1.0;
  double max_split_dev = 0.0, max_v2 = 0.0, max_path_dev = 0.0;
  for (double t : linear_grid(12.0, 49)) {
    const double v = exchange_speed(ctx, t);
    scale = std::max(scale, std::abs(v));
    const auto split = case_b_speed_split(ctx, t);
    max_v2 = std::max(max_v2, std::abs(split.v2_plus_cc));
    max_split_dev = std::max(max_split_dev, std::abs(2.0 * split.v1 - v));
    max_path_dev = std::max(max_path_dev,
                            std::abs(case_b_delta_e(ctx, t) - energy_exchange(ctx, t)));
  }
  report.checks.push_back({"electron-phonon/v2-plus-cc", model.name, max_v2,
                           1e-9 * scale, max_v2 <= 1e-9 * scale});
  report.checks.push_back({"electron-phonon/speed-split", model.name, max_split_dev,
                           1e-8 * scale, max_split_dev <= 1e-8 * scale});
  report.checks.push_back({"electron-phonon/eq18-vs-generic", model.name, max_path_dev,
                           1e-9, max_path_dev <= 1e-9});

  const double de0 = std::abs(energy_exchange(ctx, 0.0));
  report.checks.push_back({"electron-phonon/delta-e-at-zero", model.name, de0,
                           1e-12 * std::max(1.0, ctx.he_norm()),
                           de0 <= 1e-12 * std::max(1.0, ctx.he_norm())});

  // degenerate environment: the (E_gamma - E_gamma1) factor kills the sum
  {
    const ModelSpec degen = [&] {
      std::mt19937 rng(31);
      auto space = make_space({Factor::levels(2), Factor::levels(2)});
      Matrix h_s = Matrix::Zero(2, 2);
      h_s(0, 0) = 0.2;
      h_s(1, 1) = 1.0;
      Matrix h_e = 0.7 * Matrix::Identity(2, 2);
      Matrix h_se = Matrix::Zero(4, 4);
      h_se.block<2, 2>(0, 0) = random_hermitian(2, rng, 0.4);
      h_se.block<2, 2>(2, 2) = random_hermitian(2, rng, 0.4);
      return build_generic(space, 1, h_s, h_e, h_se, "degenerate-env");
    }();
    const InitialState dstate = random_state(degen, 37);
    const double v = std::abs(case_b_delta_e(degen, dstate, 1.9));
    report.checks.push_back({"degenerate-env/delta-e-zero", degen.name, v, 1e-12,
                             v <= 1e-12});
  }
  return report;
}

// --- Zassenhaus / BCH -------------------------------------------------------

inline VerificationReport suite_zassenhaus() {
  using namespace verify_detail;
  VerificationReport report;

  {
    // commuting inputs: bare factorization already exact
    Matrix x = Matrix::Zero(3, 3), y = Matrix::Zero(3, 3);
    x.diagonal() << Complex(0, -0.3), Complex(0, 0.8), Complex(0, -1.1);
    y.diagonal() << Complex(0, 0.5), Complex(0, -0.2), Complex(0, 0.9);
    const double err = max_abs(Matrix(zassenhaus_apply(x, y, 2) - expm(Matrix(x + y))));
    report.checks.push_back({"commuting/order-2-exact", "-", err, 1e-10, err <= 1e-10});
  }
  {
    // scalar-commutator (BCH) case on a truncated ladder pair; compared on
    // the low Fock block where truncation leakage is negligible
    const int n_max = 24, keep = 12;
    auto [a, adag] = boson_ladder(n_max);
    const double alpha = 0.05, beta = 0.07;
    const Matrix x = alpha * a, y = beta * adag;
    const Complex kappa = alpha * beta;  // [alpha a, beta a+] = alpha beta (bulk)
    const Matrix closed = bch_scalar_apply(x, y, kappa);
    const Matrix direct = expm(Matrix(x + y));
    const double err =
        max_abs(Matrix(closed.topLeftCorner(keep, keep) - direct.topLeftCorner(keep, keep)));
    report.checks.push_back({"bch-scalar/ladder-low-block", "-", err, 1e-10, err <= 1e-10});
  }
  {
    // detected scalar case (kappa = 0): closed form agrees with the generic product
    Matrix x = Matrix::Zero(2, 2), y = Matrix::Zero(2, 2);
    x.diagonal() << Complex(0, 0.4), Complex(0, -0.7);
    y.diagonal() << Complex(0, -0.1), Complex(0, 0.6);
    const auto kappa = scalar_commutator(x, y);
    const bool detected = kappa.has_value() && std::abs(*kappa) <= 1e-12;
    report.checks.push_back({"bch-scalar/zero-detection", "-", detected ? 1.0 : 0.0, 1.0,
                             detected});
  }
  {
    // truncation error slopes on Pauli generators
    Matrix sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    for (int k = 2; k <= 4; ++k) {
      std::vector<double> log_t, log_err;
      for (double t = 1e-3; t <= 1.1e-1; t *= 2.0) {
        const Matrix x = Complex(0, -t) * sx;
        const Matrix y = Complex(0, -t) * sz;
        const double err = max_abs(Matrix(zassenhaus_apply(x, y, k) - expm(Matrix(x + y))));
        log_t.push_back(std::log(t));
        log_err.push_back(std::log(err));
      }
      const double slope = fit_slope(log_t, log_err);
      const bool ok = std::abs(slope - (k + 1)) <= 0.2;
      report.checks.push_back({"pauli/slope-order-" + std::to_string(k), "-", slope,
                               static_cast<double>(k + 1), ok});
    }
  }
  {
    const ModelSpec model = build_electron_phonon_q0(reference_electron_phonon_params());
    const SpectralDecomposition h_eig = hermitian_eig(model.h_total());
    double max_err = 0.0;
    for (double t : {0.0, 0.9, 3.7, 12.4}) {
      const Matrix direct = evolution(h_eig, t);
      max_err = std::max(max_err,
                         max_abs(Matrix(electron_phonon_factorization(model, t) - direct)));
    }
    report.checks.push_back({"electron-phonon/factorization-exact", model.name, max_err,
                             1e-10, max_err <= 1e-10});
  }
  return report;
}

// --- analytic evaluators ----------------------------------------------------

inline VerificationReport suite_analytic() {
  using namespace verify_detail;
  VerificationReport report;

  // two-level example vs the numeric engine
  {
    const TwoLevelParams p = reference_two_level_params();
    const ModelSpec model = build_two_level_env(p);
    const InitialState state = two_level_initial_state(model, p);
    CumulantContext ctx(model, state);
    double max_de_dev = 0.0, max_v_dev = 0.0, worst_sign = 0.0;
    const double sign = (p.e1 - p.e2) * (p.d22 - p.d11) >= 0 ? 1.0 : -1.0;
    for (double t : linear_grid(8.0, 200)) {
      const double de_closed = two_level_delta_e(p, t);
      const double v_closed = two_level_speed(p, t);
      max_de_dev = std::max(max_de_dev, std::abs(de_closed - energy_exchange(ctx, t)));
      max_v_dev = std::max(max_v_dev, std::abs(v_closed - exchange_speed(ctx, t)));
      worst_sign = std::min(worst_sign, sign * de_closed);
    }
    report.checks.push_back({"two-level/delta-e-closed-vs-numeric", model.name,
                             max_de_dev, 1e-8, max_de_dev <= 1e-8});
    report.checks.push_back({"two-level/v-e-closed-vs-numeric", model.name, max_v_dev,
                             1e-6, max_v_dev <= 1e-6});
    report.checks.push_back({"two-level/fixed-sign", model.name, worst_sign, 0.0,
                             worst_sign >= -1e-12});
  }
  {
    // c_damp < 0: the undamped envelope |Delta_E| e^{-c t^2} stays bounded
    TwoLevelParams p = reference_two_level_params();
    p.c_damp = -0.1;
    double max_env = 0.0;
    for (double t : linear_grid(12.0, 400))
      max_env = std::max(max_env,
                         std::abs(two_level_delta_e(p, t)) * std::exp(-p.c_damp * t * t));
    const double bound = std::abs(p.e1 - p.e2) + 1.0;
    report.checks.push_back({"two-level/damped-envelope-bounded", "two-level-env",
                             max_env, bound, max_env <= bound});
  }

  // alpha / zeta / Psi
  {
    const ElectronPhononParams p = reference_electron_phonon_params();
    const double g = p.nu * p.v0;
    double max_psi = -1.0, max_alpha_dev = 0.0, max_zeta_dev = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double t = 0.005 * i;
      const auto f = alpha_zeta_psi(p, t);
      max_psi = std::max(max_psi, f.psi);
      // independent scalar route in extended precision
      const long double alpha_ld =
          static_cast<long double>(g) * std::sin(static_cast<long double>(p.omega0) * t) /
          static_cast<long double>(p.omega0);
      const long double zeta_ld =
          static_cast<long double>(p.omega0) *
          (1.0L - std::cos(static_cast<long double>(g) * t)) / static_cast<long double>(g);
      max_alpha_dev = std::max(max_alpha_dev,
                               std::abs(f.alpha - static_cast<double>(alpha_ld)));
      max_zeta_dev = std::max(max_zeta_dev,
                              std::abs(f.zeta - static_cast<double>(zeta_ld)));
    }
    report.checks.push_back({"alpha-zeta-psi/psi-nonpositive", "electron-phonon-q0",
                             max_psi, 0.0, max_psi <= 0.0});
    report.checks.push_back({"alpha-zeta-psi/alpha-independent-eval", "electron-phonon-q0",
                             max_alpha_dev, 1e-12, max_alpha_dev <= 1e-12});
    report.checks.push_back({"alpha-zeta-psi/zeta-independent-eval", "electron-phonon-q0",
                             max_zeta_dev, 1e-12, max_zeta_dev <= 1e-12});
    const double t_small = 1e-3 / g;
    const double series_dev = std::abs(zeta_series(p, t_small) - zeta_direct(p, t_small));
    report.checks.push_back({"alpha-zeta-psi/zeta-series-limit", "electron-phonon-q0",
                             series_dev, 1e-9, series_dev <= 1e-9});
  }

  // electron-phonon matrix element: bounded and non-decaying; series path reported
  {
    const ElectronPhononParams p = reference_electron_phonon_params(12);
    double max_el = 0.0;
    for (double t : linear_grid(40.0, 160))
      max_el = std::max(max_el, std::abs(electron_phonon_matrix_element(p, t)));
    report.checks.push_back({"electron-phonon/matrix-element-bounded", "electron-phonon-q0",
                             max_el, 1.0 + 1e-10, max_el <= 1.0 + 1e-10});

    const auto reports = electron_phonon_series_report(p, {0.0, 0.5, 1.5, 3.0});
    double max_diff = 0.0;
    for (const auto& r : reports) max_diff = std::max(max_diff, r.abs_diff);
    // informational: the printed series is reported against the numeric path
    report.checks.push_back({"electron-phonon/series-vs-numeric-measured",
                             "electron-phonon-q0", max_diff,
                             std::numeric_limits<double>::infinity(), true});
  }
  return report;
}

// --- numeric hygiene --------------------------------------------------------

inline VerificationReport suite_numerics(bool negative_control = false) {
  using namespace verify_detail;
  VerificationReport report;

  // propagator hygiene on a random generic model
  {
    const ModelSpec model = random_generic_model(41, 3, 4);
    CumulantContext ctx(model, random_state(model, 43));
    double max_unitarity = 0.0, max_comp = 0.0;
    const Eigen::Index d = model.space->dim();
    for (double t : {0.3, 1.7, 6.2}) {
      const Matrix u = ctx.evolution_at(t);
      max_unitarity = std::max(max_unitarity,
                               max_abs(Matrix(u.adjoint() * u - Matrix::Identity(d, d))));
      const Matrix u2 = ctx.evolution_at(2.0 * t);
      max_comp = std::max(max_comp, max_abs(Matrix(u2 - u * u)));
    }
    report.checks.push_back({"propagator/unitarity", model.name, max_unitarity, 1e-10,
                             max_unitarity <= 1e-10});
    report.checks.push_back({"propagator/composition", model.name, max_comp, 1e-9,
                             max_comp <= 1e-9});

    // expm route against the spectral route
    const Matrix h = model.h_total();
    const double expm_dev =
        max_abs(Matrix(expm(Matrix(Complex(0, -1.3) * h)) - ctx.evolution_at(1.3)));
    report.checks.push_back({"propagator/expm-vs-spectral", model.name, expm_dev, 1e-9,
                             expm_dev <= 1e-9});

    // density spectrum preservation
    const InitialState state = random_state(model, 47);
    const Matrix rho_t = propagate_density(state.rho0, ctx.evolution_at(2.9));
    const RealVector s0 = hermitian_eig(state.rho0).eigenvalues;
    const RealVector s1 = hermitian_eig(rho_t).eigenvalues;
    const double spec_dev = (s0 - s1).cwiseAbs().maxCoeff();
    report.checks.push_back({"density/spectrum-preserved", model.name, spec_dev, 1e-9,
                             spec_dev <= 1e-9});
  }

  // chi normalization and Delta_E(0) on randomized models and states
  {
    double max_chi_dev = 0.0, max_de0 = 0.0;
    for (unsigned k = 0; k < 10; ++k) {
      const ModelSpec model = random_generic_model(100 + k, 2, 3);
      const InitialState state = random_state(model, 200 + k);
      CumulantContext ctx(model, state);
      for (double t : {0.0, 1.1, 4.4})
        max_chi_dev = std::max(max_chi_dev,
                               std::abs(characteristic_function(ctx, 0.0, t) - Complex(1.0)));
      max_de0 = std::max(max_de0, std::abs(energy_exchange(ctx, 0.0)) /
                                      std::max(1.0, ctx.he_norm()));
    }
    report.checks.push_back({"chi/normalization", "randomized", max_chi_dev, 1e-12,
                             max_chi_dev <= 1e-12});
    report.checks.push_back({"delta-e/zero-at-origin", "randomized", max_de0, 1e-12,
                             max_de0 <= 1e-12});
  }

  // oracle equivalence on the suite models
  {
    double worst = 0.0;
    auto check_model = [&](const ModelSpec& model, unsigned seed) {
      const InitialState state = random_state(model, seed);
      CumulantContext ctx(model, state);
      for (double t : linear_grid(10.0, 21)) {
        const double a = energy_exchange(ctx, t);
        const double b = energy_exchange_oracle(ctx, t);
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
      }
    };
    check_model(random_generic_model(51, 2, 3), 52);
    check_model(random_case_b_model(53), 54);
    check_model(build_electron_phonon_q0(reference_electron_phonon_params()), 55);
    report.checks.push_back({"oracle/energy-exchange-equivalence", "suite", worst, 1e-8,
                             worst <= 1e-8});
  }

  // finite-difference convergence orders (plain central differences, halved step)
  {
    const ModelSpec model = random_case_b_model(61);
    const InitialState state = random_state(model, 62);
    CumulantContext ctx(model, state);
    const double t = 1.3;

    const double analytic_de = energy_exchange_analytic(ctx, t);
    auto eta_d = [&](double h) {
      return characteristic_function(ctx, h, t).imag() / h;
    };
    const double h_eta = 0.1 / std::max(1.0, ctx.he_norm());
    const double order_eta = std::log2(std::abs(eta_d(h_eta) - analytic_de) /
                                       std::abs(eta_d(h_eta / 2.0) - analytic_de));
    report.checks.push_back({"fd/eta-derivative-order", model.name, order_eta, 1.9,
                             order_eta >= 1.9});

    const double analytic_v = exchange_speed_analytic(ctx, t);
    auto t_d = [&](double h) {
      return (energy_exchange_analytic(ctx, t + h) - energy_exchange_analytic(ctx, t - h)) /
             (2.0 * h);
    };
    const double h_t = 0.1 / std::max(1.0, ctx.h_norm());
    const double order_t = std::log2(std::abs(t_d(h_t) - analytic_v) /
                                     std::abs(t_d(h_t / 2.0) - analytic_v));
    report.checks.push_back({"fd/time-derivative-order", model.name, order_t, 1.9,
                             order_t >= 1.9});
  }

  // builders reject non-Hermitian couplings
  {
    bool rejected = false;
    try {
      auto space = make_space({Factor::levels(2), Factor::levels(2)});
      Matrix h_se = Matrix::Zero(4, 4);
      h_se(0, 1) = 1.0;  // not Hermitian
      if (negative_control) h_se.setZero();  // let the corrupted input through
      build_generic(space, 1, Matrix::Zero(2, 2), Matrix::Zero(2, 2), h_se,
                    "corrupted");
      rejected = false;
    } catch (const Error&) {
      rejected = true;
    }
    report.checks.push_back({"hermiticity/non-hermitian-coupling-rejected", "corrupted",
                             rejected ? 1.0 : 0.0, 1.0, rejected});
  }
  return report;
}

inline VerificationReport run_suite(const std::string& selector,
                                    bool negative_control = false) {
  VerificationReport report;
  auto append = [&](const VerificationReport& r) {
    report.checks.insert(report.checks.end(), r.checks.begin(), r.checks.end());
  };
  if (selector == "case-a" || selector == "all") append(suite_case_a());
  if (selector == "case-b" || selector == "all") append(suite_case_b());
  if (selector == "zassenhaus" || selector == "all") append(suite_zassenhaus());
  if (selector == "analytic" || selector == "all") append(suite_analytic());
  if (selector == "numerics" || selector == "all") append(suite_numerics(negative_control));
  if (report.checks.empty())
    throw Error("verify: unknown suite '" + selector +
                "' (expected all|case-a|case-b|zassenhaus|analytic|numerics)");
  return report;
}

}  // namespace exlab
