#include <catch2/catch.hpp>

#include <random>

#include "exlab/analytic.hpp"

using namespace exlab;

namespace {

TwoLevelParams sample_params() {
  TwoLevelParams p;
  p.levels = {{0.3, Complex(0.6, 0.2), 0.35, -0.20, 0.10, -0.25},
              {1.1, Complex(-0.4, 0.66332495807108), -0.15, 0.40, -0.05, 0.30}};
  p.e1 = 1.7;
  p.e2 = 0.6;
  p.d11 = 0.7;
  p.d22 = 0.3;
  return p;
}

ElectronPhononParams sample_ep(int n_max = 8) {
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

}  // namespace

TEST_CASE("coefficient bundle basics") {
  // t = 0: identity pattern
  Matrix block(2, 2);
  block << 0.4, Complex(0.3, -0.7), Complex(0.3, 0.7), -0.9;
  const auto at0 = appendix_a_coefficients(block, 0.0);
  CHECK(at0.a11 == Approx(1.0).margin(1e-14));
  CHECK(at0.a22 == Approx(1.0).margin(1e-14));
  CHECK(at0.a12 == Approx(0.0).margin(1e-14));
  CHECK(at0.a21 == Approx(0.0).margin(1e-14));
  CHECK(at0.b12 == Approx(0.0).margin(1e-14));
  CHECK(at0.b21 == Approx(0.0).margin(1e-14));

  // zero block: coefficients constant in t
  for (double t : {0.5, 3.0}) {
    const auto c = appendix_a_coefficients(Matrix(Matrix::Zero(2, 2)), t);
    CHECK(c.a11 == Approx(1.0).margin(1e-14));
    CHECK(c.a12 == Approx(0.0).margin(1e-14));
  }

  // random Hermitian block: coefficients match direct expm entries; the
  // assembled exponential is unitary
  std::mt19937 rng(7);
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix h(2, 2);
  h << dist(rng), Complex(dist(rng), dist(rng)), 0.0, dist(rng);
  h(1, 0) = std::conj(h(0, 1));
  const double t = 1.37;
  const auto c = appendix_a_coefficients(h, t);
  const Matrix direct = expm(Matrix(Complex(0, -t) * h));
  CHECK(c.a11 == Approx(direct(0, 0).real()).margin(1e-12));
  CHECK(c.a21 == Approx(direct(1, 0).real()).margin(1e-12));
  CHECK(c.b21 == Approx(direct(1, 0).imag()).margin(1e-12));
  CHECK(c.a12 == Approx(direct.adjoint()(0, 1).real()).margin(1e-12));
  CHECK(c.b12 == Approx(direct.adjoint()(0, 1).imag()).margin(1e-12));
  CHECK(max_abs(Matrix(c.u_minus.adjoint() * c.u_minus - Matrix::Identity(2, 2))) <=
        1e-12);

  CHECK_THROWS_AS(appendix_a_coefficients(Matrix(Matrix::Zero(3, 3)), 1.0), Error);
  Matrix nonherm(2, 2);
  nonherm << 0, 1, 0, 0;
  CHECK_THROWS_AS(appendix_a_coefficients(nonherm, 1.0), Error);
  CHECK_THROWS_AS(appendix_a_coefficients(sample_params(), 5, 1.0), Error);
}

TEST_CASE("two-level closed forms against the numeric engine") {
  const TwoLevelParams p = sample_params();
  const ModelSpec model = build_two_level_env(p);
  const InitialState state = two_level_initial_state(model, p);
  CumulantContext ctx(model, state);

  CHECK(two_level_delta_e(p, 0.0) == Approx(0.0).margin(1e-14));
  for (double t : {0.4, 1.1, 2.6, 5.9, 7.8}) {
    CHECK(two_level_delta_e(p, t) == Approx(energy_exchange(ctx, t)).margin(1e-8));
    CHECK(two_level_speed(p, t) == Approx(exchange_speed(ctx, t)).margin(1e-6));
    // triple check: the case-(b) reduced sum agrees too
    CHECK(case_b_delta_e(ctx, t) == Approx(two_level_delta_e(p, t)).margin(1e-8));
  }

  // centered finite difference of the closed-form exchange
  const double t = 1.9;
  auto central = [&](double h) {
    return (two_level_delta_e(p, t + h) - two_level_delta_e(p, t - h)) / (2.0 * h);
  };
  const double e1 = std::abs(central(2e-3) - two_level_speed(p, t));
  const double e2 = std::abs(central(1e-3) - two_level_speed(p, t));
  CHECK(e2 <= 1e-4);
  CHECK(std::log2(e1 / e2) >= 1.9);

  // degenerate weights: the (d22 - d11) factor kills the exchange
  TwoLevelParams flat = p;
  flat.d11 = flat.d22 = 0.5;
  CHECK(two_level_delta_e(flat, 2.3) == Approx(0.0).margin(1e-14));

  // no coupling: no speed
  TwoLevelParams quiet = p;
  for (auto& l : quiet.levels) l.r12 = l.i12 = l.h11 = l.h22 = 0.0;
  CHECK(two_level_speed(quiet, 1.7) == Approx(0.0).margin(1e-14));

  // damped envelope: multiplying out e^{c t^2} leaves a bounded profile
  TwoLevelParams damped = p;
  damped.c_damp = -0.2;
  for (double td : {1.0, 5.0, 9.0})
    CHECK(std::abs(two_level_delta_e(damped, td)) * std::exp(0.2 * td * td) <=
          std::abs(p.e1 - p.e2) + 1.0);
}

TEST_CASE("alpha, zeta, and Psi") {
  const ElectronPhononParams p = sample_ep();
  const double g = p.nu * p.v0;

  const auto at0 = alpha_zeta_psi(p, 0.0);
  CHECK(at0.alpha == Approx(0.0).margin(1e-14));
  CHECK(at0.zeta == Approx(0.0).margin(1e-14));
  CHECK(at0.psi == Approx(0.0).margin(1e-14));

  for (double t : {0.3, 1.9, 7.4, 31.0}) {
    const auto f = alpha_zeta_psi(p, t);
    CHECK(f.alpha == Approx(g * std::sin(p.omega0 * t) / p.omega0).margin(1e-14));
    CHECK(f.zeta == Approx(zeta_direct(p, t)).margin(1e-12));
    CHECK(f.psi <= 0.0);
    CHECK(std::exp(f.psi) <= 1.0);
    CHECK(std::exp(f.psi) > 0.0);
    CHECK(std::abs(f.alpha) <= g / p.omega0 + 1e-14);
    CHECK(std::abs(f.zeta) <= 2.0 * p.omega0 / g + 1e-14);
    // periodicity of alpha
    CHECK(alpha_zeta_psi(p, t + 2.0 * M_PI / p.omega0).alpha ==
          Approx(f.alpha).margin(1e-12));
  }

  // series limit at small coupling-time product
  const double t_small = 1e-3 / g;
  CHECK(zeta_series(p, t_small) == Approx(zeta_direct(p, t_small)).margin(1e-9));
  // the guarded evaluator switches to the series without a jump
  ElectronPhononParams weak = p;
  weak.v0 = 1e-9;
  CHECK(alpha_zeta_psi(weak, 1.0).zeta ==
        Approx(zeta_series(weak, 1.0)).margin(1e-15));
}

TEST_CASE("electron-phonon matrix element") {
  // V0 = 0: free phase for n0 = n0p, zero otherwise
  ElectronPhononParams p0 = sample_ep();
  p0.v0 = 0.0;
  p0.n0 = 2;
  p0.n0p = 2;
  for (double t : {0.7, 2.9}) {
    const Complex el = electron_phonon_matrix_element(p0, t);
    const Complex expected =
        std::exp(Complex(0.0, -(p0.eps.front() + p0.omega0 * p0.n0) * t));
    CHECK(std::abs(el - expected) <= 1e-12);
  }
  p0.n0p = 1;
  CHECK(std::abs(electron_phonon_matrix_element(p0, 1.3)) <= 1e-12);

  // coupled: bounded by one, oscillatory, no decay over many periods
  const ElectronPhononParams p = sample_ep(12);
  double max_late = 0.0, max_all = 0.0;
  for (int i = 0; i <= 160; ++i) {
    const double t = 40.0 * i / 160.0;
    const double mag = std::abs(electron_phonon_matrix_element(p, t));
    CHECK(mag <= 1.0 + 1e-10);
    max_all = std::max(max_all, mag);
    if (t >= 30.0) max_late = std::max(max_late, mag);
  }
  CHECK(max_late >= 0.5 * max_all);

  ElectronPhononParams tiny = sample_ep(3);
  tiny.n0 = 5;
  CHECK_THROWS_AS(electron_phonon_matrix_element(tiny, 1.0), Error);

  // the printed-series path is evaluated and reported against the numeric one
  const auto report = electron_phonon_series_report(sample_ep(10), {0.0, 0.8, 2.1});
  REQUIRE(report.size() == 3);
  for (const auto& r : report) {
    CHECK(std::isfinite(r.abs_diff));
    CHECK(std::abs(r.numeric) <= 1.0 + 1e-10);
  }
}

TEST_CASE("electron-phonon exchange series") {
  const ElectronPhononParams p = sample_ep();
  const ModelSpec model = build_electron_phonon_q0(p);
  Vector c = Vector::Zero(model.s_dim);
  c(0) = std::sqrt(0.5);
  c(2) = std::sqrt(0.5);
  RealVector d = RealVector::Zero(model.e_dim);
  d(0) = 1.0;

  std::vector<double> grid;
  for (int i = 0; i < 25; ++i) grid.push_back(0.5 * i);
  const TimeSeries series = electron_phonon_exchange(p, c, d, grid);
  CHECK(std::abs(series.delta_e.front()) <= 1e-12);
  CHECK(series.commutation_class == "-b");

  const InitialState state = initial_state(model, c, d);
  CumulantContext ctx(model, state);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(series.delta_e[i] == Approx(case_b_delta_e(ctx, grid[i])).margin(1e-9));

  // V0 = 0: all-zero series
  ElectronPhononParams free_p = p;
  free_p.v0 = 0.0;
  const TimeSeries free_series = electron_phonon_exchange(free_p, c, d, grid);
  for (double v : free_series.delta_e) CHECK(std::abs(v) <= 1e-12);
  for (double v : free_series.v_e) CHECK(std::abs(v) <= 1e-10);
}
