#include <catch2/catch.hpp>

#include <random>

#include "exlab/cumulant.hpp"
#include "exlab/model.hpp"

using namespace exlab;

namespace {

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix random_hermitian(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  return 0.5 * (m + Matrix(m.adjoint())).eval();
}

}  // namespace

TEST_CASE("build_generic lifts, validates, and classifies") {
  auto space = make_space({Factor::levels(2), Factor::levels(2)});

  // sigma_z (x) sigma_z coupling with H_E prop sigma_z: case (a)
  {
    const ModelSpec model = build_generic(space, 1, 0.7 * pauli_x(), 0.9 * pauli_z(),
                                          0.3 * kron(pauli_z(), pauli_z()));
    const auto cls = classify_commutation(model);
    CHECK(cls.case_a);
    CHECK_FALSE(cls.case_b);
    CHECK(max_abs(Matrix(model.h_s.m - kron(0.7 * pauli_x(), Matrix::Identity(2, 2)))) ==
          0.0);
    CHECK(max_abs(Matrix(model.h_e.m - kron(Matrix::Identity(2, 2), 0.9 * pauli_z()))) ==
          0.0);
  }
  // sigma_z (x) sigma_x coupling with H_S prop sigma_z: case (b)
  {
    const ModelSpec model = build_generic(space, 1, 0.7 * pauli_z(), 0.9 * pauli_z(),
                                          0.3 * kron(pauli_z(), pauli_x()));
    const auto cls = classify_commutation(model);
    CHECK(cls.case_b);
    CHECK_FALSE(cls.case_a);
  }
  // H_SE = identity: both flags
  {
    const ModelSpec model = build_generic(space, 1, pauli_z(), pauli_z(),
                                          Matrix::Identity(4, 4));
    const auto cls = classify_commutation(model);
    CHECK(cls.case_a);
    CHECK(cls.case_b);
  }
  // no coupling: zero exchange downstream
  {
    const ModelSpec model = build_generic(space, 1, random_hermitian(2, 1),
                                          random_hermitian(2, 2), Matrix::Zero(4, 4));
    Vector c(2);
    c << std::sqrt(0.4), Complex(0.0, std::sqrt(0.6));
    RealVector d(2);
    d << 0.3, 0.7;
    const InitialState state = initial_state(model, c, d);
    for (double t : {0.5, 2.1, 7.7})
      CHECK(std::abs(energy_exchange(model, state, t)) <= 1e-12);
  }
  // non-Hermitian coupling rejected
  Matrix bad = Matrix::Zero(4, 4);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(build_generic(space, 1, pauli_z(), pauli_z(), bad), Error);
  // dimension mismatches rejected
  CHECK_THROWS_AS(build_generic(space, 1, Matrix::Zero(3, 3), pauli_z(),
                                Matrix::Zero(4, 4)), Error);
  CHECK_THROWS_AS(build_generic(space, 2, pauli_z(), pauli_z(), Matrix::Zero(4, 4)),
                  Error);
}

TEST_CASE("impurity-BEC zero-momentum model") {
  ImpurityBecParams p;
  p.modes = 1;
  p.eps = {0.8};
  p.e = {1.2};
  p.n_max = 5;
  p.volume = 2.0;

  for (auto variant : {BecCouplingVariant::Density, BecCouplingVariant::Exchange}) {
    p.variant = variant;
    const ModelSpec model = build_impurity_bec(p);
    // single mode: H_SE = (1/V) c+c (x) a+a in both variants
    auto [c, cdag] = fermion_ladder(0, 1);
    auto [a, adag] = boson_ladder(p.n_max);
    const Matrix expected = kron(Matrix(cdag * c), Matrix(adag * a)) / p.volume;
    CHECK(max_abs(Matrix(model.h_se.m - expected)) <= 1e-13);
    const auto cls = classify_commutation(model);
    CHECK(cls.case_a);
    CHECK(cls.case_b);

    // §4.2: no energy exchange on the single-mode instance
    Vector amp(2);
    amp << std::sqrt(0.5), std::sqrt(0.5);
    RealVector d = RealVector::Zero(model.e_dim);
    d(1) = 0.4;
    d(3) = 0.6;
    const InitialState state = initial_state(model, amp, d);
    for (double t : {0.9, 4.2, 15.0})
      CHECK(std::abs(energy_exchange(model, state, t)) <= 1e-10);
  }

  // quartic term shifts the boson spectrum: E(n) = e n + (v_b/2V) n(n-1)
  p.variant = BecCouplingVariant::Density;
  p.v_b = 0.6;
  {
    const ModelSpec model = build_impurity_bec(p);
    for (int n = 0; n <= p.n_max; ++n)
      CHECK(model.h_e_local(n, n).real() ==
            Approx(p.e[0] * n + p.v_b / (2.0 * p.volume) * n * (n - 1)).margin(1e-12));
    CHECK(classify_commutation(model).case_a);
  }

  // two nondegenerate boson modes with the literal exchange coupling do not
  // commute with the kinetic environment
  ImpurityBecParams p2;
  p2.modes = 2;
  p2.eps = {0.5, 0.9};
  p2.e = {1.0, 1.6};
  p2.n_max = 2;
  p2.variant = BecCouplingVariant::Exchange;
  {
    const ModelSpec model = build_impurity_bec(p2);
    CHECK_FALSE(classify_commutation(model).case_a);
    CHECK(commutator_norms(model).first > 1e-6);
    // degenerate energies restore the commutation
    p2.e = {1.3, 1.3};
    CHECK(classify_commutation(build_impurity_bec(p2)).case_a);
  }

  p.q = 1;
  CHECK_THROWS_AS(build_impurity_bec(p), Error);
  p.q = 0;
  p.n_max = 0;
  CHECK_THROWS_AS(build_impurity_bec(p), Error);
}

TEST_CASE("two-level environment model") {
  TwoLevelParams p;
  p.levels = {{0.3, std::sqrt(0.5), 0.0, 0.0, 0.0, 0.0},
              {1.1, std::sqrt(0.5), 0.0, 0.0, 0.0, 0.0}};
  p.e1 = 1.7;
  p.e2 = 0.6;
  p.d11 = 1.0;
  p.d22 = 0.0;

  // H_SE = 0: no exchange
  {
    const ModelSpec model = build_two_level_env(p);
    CHECK(classify_commutation(model).case_b);
    Vector c(2);
    c << p.levels[0].c, p.levels[1].c;
    RealVector d(2);
    d << 1.0, 0.0;
    const InitialState state = initial_state(model, c, d);
    for (double t : {0.8, 3.3}) CHECK(std::abs(energy_exchange(model, state, t)) <= 1e-12);
  }

  // nontrivial blocks land on the right diagonal positions
  p.levels[0] = {0.3, std::sqrt(0.5), 0.25, -0.4, 0.1, -0.2};
  p.levels[1] = {1.1, std::sqrt(0.5), -0.3, 0.15, 0.0, 0.05};
  {
    const ModelSpec model = build_two_level_env(p);
    CHECK(classify_commutation(model).case_b);
    CHECK_FALSE(classify_commutation(model).case_a);
    for (int j = 0; j < 2; ++j)
      CHECK(max_abs(Matrix(model.h_se.m.block<2, 2>(2 * j, 2 * j) -
                           p.coupling_block(j))) == 0.0);

    // d11 = d22 = 1/2: the (d22 - d11) factor kills the exchange
    Vector c(2);
    c << p.levels[0].c, p.levels[1].c;
    RealVector d(2);
    d << 0.5, 0.5;
    const InitialState state = initial_state(model, c, d);
    for (double t : {0.7, 2.9, 6.1})
      CHECK(std::abs(energy_exchange(model, state, t)) <= 1e-10);
  }

  p.d11 = 0.7;
  p.d22 = 0.7;
  CHECK_THROWS_AS(build_two_level_env(p), Error);
  p.d11 = -0.1;
  p.d22 = 1.1;
  CHECK_THROWS_AS(build_two_level_env(p), Error);
}

TEST_CASE("electron-phonon zero-mode model") {
  ElectronPhononParams p;
  p.nu = 2;
  p.eps = {0.4, 0.9};
  p.omega0 = 1.0;
  p.v0 = 0.15;
  p.n_max = 6;
  const ModelSpec model = build_electron_phonon_q0(p);

  const auto cls = classify_commutation(model);
  CHECK(cls.case_b);
  CHECK_FALSE(cls.case_a);
  CHECK_FALSE(is_zero(commutator(model.h_e, model.h_se), 1e-10));

  // H_S spectrum: subset sums of the electron energies
  RealVector expected(4);
  expected << 0.0, 0.4, 0.9, 1.3;
  std::sort(expected.data(), expected.data() + 4);
  for (int k = 0; k < 4; ++k)
    CHECK(model.s_eig.eigenvalues(k) == Approx(expected(k)).margin(1e-12));

  // vacuum electron sector: coupling acts as zero
  {
    Vector c = Vector::Zero(4);
    c(0) = 1.0;  // lowest eigenvalue 0 = empty sector
    RealVector d = RealVector::Zero(model.e_dim);
    d(2) = 1.0;
    const InitialState state = initial_state(model, c, d);
    for (double t : {1.1, 5.5}) CHECK(std::abs(energy_exchange(model, state, t)) <= 1e-10);
  }

  // V0 = 0: no exchange for any occupation
  {
    ElectronPhononParams p0 = p;
    p0.v0 = 0.0;
    const ModelSpec free_model = build_electron_phonon_q0(p0);
    Vector c(4);
    c << 0.5, 0.5, 0.5, 0.5;
    RealVector d = RealVector::Zero(free_model.e_dim);
    d(1) = 1.0;
    const InitialState state = initial_state(free_model, c, d);
    for (double t : {0.7, 3.9}) CHECK(std::abs(energy_exchange(free_model, state, t)) <= 1e-12);
  }

  ElectronPhononParams bad = p;
  bad.omega0 = 0.0;
  CHECK_THROWS_AS(build_electron_phonon_q0(bad), Error);
  bad = p;
  bad.n_max = 1;
  CHECK_THROWS_AS(build_electron_phonon_q0(bad), Error);
  bad = p;
  bad.eps = {0.4};
  CHECK_THROWS_AS(build_electron_phonon_q0(bad), Error);
}

TEST_CASE("initial_state materializes the product density operator") {
  auto space = make_space({Factor::levels(2), Factor::levels(2)});
  const ModelSpec model = build_generic(space, 1, random_hermitian(2, 51),
                                        random_hermitian(2, 52),
                                        0.2 * random_hermitian(4, 53));

  // pure product state
  {
    Vector c(2);
    c << 1.0, 0.0;
    RealVector d(2);
    d << 1.0, 0.0;
    const InitialState state = initial_state(model, c, d);
    const Vector v = model.product_eigvec(0, 0);
    CHECK(max_abs(Matrix(state.rho0 - v * v.adjoint())) <= 1e-13);
  }

  // mixed: trace one, Hermitian, PSD, spectrum = {d1, d2, 0, 0}
  {
    Vector c(2);
    c << std::sqrt(0.3), Complex(0, std::sqrt(0.7));
    RealVector d(2);
    d << 0.25, 0.75;
    const InitialState state = initial_state(model, c, d);
    CHECK(std::abs(state.rho0.trace() - Complex(1.0)) <= 1e-12);
    CHECK(is_hermitian(state.rho0));
    const RealVector spec = hermitian_eig(state.rho0).eigenvalues;
    CHECK(spec(0) >= -1e-10);
    CHECK(spec(0) == Approx(0.0).margin(1e-12));
    CHECK(spec(1) == Approx(0.0).margin(1e-12));
    CHECK(spec(2) == Approx(0.25).margin(1e-12));
    CHECK(spec(3) == Approx(0.75).margin(1e-12));
  }

  Vector c_bad(2);
  c_bad << 1.0, 0.5;
  RealVector d_ok(2);
  d_ok << 0.5, 0.5;
  CHECK_THROWS_AS(initial_state(model, c_bad, d_ok), Error);
  Vector c_ok(2);
  c_ok << 1.0, 0.0;
  RealVector d_bad(2);
  d_bad << 0.7, 0.7;
  CHECK_THROWS_AS(initial_state(model, c_ok, d_bad), Error);
  RealVector d_neg(2);
  d_neg << -0.1, 1.1;
  CHECK_THROWS_AS(initial_state(model, c_ok, d_neg), Error);
}
