#pragma once

// Model builders: the generic S+E+coupling Hamiltonian, the impurity-in-BEC
// model at zero momentum transfer, the two-level-environment model, the
// electron-phonon zero-mode model, product initial states, and the
// commutation-structure classifier.

#include <map>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "exlab/hilbert.hpp"
#include "exlab/propagator.hpp"

namespace exlab {

struct CommutationClass {
  bool case_a = false;  // [H_E, H_SE] = 0
  bool case_b = false;  // [H_S, H_SE] = 0
  double tolerance = 0.0;
};

struct ModelSpec {
  std::string name;
  SpacePtr space;          // S factors first, then E factors
  std::size_t s_factor_count = 0;
  std::int64_t s_dim = 0;
  std::int64_t e_dim = 0;

  OperatorMatrix h_s;      // lifted to the joint space
  OperatorMatrix h_e;
  OperatorMatrix h_se;

  Matrix h_s_local;        // on the S subspace alone
  Matrix h_e_local;        // on the E subspace alone

  // Eigenbases of the local Hamiltonians (ascending); initial-state
  // amplitudes and weights refer to these orderings.
  SpectralDecomposition s_eig;
  SpectralDecomposition e_eig;

  nlohmann::json params;

  Matrix h_total() const { return h_s.m + h_e.m + h_se.m; }

  // Column j (x) column g of the local eigenbases as a joint-space vector.
  Vector product_eigvec(std::int64_t j, std::int64_t g) const {
    Vector out(s_dim * e_dim);
    for (std::int64_t r = 0; r < s_dim; ++r)
      out.segment(r * e_dim, e_dim) = s_eig.eigenvectors(r, j) * e_eig.eigenvectors.col(g);
    return out;
  }

  // Unitary mapping the product eigenbasis to the computational basis.
  Matrix product_basis() const {
    return kron(s_eig.eigenvectors, e_eig.eigenvectors);
  }
};

struct InitialState {
  Vector system_amplitudes;  // c_k over the H_S eigenbasis
  RealVector env_weights;    // d_gg over the H_E eigenbasis
  Matrix rho0;               // materialized rho_S(0) (x) rho_E(0)
};

namespace detail {

inline void check_hermitian_input(const Matrix& m, const char* what, double tol = 1e-10) {
  if (!is_hermitian(m, tol))
    throw Error(std::string(what) + " is not Hermitian within tolerance");
}

inline ModelSpec assemble_model(std::string name, SpacePtr space,
                                std::size_t s_factor_count,
                                Matrix h_s_local, Matrix h_e_local, Matrix h_se_joint,
                                nlohmann::json params) {
  ModelSpec model;
  model.name = std::move(name);
  model.space = std::move(space);
  model.s_factor_count = s_factor_count;
  model.s_dim = h_s_local.rows();
  model.e_dim = h_e_local.rows();
  if (model.s_dim * model.e_dim != model.space->dim())
    throw Error("model: local dimensions do not multiply to the joint dimension");
  check_hermitian_input(h_s_local, "H_S");
  check_hermitian_input(h_e_local, "H_E");
  check_hermitian_input(h_se_joint, "H_SE");

  const Matrix id_s = Matrix::Identity(model.s_dim, model.s_dim);
  const Matrix id_e = Matrix::Identity(model.e_dim, model.e_dim);
  model.h_s = OperatorMatrix(model.space, kron(h_s_local, id_e));
  model.h_e = OperatorMatrix(model.space, kron(id_s, h_e_local));
  model.h_se = OperatorMatrix(model.space, std::move(h_se_joint));
  model.h_s_local = std::move(h_s_local);
  model.h_e_local = std::move(h_e_local);
  model.s_eig = hermitian_eig(model.h_s_local);
  model.e_eig = hermitian_eig(model.h_e_local);
  model.params = std::move(params);

  // Distinct subsystems: the lifted parts must commute.
  if (!is_zero(commutator(model.h_s, model.h_e), 1e-12))
    throw Error("model: [H_S, H_E] != 0");
  return model;
}

}  // namespace detail

inline ModelSpec build_generic(const SpacePtr& space, std::size_t s_factor_count,
                               const Matrix& h_s_local, const Matrix& h_e_local,
                               const Matrix& h_se_joint,
                               std::string name = "generic",
                               nlohmann::json params = nlohmann::json::object()) {
  if (s_factor_count == 0 || s_factor_count >= space->num_factors())
    throw Error("build_generic: joint space needs S factors followed by E factors");
  std::int64_t s_dim = 1, e_dim = 1;
  for (std::size_t f = 0; f < space->num_factors(); ++f)
    (f < s_factor_count ? s_dim : e_dim) *= space->factor_dim(f);
  if (h_s_local.rows() != s_dim || h_e_local.rows() != e_dim)
    throw Error("build_generic: local operator dimensions do not match the space split");
  if (h_se_joint.rows() != space->dim())
    throw Error("build_generic: H_SE must act on the joint space");
  return detail::assemble_model(std::move(name), space, s_factor_count,
                                h_s_local, h_e_local, h_se_joint, std::move(params));
}

// ---------------------------------------------------------------------------
// Impurity in a Bose-Einstein condensate, zero momentum transfer.

enum class BecCouplingVariant {
  Exchange,  // (1/V) sum_{k3,k4} c+_{k3} c_{k4} (x) a+_{k4} a_{k3}
  Density,   // (1/V) sum_k c+_k c_k (x) sum_k' a+_k' a_k'
};

struct ImpurityBecParams {
  int modes = 1;                  // shared fermion/boson mode count
  std::vector<double> eps;        // fermion energies, size == modes
  std::vector<double> e;          // boson kinetic energies, size == modes
  double v_b = 0.0;               // boson-boson strength V_B(0)
  double volume = 1.0;            // normalization V
  int n_max = 8;
  int q = 0;                      // only q = 0 supported
  BecCouplingVariant variant = BecCouplingVariant::Density;
};

inline ModelSpec build_impurity_bec(const ImpurityBecParams& p) {
  if (p.q != 0) throw Error("build_impurity_bec: only q = 0 is supported");
  if (p.n_max < 1) throw Error("build_impurity_bec: n_max must be >= 1");
  if (p.modes < 1) throw Error("build_impurity_bec: need at least one mode");
  if (static_cast<int>(p.eps.size()) != p.modes || static_cast<int>(p.e.size()) != p.modes)
    throw Error("build_impurity_bec: eps/e lists must match mode count");
  if (p.volume == 0.0) throw Error("build_impurity_bec: volume must be nonzero");

  const int K = p.modes;
  std::vector<Factor> factors{Factor::fermion_modes(K)};
  for (int k = 0; k < K; ++k) factors.push_back(Factor::boson_fock(p.n_max));
  auto space = make_space(factors);

  const std::int64_t s_dim = std::int64_t{1} << K;
  std::int64_t e_dim = 1;
  for (int k = 0; k < K; ++k) e_dim *= p.n_max + 1;

  // Fermion sector operators on the S subspace.
  std::vector<Matrix> c_ops, cdag_ops;
  for (int k = 0; k < K; ++k) {
    auto [c, cdag] = fermion_ladder(k, K);
    c_ops.push_back(c);
    cdag_ops.push_back(cdag);
  }
  Matrix h_s_local = Matrix::Zero(s_dim, s_dim);
  for (int k = 0; k < K; ++k) h_s_local += p.eps[k] * cdag_ops[k] * c_ops[k];

  // Boson sector operators on the E subspace (factor k of K Fock factors).
  auto e_space = make_space(std::vector<Factor>(factors.begin() + 1, factors.end()));
  auto [a1, a1dag] = boson_ladder(p.n_max);
  std::vector<Matrix> a_ops, adag_ops;
  for (int k = 0; k < K; ++k) {
    a_ops.push_back(lift(a1, k, e_space).m);
    adag_ops.push_back(lift(a1dag, k, e_space).m);
  }
  Matrix h_e_local = Matrix::Zero(e_dim, e_dim);
  for (int k = 0; k < K; ++k) h_e_local += p.e[k] * adag_ops[k] * a_ops[k];
  if (p.v_b != 0.0) {
    // Quartic term restricted to q = 0: (V_B / 2V) sum_{k1,k2} a+_{k1} a+_{k2} a_{k2} a_{k1}.
    Matrix quartic = Matrix::Zero(e_dim, e_dim);
    for (int k1 = 0; k1 < K; ++k1)
      for (int k2 = 0; k2 < K; ++k2)
        quartic += adag_ops[k1] * adag_ops[k2] * a_ops[k2] * a_ops[k1];
    h_e_local += (p.v_b / (2.0 * p.volume)) * quartic;
  }

  Matrix h_se = Matrix::Zero(space->dim(), space->dim());
  const Matrix id_e = Matrix::Identity(e_dim, e_dim);
  const Matrix id_s = Matrix::Identity(s_dim, s_dim);
  if (p.variant == BecCouplingVariant::Exchange) {
    for (int k3 = 0; k3 < K; ++k3)
      for (int k4 = 0; k4 < K; ++k4) {
        Matrix f_part = cdag_ops[k3] * c_ops[k4];
        Matrix b_part = adag_ops[k4] * a_ops[k3];
        h_se += kron(f_part, b_part);
      }
  } else {
    Matrix n_f = Matrix::Zero(s_dim, s_dim), n_b = Matrix::Zero(e_dim, e_dim);
    for (int k = 0; k < K; ++k) {
      n_f += cdag_ops[k] * c_ops[k];
      n_b += adag_ops[k] * a_ops[k];
    }
    h_se = kron(n_f, n_b);
  }
  h_se /= p.volume;
  // The exchange variant is Hermitian as a whole (k3<->k4 pairs), enforce exactly.
  h_se = 0.5 * (h_se + Matrix(h_se.adjoint())).eval();

  nlohmann::json params = {
      {"modes", K}, {"v_b", p.v_b}, {"volume", p.volume}, {"n_max", p.n_max},
      {"variant", p.variant == BecCouplingVariant::Exchange ? "exchange" : "density"}};
  return detail::assemble_model("impurity-bec-q0", space, 1,
                                std::move(h_s_local), std::move(h_e_local),
                                std::move(h_se), std::move(params));
}

// ---------------------------------------------------------------------------
// Two-level environment with a coupling diagonal in S.

struct TwoLevelLevel {
  double eps = 0.0;       // system eigenvalue
  Complex c = 0.0;        // initial amplitude
  double r12 = 0.0;       // Re <j1|H_SE|j2>
  double i12 = 0.0;       // Im <j1|H_SE|j2>
  double h11 = 0.0;       // <j1|H_SE|j1>
  double h22 = 0.0;       // <j2|H_SE|j2>
};

struct TwoLevelParams {
  std::vector<TwoLevelLevel> levels;
  double e1 = 0.0;
  double e2 = 0.0;
  double d11 = 1.0;
  double d22 = 0.0;
  double c_damp = 0.0;    // phenomenological damping exponent, <= 0

  Matrix coupling_block(std::size_t j) const {
    const auto& l = levels.at(j);
    Matrix b(2, 2);
    b << l.h11, Complex(l.r12, l.i12), Complex(l.r12, -l.i12), l.h22;
    return b;
  }
};

inline ModelSpec build_two_level_env(const TwoLevelParams& p) {
  const std::size_t nu = p.levels.size();
  if (nu == 0) throw Error("build_two_level_env: need at least one system level");
  if (p.d11 < 0 || p.d22 < 0 || std::abs(p.d11 + p.d22 - 1.0) > 1e-10)
    throw Error("build_two_level_env: d weights must form a probability vector");
  auto space = make_space({Factor::levels(static_cast<int>(nu)), Factor::levels(2)});

  Matrix h_s_local = Matrix::Zero(nu, nu);
  Matrix h_e_local(2, 2);
  h_e_local << p.e1, 0, 0, p.e2;
  Matrix h_se = Matrix::Zero(2 * nu, 2 * nu);
  for (std::size_t j = 0; j < nu; ++j) {
    h_s_local(j, j) = p.levels[j].eps;
    h_se.block<2, 2>(2 * j, 2 * j) = p.coupling_block(j);
  }

  nlohmann::json params = {{"e1", p.e1}, {"e2", p.e2}, {"d11", p.d11}, {"d22", p.d22},
                           {"c_damp", p.c_damp}, {"nu", nu}};
  ModelSpec model = detail::assemble_model("two-level-env", space, 1,
                                           std::move(h_s_local), std::move(h_e_local),
                                           std::move(h_se), std::move(params));
  if (!is_zero(commutator(model.h_s, model.h_se), 1e-10))
    throw Error("build_two_level_env: H_SE does not commute with H_S");
  return model;
}

// ---------------------------------------------------------------------------
// Electron-phonon coupling in the phonon zero mode.

struct ElectronPhononParams {
  int nu = 1;                 // electron state count
  std::vector<double> eps;    // electron energies, size == nu
  double omega0 = 1.0;        // phonon frequency, > 0
  double v0 = 0.0;            // coupling V_{ph-e}(0)
  int n_max = 8;              // Fock truncation, >= 2
  int n0 = 0;                 // initial phonon number (analytic matrix elements)
  int n0p = 0;                // final phonon number
};

inline ModelSpec build_electron_phonon_q0(const ElectronPhononParams& p) {
  if (p.nu < 1) throw Error("build_electron_phonon_q0: nu must be >= 1");
  if (p.omega0 <= 0) throw Error("build_electron_phonon_q0: omega0 must be > 0");
  if (p.n_max < 2) throw Error("build_electron_phonon_q0: n_max must be >= 2");
  if (static_cast<int>(p.eps.size()) != p.nu)
    throw Error("build_electron_phonon_q0: eps list must have nu entries");

  auto space = make_space({Factor::fermion_modes(p.nu), Factor::boson_fock(p.n_max)});
  const std::int64_t s_dim = std::int64_t{1} << p.nu;

  Matrix n_e = Matrix::Zero(s_dim, s_dim);
  Matrix h_s_local = Matrix::Zero(s_dim, s_dim);
  for (int k = 0; k < p.nu; ++k) {
    auto [c, cdag] = fermion_ladder(k, p.nu);
    Matrix nk = cdag * c;
    h_s_local += p.eps[k] * nk;
    n_e += nk;
  }
  auto [a, adag] = boson_ladder(p.n_max);
  Matrix h_e_local = p.omega0 * (adag * a);
  Matrix h_se = p.v0 * kron(n_e, Matrix(adag + a));

  nlohmann::json params = {{"nu", p.nu}, {"omega0", p.omega0}, {"v0", p.v0},
                           {"n_max", p.n_max}, {"n0", p.n0}, {"n0p", p.n0p}};
  return detail::assemble_model("electron-phonon-q0", space, 1,
                                std::move(h_s_local), std::move(h_e_local),
                                std::move(h_se), std::move(params));
}

// ---------------------------------------------------------------------------

inline InitialState initial_state(const ModelSpec& model, const Vector& c,
                                  const RealVector& d) {
  if (c.size() != model.s_dim) throw Error("initial_state: amplitude count != s_dim");
  if (d.size() != model.e_dim) throw Error("initial_state: weight count != e_dim");
  const double cnorm = c.squaredNorm();
  if (std::abs(cnorm - 1.0) > 1e-10)
    throw Error("initial_state: system amplitudes are not normalized");
  double dsum = 0.0;
  for (Eigen::Index g = 0; g < d.size(); ++g) {
    if (d(g) < 0) throw Error("initial_state: negative environment weight");
    dsum += d(g);
  }
  if (std::abs(dsum - 1.0) > 1e-10)
    throw Error("initial_state: environment weights do not sum to 1");

  const Vector psi = model.s_eig.eigenvectors * c;
  const Matrix rho_s = psi * psi.adjoint();
  const Matrix rho_e = model.e_eig.eigenvectors * d.cast<Complex>().asDiagonal() *
                       model.e_eig.eigenvectors.adjoint();
  InitialState state;
  state.system_amplitudes = c;
  state.env_weights = d;
  state.rho0 = kron(rho_s, rho_e);
  return state;
}

inline CommutationClass classify_commutation(const ModelSpec& model, double tol = 1e-12) {
  CommutationClass cls;
  cls.tolerance = tol;
  cls.case_a = is_zero(commutator(model.h_e, model.h_se), tol);
  cls.case_b = is_zero(commutator(model.h_s, model.h_se), tol);
  return cls;
}

// Measured commutator norms, for reporting rather than thresholding.
inline std::pair<double, double> commutator_norms(const ModelSpec& model) {
  return {commutator(model.h_e, model.h_se).max_abs(),
          commutator(model.h_s, model.h_se).max_abs()};
}

}  // namespace exlab
