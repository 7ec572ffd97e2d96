#pragma once

// Closed-form evaluators for the two worked case-(b) examples: the two-level
// environment and the electron-phonon zero mode.
//
// Two-level conventions: the coefficient bundle a/b is obtained by
// exponentiating a 2x2 Hermitian block.  The Delta_E / V_E evaluators feed in
// the environment-plus-coupling block diag(E1,E2) + B_j, which makes the
// closed forms exact at c_damp = 0 for any model of this family; the
// phenomenological damping exponent c_damp has no finite-dimensional
// realization and only scales the closed forms.

#include <cmath>
#include <vector>

#include "exlab/cumulant.hpp"
#include "exlab/model.hpp"
#include "exlab/propagator.hpp"

namespace exlab {

// Real/imaginary parts of the e^{-+ i M t} matrix elements of a 2x2 block,
// plus the assembled exponentials they came from.
struct AppendixACoefficients {
  double a11 = 1.0;  // Re <1|e^{-iMt}|1>
  double a22 = 1.0;  // Re <2|e^{+iMt}|2>
  double a12 = 0.0;  // Re <1|e^{+iMt}|2>
  double a21 = 0.0;  // Re <2|e^{-iMt}|1>
  double b12 = 0.0;  // Im <1|e^{+iMt}|2>
  double b21 = 0.0;  // Im <2|e^{-iMt}|1>
  Matrix u_minus;    // e^{-iMt}
  Matrix u_plus;     // e^{+iMt}
};

inline AppendixACoefficients appendix_a_coefficients(const Matrix& block, double t) {
  if (block.rows() != 2 || block.cols() != 2)
    throw Error("appendix_a_coefficients: block must be 2x2");
  if (!is_hermitian(block, 1e-10))
    throw Error("appendix_a_coefficients: block must be Hermitian");
  AppendixACoefficients out;
  out.u_minus = evolution(block, t);
  out.u_plus = out.u_minus.adjoint();
  out.a11 = out.u_minus(0, 0).real();
  out.a22 = out.u_plus(1, 1).real();
  out.a12 = out.u_plus(0, 1).real();
  out.a21 = out.u_minus(1, 0).real();
  out.b12 = out.u_plus(0, 1).imag();
  out.b21 = out.u_minus(1, 0).imag();
  return out;
}

inline AppendixACoefficients appendix_a_coefficients(const TwoLevelParams& params,
                                                     std::size_t j, double t) {
  if (j >= params.levels.size()) throw Error("appendix_a_coefficients: bad level index");
  return appendix_a_coefficients(params.coupling_block(j), t);
}

namespace detail {

inline Matrix two_level_effective_block(const TwoLevelParams& p, std::size_t j) {
  Matrix env(2, 2);
  env << p.e1, 0, 0, p.e2;
  return env + p.coupling_block(j);
}

}  // namespace detail

// Delta_E(t) = e^{c t^2} Delta_12 sum_j |c_j|^2 (d22 - d11) [a12_j^2 + b12_j^2].
inline double two_level_delta_e(const TwoLevelParams& p, double t) {
  const double delta12 = p.e1 - p.e2;
  double sum = 0.0;
  for (std::size_t j = 0; j < p.levels.size(); ++j) {
    const auto coeff = appendix_a_coefficients(detail::two_level_effective_block(p, j), t);
    sum += std::norm(p.levels[j].c) * (p.d22 - p.d11) *
           (coeff.a12 * coeff.a12 + coeff.b12 * coeff.b12);
  }
  return std::exp(p.c_damp * t * t) * delta12 * sum;
}

// V_E(t) = 2 e^{c t^2} Delta_12 sum_j |c_j|^2
//          [ I12_j Re<2|Omega_j(t)|1> + R12_j Im<2|Omega_j(t)|1> ]
// with Omega_j(t) = U_j rho_E U_j+ assembled from the coefficient bundle.
inline double two_level_speed(const TwoLevelParams& p, double t) {
  const double delta12 = p.e1 - p.e2;
  Matrix rho_e(2, 2);
  rho_e << p.d11, 0, 0, p.d22;
  double sum = 0.0;
  for (std::size_t j = 0; j < p.levels.size(); ++j) {
    const auto coeff = appendix_a_coefficients(detail::two_level_effective_block(p, j), t);
    const Matrix omega = coeff.u_minus * rho_e * coeff.u_minus.adjoint();
    const Complex omega21 = omega(1, 0);
    sum += std::norm(p.levels[j].c) *
           (p.levels[j].i12 * omega21.real() + p.levels[j].r12 * omega21.imag());
  }
  return 2.0 * std::exp(p.c_damp * t * t) * delta12 * sum;
}

// Numeric counterpart: the equivalent ModelSpec plus the initial state with
// amplitudes/weights mapped through the sorted eigenbases.
inline InitialState two_level_initial_state(const ModelSpec& model, const TwoLevelParams& p) {
  const std::int64_t nu = model.s_dim;
  Vector c(nu);
  for (std::int64_t col = 0; col < nu; ++col) {
    // eigenvector columns of a diagonal H_S are (signed) unit vectors
    Eigen::Index orig;
    model.s_eig.eigenvectors.col(col).cwiseAbs().maxCoeff(&orig);
    c(col) = std::conj(model.s_eig.eigenvectors(orig, col)) * p.levels[orig].c;
  }
  RealVector d(2);
  for (Eigen::Index col = 0; col < 2; ++col) {
    Eigen::Index orig;
    model.e_eig.eigenvectors.col(col).cwiseAbs().maxCoeff(&orig);
    d(col) = (orig == 0) ? p.d11 : p.d22;
  }
  return initial_state(model, c, d);
}

// ---------------------------------------------------------------------------
// Electron-phonon zero mode.

namespace detail {

// (1 - cos x) / x^2, series below the guard threshold.
inline double one_minus_cos_over_x2(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 0.5 - x2 / 24.0 + x2 * x2 / 720.0;
  }
  return (1.0 - std::cos(x)) / (x * x);
}

}  // namespace detail

struct AlphaZetaPsi {
  double alpha = 0.0;
  double zeta = 0.0;
  double psi = 0.0;
};

inline double zeta_direct(const ElectronPhononParams& p, double t) {
  const double g = p.nu * p.v0;
  if (g == 0.0) throw Error("zeta_direct: nu*V0 = 0 has no direct form");
  return p.omega0 * (1.0 - std::cos(g * t)) / g;
}

// Third-order series in x = nu*V0*t, finite at zero coupling.
inline double zeta_series(const ElectronPhononParams& p, double t) {
  const double g = p.nu * p.v0;
  const double x = g * t;
  const double x2 = x * x;
  return p.omega0 * g * t * t * (0.5 - x2 / 24.0 + x2 * x2 / 720.0);
}

inline AlphaZetaPsi alpha_zeta_psi(const ElectronPhononParams& p, double t) {
  if (p.omega0 <= 0) throw Error("alpha_zeta_psi: omega0 must be > 0");
  const double g = p.nu * p.v0;
  AlphaZetaPsi out;
  out.alpha = g * std::sin(p.omega0 * t) / p.omega0;
  const double x = g * t;
  const double gfac = detail::one_minus_cos_over_x2(x);  // (1-cos x)/x^2
  out.zeta = p.omega0 * g * t * t * gfac;
  const double s = std::sin(p.omega0 * t);
  out.psi = -0.5 * (g * g * s * s / (p.omega0 * p.omega0) +
                    p.omega0 * p.omega0 * g * g * t * t * t * t * gfac * gfac);
  return out;
}

// <n0| e^{-i (omega0 a+a + nu V0 (a+ + a)) t} |n0p>, truncated-Fock evaluation
// with an automatic truncation-convergence check, times the free electron
// phase e^{-i eps_k t} for the first electron state.
inline Complex electron_phonon_matrix_element(const ElectronPhononParams& p, double t) {
  if (p.n_max < std::max(p.n0, p.n0p)) throw Error("electron_phonon_matrix_element: n_max too small");
  const double g = p.nu * p.v0;
  auto element = [&](int n_max) {
    auto [a, adag] = boson_ladder(n_max);
    const Matrix h_eff = p.omega0 * (adag * a) + g * Matrix(adag + a);
    const Matrix u = evolution(h_eff, t);
    return u(p.n0, p.n0p);
  };
  const Complex val = element(p.n_max);
  const Complex check = element(p.n_max + 5);
  if (std::abs(val - check) > 1e-8)
    throw Error("electron_phonon_matrix_element: Fock truncation not converged, raise n_max");
  const double eps_k = p.eps.empty() ? 0.0 : p.eps.front();
  return std::exp(Complex(0.0, -eps_k * t)) * val;
}

// Series evaluation of the same element through the alpha/zeta/Psi functions
// and the double factorial sum (with the factorial reading of the printed
// squared denominators).  Kept as a reporting path: it is compared against
// the truncated-Fock element, never silently trusted.
inline Complex electron_phonon_matrix_element_series(const ElectronPhononParams& p, double t) {
  const auto fns = alpha_zeta_psi(p, t);
  const auto fact = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  double f_sum_re = 0.0, f_sum_im = 0.0;
  for (int n3 = 0; n3 <= p.n_max; ++n3) {
    for (int n2 = 0; n2 <= std::min(p.n0, n3); ++n2) {
      for (int n4 = 0; n4 <= std::min(n3, p.n0p); ++n4) {
        const Complex phase = std::pow(Complex(0.0, -1.0), p.n0 + n3) *
                              std::pow(-1.0, p.n0p + n2 - n4);
        const double numer = fact(p.n0) * fact(p.n0p) *
                             fact(n2) * fact(n2) * fact(n3) * fact(n3) *
                             std::pow(fns.alpha, p.n0 + n3 - 2 * n2) *
                             std::pow(fns.zeta, p.n0p + n3 - 2 * n4);
        const double denom = fact(n2) * fact(n2) * fact(n4) * fact(n4) *
                             fact(p.n0 - n2) * fact(n3 - n4) *
                             fact(n3 - n2) * fact(p.n0p - n4);
        const Complex term = phase * (numer / denom) * std::exp(fns.psi);
        f_sum_re += term.real();
        f_sum_im += term.imag();
      }
    }
  }
  const double norm = 2.0 * M_PI * std::sqrt(fact(p.n0) * fact(p.n0p));
  const double eps_k = p.eps.empty() ? 0.0 : p.eps.front();
  const Complex prefactor = std::exp(Complex(0.0, -eps_k * t)) *
                            std::exp(Complex(0.0, -p.omega0 * p.n0 * t)) / norm;
  return prefactor * Complex(f_sum_re, f_sum_im);
}

struct SeriesComparison {
  double t = 0.0;
  Complex numeric;
  Complex series;
  double abs_diff = 0.0;
};

inline std::vector<SeriesComparison> electron_phonon_series_report(
    const ElectronPhononParams& p, const std::vector<double>& times) {
  std::vector<SeriesComparison> out;
  out.reserve(times.size());
  for (double t : times) {
    SeriesComparison rec;
    rec.t = t;
    rec.numeric = electron_phonon_matrix_element(p, t);
    rec.series = electron_phonon_matrix_element_series(p, t);
    rec.abs_diff = std::abs(rec.numeric - rec.series);
    out.push_back(rec);
  }
  return out;
}

// Delta_E / V_E series on the built electron-phonon model through the generic
// engine.
inline TimeSeries electron_phonon_exchange(const ElectronPhononParams& p,
                                           const Vector& c, const RealVector& d,
                                           const std::vector<double>& t_grid,
                                           const CumulantConfig& cfg = {}) {
  const ModelSpec model = build_electron_phonon_q0(p);
  const InitialState state = initial_state(model, c, d);
  return sweep(model, state, t_grid, cfg);
}

}  // namespace exlab
