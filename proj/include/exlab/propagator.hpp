#pragma once

// Exact time evolution.  Hermitian generators go through a spectral
// factorization so that many evaluation times share one diagonalization;
// general matrices go through scaling-and-squaring.  The two routes are
// cross-checked in the test suite.

#include <cmath>

#include "exlab/hilbert.hpp"

namespace exlab {

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, columns
};

inline SpectralDecomposition hermitian_eig(const Matrix& h, double tol = 1e-10) {
  if (!is_hermitian(h, tol)) throw Error("hermitian_eig: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw Error("hermitian_eig: solver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline SpectralDecomposition hermitian_eig(const OperatorMatrix& h, double tol = 1e-10) {
  return hermitian_eig(h.m, tol);
}

// exp(phase * H) from a precomputed spectral factorization.
inline Matrix spectral_exp(const SpectralDecomposition& sd, Complex phase) {
  Vector d(sd.eigenvalues.size());
  for (Eigen::Index k = 0; k < d.size(); ++k)
    d(k) = std::exp(phase * sd.eigenvalues(k));
  return sd.eigenvectors * d.asDiagonal() * sd.eigenvectors.adjoint();
}

// U(t) = exp(-i H t) for Hermitian H.
inline Matrix evolution(const SpectralDecomposition& sd, double t) {
  return spectral_exp(sd, Complex(0.0, -t));
}

inline Matrix evolution(const Matrix& h, double t) {
  return evolution(hermitian_eig(h), t);
}

inline OperatorMatrix evolution(const OperatorMatrix& h, double t) {
  return {h.space, evolution(h.m, t)};
}

// General matrix exponential, scaling-and-squaring with a [13/13] Pade
// approximant.  Relative error <= 1e-10 for ||A|| up to ~10.
inline Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("expm: matrix must be square");
  const Eigen::Index n = a.rows();
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  if (!std::isfinite(norm)) throw Error("expm: non-finite input");
  constexpr double theta13 = 5.371920351148152;
  int squarings = 0;
  Matrix as = a;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    if (squarings > 60) throw Error("expm: input norm too large");
    as /= std::pow(2.0, squarings);
  }
  static const double b[14] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  Matrix u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                   b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
             b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

inline OperatorMatrix expm(const OperatorMatrix& a) {
  return {a.space, expm(a.m)};
}

// Counting-field conjugated evolution: U_eta(t) = e^{+i eta H_E} U(t) e^{-i eta H_E}.
inline Matrix eta_shifted_evolution(const SpectralDecomposition& h_total,
                                    const SpectralDecomposition& h_env,
                                    double eta, double t) {
  const Matrix u = evolution(h_total, t);
  if (eta == 0.0) return u;
  return spectral_exp(h_env, Complex(0.0, eta)) * u * spectral_exp(h_env, Complex(0.0, -eta));
}

inline Matrix eta_shifted_evolution(const Matrix& h_total, const Matrix& h_env,
                                    double eta, double t) {
  return eta_shifted_evolution(hermitian_eig(h_total), hermitian_eig(h_env), eta, t);
}

inline Matrix propagate_density(const Matrix& rho0, const Matrix& u) {
  if (rho0.rows() != u.rows() || rho0.cols() != u.cols() || rho0.rows() != rho0.cols())
    throw Error("propagate_density: shape mismatch");
  return u * rho0 * u.adjoint();
}

}  // namespace exlab
