#pragma once

// Finite-dimensional Hilbert spaces assembled from factor subspaces, plus the
// dense operator algebra built on top of them (tensor lifts, ladder operators,
// commutators).  Basis ordering is row-major over factors: the first declared
// factor is the slowest index.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace exlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

enum class FactorType { Levels, BosonFock, FermionModes };

struct Factor {
  FactorType type;
  // Levels: number of levels (>= 1).
  // BosonFock: truncation level n_max (>= 0), dimension n_max + 1.
  // FermionModes: mode count m (>= 1), dimension 2^m.
  int param;

  static Factor levels(int n) { return {FactorType::Levels, n}; }
  static Factor boson_fock(int n_max) { return {FactorType::BosonFock, n_max}; }
  static Factor fermion_modes(int m) { return {FactorType::FermionModes, m}; }

  std::int64_t dim() const {
    switch (type) {
      case FactorType::Levels:
        if (param < 1) throw Error("Levels factor needs n >= 1");
        return param;
      case FactorType::BosonFock:
        if (param < 0) throw Error("BosonFock factor needs n_max >= 0");
        return static_cast<std::int64_t>(param) + 1;
      case FactorType::FermionModes:
        if (param < 1 || param > 62) throw Error("FermionModes factor needs 1 <= m <= 62");
        return std::int64_t{1} << param;
    }
    throw Error("unknown factor type");
  }
};

class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw Error("HilbertSpace needs at least one factor");
    dim_ = 1;
    for (const auto& f : factors_) {
      const std::int64_t fd = f.dim();
      if (fd <= 0 || dim_ > std::numeric_limits<std::int64_t>::max() / fd)
        throw Error("HilbertSpace dimension overflow");
      dim_ *= fd;
    }
    if (dim_ == 0) throw Error("HilbertSpace dimension is zero");
  }

  const std::vector<Factor>& factors() const { return factors_; }
  std::int64_t dim() const { return dim_; }
  std::size_t num_factors() const { return factors_.size(); }

  std::int64_t factor_dim(std::size_t f) const {
    check_factor(f);
    return factors_[f].dim();
  }

  // Product of dimensions of the factors before / after factor f.
  std::int64_t dim_before(std::size_t f) const {
    check_factor(f);
    std::int64_t d = 1;
    for (std::size_t i = 0; i < f; ++i) d *= factors_[i].dim();
    return d;
  }
  std::int64_t dim_after(std::size_t f) const {
    check_factor(f);
    std::int64_t d = 1;
    for (std::size_t i = f + 1; i < factors_.size(); ++i) d *= factors_[i].dim();
    return d;
  }

  bool operator==(const HilbertSpace& other) const {
    if (dim_ != other.dim_ || factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (factors_[i].type != other.factors_[i].type || factors_[i].param != other.factors_[i].param)
        return false;
    return true;
  }

 private:
  void check_factor(std::size_t f) const {
    if (f >= factors_.size()) throw Error("factor index out of range");
  }
  std::vector<Factor> factors_;
  std::int64_t dim_ = 0;
};

using SpacePtr = std::shared_ptr<const HilbertSpace>;

inline SpacePtr make_space(std::vector<Factor> factors) {
  return std::make_shared<const HilbertSpace>(std::move(factors));
}

// Dense complex operator bound to a space.  `scale` records the entry
// magnitude of the inputs an operator was derived from; is_zero() tests
// against it so that "zero" stays meaningful after products of large inputs.
struct OperatorMatrix {
  SpacePtr space;
  Matrix m;
  double scale = 1.0;

  OperatorMatrix() = default;
  OperatorMatrix(SpacePtr s, Matrix mat, double sc = 1.0)
      : space(std::move(s)), m(std::move(mat)), scale(sc) {
    if (!space) throw Error("OperatorMatrix needs a space");
    if (m.rows() != m.cols() || m.rows() != space->dim())
      throw Error("OperatorMatrix shape does not match space dimension");
  }

  std::int64_t dim() const { return m.rows(); }
  double max_abs() const { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
};

inline void require_same_space(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (!a.space || !b.space || !(*a.space == *b.space))
    throw Error("operators live on different spaces");
}

inline OperatorMatrix identity_on(const SpacePtr& space) {
  return {space, Matrix::Identity(space->dim(), space->dim())};
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double tol = 1e-12) {
  const double scale = std::max(1.0, max_abs(m));
  return max_abs(Matrix(m - m.adjoint())) <= tol * scale;
}

// Kronecker product; the left operand is the slower index.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Embed a single-factor operator as identity (x) ... (x) op (x) ... (x) identity.
inline OperatorMatrix lift(const Matrix& op, std::size_t factor, const SpacePtr& space) {
  const std::int64_t fd = space->factor_dim(factor);
  if (op.rows() != op.cols() || op.rows() != fd)
    throw Error("lift: operator side does not match factor dimension");
  const std::int64_t before = space->dim_before(factor);
  const std::int64_t after = space->dim_after(factor);
  Matrix out = kron(kron(Matrix::Identity(before, before), op),
                    Matrix::Identity(after, after));
  return {space, std::move(out), std::max(1.0, max_abs(op))};
}

// Truncated boson ladder pair (annihilate, create) on a Fock space cut at
// n_max: a|n> = sqrt(n)|n-1>, a+|n> = sqrt(n+1)|n+1> for n < n_max, a+|n_max> = 0.
inline std::pair<Matrix, Matrix> boson_ladder(int n_max) {
  if (n_max < 0) throw Error("boson_ladder: n_max must be >= 0");
  const int d = n_max + 1;
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {a, a.adjoint()};
}

// Jordan-Wigner ladder pair for mode `mode` out of m modes, sign strings
// ordered by mode index ascending (mode 0 is the slowest basis index).
inline std::pair<Matrix, Matrix> fermion_ladder(int mode, int m) {
  if (m < 1) throw Error("fermion_ladder: need m >= 1");
  if (mode < 0 || mode >= m) throw Error("fermion_ladder: mode out of range");
  Matrix sigma_minus(2, 2), sigma_z(2, 2), id2 = Matrix::Identity(2, 2);
  sigma_minus << 0, 1, 0, 0;
  sigma_z << 1, 0, 0, -1;
  Matrix c = Matrix::Identity(1, 1);
  for (int j = 0; j < m; ++j) {
    if (j < mode)
      c = kron(c, sigma_z);
    else if (j == mode)
      c = kron(c, sigma_minus);
    else
      c = kron(c, id2);
  }
  return {c, c.adjoint()};
}

// Basis index of a fermion occupation pattern (occ[0] is mode 0).
inline std::int64_t fermion_basis_index(const std::vector<int>& occ) {
  std::int64_t idx = 0;
  for (int b : occ) {
    if (b != 0 && b != 1) throw Error("occupation must be 0 or 1");
    idx = idx * 2 + b;
  }
  return idx;
}

inline OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_space(a, b);
  OperatorMatrix out(a.space, a.m * b.m - b.m * a.m);
  out.scale = std::max(1.0, a.max_abs() * b.max_abs());
  return out;
}

inline OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_space(a, b);
  OperatorMatrix out(a.space, a.m * b.m + b.m * a.m);
  out.scale = std::max(1.0, a.max_abs() * b.max_abs());
  return out;
}

inline bool is_zero(const OperatorMatrix& a, double tol) {
  if (tol < 0) throw Error("is_zero: tol must be >= 0");
  return a.max_abs() <= tol * std::max(1.0, a.scale);
}

}  // namespace exlab
