#pragma once

// Exponential splitting: e^{X+Y} = e^X e^Y e^{-c2/2!} e^{-c3/3!} e^{-c4/4!} ...
// with nested-commutator exponents, the scalar-commutator
// (Baker-Campbell-Hausdorff) special case, and the exact case-(b)
// factorization of the electron-phonon propagator.
//
//   c2 = [X,Y]
//   c3 = 2[[X,Y],Y] + [[X,Y],X]
//   c4 = [[[X,Y],X],X] + 3[[[X,Y],X],Y] + 3[[[X,Y],Y],Y]
//
// Truncation after the c_k factor leaves an error of order k+1 in the
// small-parameter regime.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "exlab/cumulant.hpp"
#include "exlab/hilbert.hpp"
#include "exlab/propagator.hpp"

namespace exlab {

// A nested bracket expression over the letters X and Y with an integer
// coefficient, e.g. 3 * [[[X,Y],X],Y].
struct CommutatorWord {
  struct Node {
    enum class Kind { X, Y, Bracket } kind;
    std::shared_ptr<const Node> left;   // set for Bracket
    std::shared_ptr<const Node> right;

    static std::shared_ptr<const Node> x() {
      return std::make_shared<Node>(Node{Kind::X, nullptr, nullptr});
    }
    static std::shared_ptr<const Node> y() {
      return std::make_shared<Node>(Node{Kind::Y, nullptr, nullptr});
    }
    static std::shared_ptr<const Node> bracket(std::shared_ptr<const Node> l,
                                               std::shared_ptr<const Node> r) {
      return std::make_shared<Node>(Node{Kind::Bracket, std::move(l), std::move(r)});
    }
  };

  int coefficient = 1;
  std::shared_ptr<const Node> root;

  int order() const { return order_of(root.get()); }

  std::string to_string() const {
    std::string s = render(root.get());
    if (coefficient == 1) return s;
    return std::to_string(coefficient) + s;
  }

 private:
  static int order_of(const Node* n) {
    if (!n) return 0;
    if (n->kind != Node::Kind::Bracket) return 1;
    return order_of(n->left.get()) + order_of(n->right.get());
  }
  static std::string render(const Node* n) {
    switch (n->kind) {
      case Node::Kind::X: return "X";
      case Node::Kind::Y: return "Y";
      case Node::Kind::Bracket:
        return "[" + render(n->left.get()) + "," + render(n->right.get()) + "]";
    }
    return "?";
  }
};

struct ZassenhausExpansion {
  int max_order = 2;
  // terms[i] holds the word sum for c_{i+2}.
  std::vector<std::vector<CommutatorWord>> terms;
};

inline ZassenhausExpansion zassenhaus_terms(int max_order) {
  if (max_order < 2 || max_order > 4)
    throw Error("zassenhaus_terms: supported orders are 2..4");
  using N = CommutatorWord::Node;
  const auto x = N::x();
  const auto y = N::y();
  const auto xy = N::bracket(x, y);

  ZassenhausExpansion exp;
  exp.max_order = max_order;
  exp.terms.push_back({{1, xy}});
  if (max_order >= 3)
    exp.terms.push_back({{2, N::bracket(xy, y)}, {1, N::bracket(xy, x)}});
  if (max_order >= 4)
    exp.terms.push_back({{1, N::bracket(N::bracket(xy, x), x)},
                         {3, N::bracket(N::bracket(xy, x), y)},
                         {3, N::bracket(N::bracket(xy, y), y)}});
  return exp;
}

namespace detail {

inline Matrix evaluate_node(const CommutatorWord::Node* n, const Matrix& x, const Matrix& y) {
  switch (n->kind) {
    case CommutatorWord::Node::Kind::X: return x;
    case CommutatorWord::Node::Kind::Y: return y;
    case CommutatorWord::Node::Kind::Bracket: {
      const Matrix l = evaluate_node(n->left.get(), x, y);
      const Matrix r = evaluate_node(n->right.get(), x, y);
      return l * r - r * l;
    }
  }
  throw Error("evaluate_word: malformed word");
}

}  // namespace detail

inline Matrix evaluate_word(const CommutatorWord& word, const Matrix& x, const Matrix& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw Error("evaluate_word: operand shape mismatch");
  return static_cast<double>(word.coefficient) * detail::evaluate_node(word.root.get(), x, y);
}

inline Matrix evaluate_word_sum(const std::vector<CommutatorWord>& words,
                                const Matrix& x, const Matrix& y) {
  Matrix sum = Matrix::Zero(x.rows(), x.cols());
  for (const auto& w : words) sum += evaluate_word(w, x, y);
  return sum;
}

// [X,Y] = kappa * I detection; returns kappa when the commutator is a scalar.
inline std::optional<Complex> scalar_commutator(const Matrix& x, const Matrix& y,
                                                double tol = 1e-10) {
  const Matrix k = x * y - y * x;
  const Complex kappa = k(0, 0);
  const Matrix residue = k - kappa * Matrix::Identity(k.rows(), k.cols());
  const double scale = std::max(1.0, max_abs(x) * max_abs(y));
  if (max_abs(residue) <= tol * scale) return kappa;
  return std::nullopt;
}

// Truncated product e^X e^Y e^{-c2/2!} ... e^{-c_k/k!} for k = max_order.
// When [X,Y] is detected as a scalar kappa the closed BCH form
// e^X e^Y e^{-kappa/2} is returned instead (and the generic product agrees).
inline Matrix zassenhaus_apply(const Matrix& x, const Matrix& y, int max_order) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols())
    throw Error("zassenhaus_apply: operand shape mismatch");
  if (const auto kappa = scalar_commutator(x, y))
    return std::exp(-*kappa / 2.0) * (expm(x) * expm(y));
  const auto exp_terms = zassenhaus_terms(max_order);
  Matrix product = expm(x) * expm(y);
  double factorial = 1.0;
  for (int n = 2; n <= max_order; ++n) {
    factorial *= n;
    const Matrix cn = evaluate_word_sum(exp_terms.terms[n - 2], x, y);
    product = product * expm(Matrix(-cn / factorial));
  }
  return product;
}

// BCH closed form with an explicitly supplied scalar commutator value.
inline Matrix bch_scalar_apply(const Matrix& x, const Matrix& y, Complex kappa) {
  return std::exp(-kappa / 2.0) * (expm(x) * expm(y));
}

// e^{-iHt} = e^{-iH_S t} e^{-i(H_E + H_SE)t}; exact for case (b) since
// [H_S, H_E + H_SE] = 0.
inline Matrix electron_phonon_factorization(const ModelSpec& model, double t) {
  if (!classify_commutation(model, 1e-10).case_b)
    throw Error("electron_phonon_factorization: model is not case (b)");
  const Matrix left = evolution(model.h_s.m, t);
  const Matrix right = evolution(Matrix(model.h_e.m + model.h_se.m), t);
  return left * right;
}

}  // namespace exlab
