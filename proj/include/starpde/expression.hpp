#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace starpde {

/// Which slot an expression fills; determines the variables it may reference.
enum class CoeffKind {
  Sigma,            // sigma(x, p)
  Hamiltonian,      // H(x, u, p)
  VertexCondition,  // F(u, p1..pI)
  Initial,          // g(x), per edge
  OuterBoundary,    // phi(t), per edge
  Forcing,          // f(t, x), per edge
  BoundOfU,         // envelope bound function of u (mu, gamma, epsilon)
  BoundOfUP,        // envelope bound function of (u, p)  (P)
  Reference,        // closed-form reference solution r(t, x)
};

const char* coeff_kind_name(CoeffKind kind);

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Point at which an expression is evaluated. Unused slots stay at zero.
struct EvalPoint {
  double x = 0.0;
  double t = 0.0;
  double u = 0.0;
  double p = 0.0;
  std::span<const double> p_vec{};  // vertex-condition flux vector
};

/// Value together with the tangents d/du and d/dp, propagated forward.
struct ValueGrad {
  double value = 0.0;
  double du = 0.0;
  double dp = 0.0;
};

/// A parsed arithmetic expression over the coefficient grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' factor)?
///   base   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')' | '-' base
/// Functions: exp ln sin cos cosh sinh tanh abs sqrt (unary), min max (binary).
/// Immutable after parse; evaluation is reentrant.
class Expression {
 public:
  Expression() = default;  // empty; evaluation requires a parsed expression

  static Expression parse(std::string_view text, CoeffKind kind, int num_edges = 1);

  double eval(const EvalPoint& pt) const;
  ValueGrad eval_grad(const EvalPoint& pt) const;

  /// Canonical text form; parse(print()) reproduces the same tree.
  std::string print() const;

  CoeffKind kind() const { return kind_; }
  int num_edges() const { return num_edges_; }

  /// True when the expression is a literal constant (used for fast paths).
  bool is_constant() const;
  double constant_value() const;

 private:
  enum class NodeKind : std::uint8_t { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

  // Variable ids: 0=x, 1=t, 2=u, 3=p, 4+i = p_{i+1}.
  struct Node {
    NodeKind kind;
    std::uint8_t func = 0;  // function id for Call
    std::int32_t a = -1;    // children / variable id
    std::int32_t b = -1;
    double value = 0.0;  // literal payload
  };

  double eval_node(std::int32_t idx, const EvalPoint& pt) const;
  void print_node(std::int32_t idx, std::string& out) const;

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
  CoeffKind kind_ = CoeffKind::Sigma;
  int num_edges_ = 1;

  friend class ExprParser;
  template <typename D>
  friend D grad_eval_node(const Expression& e, std::int32_t idx, const EvalPoint& pt);
};

}  // namespace starpde
