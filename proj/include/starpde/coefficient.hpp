#pragma once

#include <optional>
#include <string>

#include "starpde/expression.hpp"

namespace starpde {

/// A problem coefficient: a parsed expression (or named built-in expanded to
/// one) tagged with its slot. Immutable after construction; evaluation is
/// reentrant and thread-safe.
class Coefficient {
 public:
  Coefficient() = default;

  /// Parses `text` for the given slot. Recognizes the built-in names
  /// "zero", "one" and, for vertex conditions, "kirchhoff" (sum of fluxes).
  static Coefficient parse(const std::string& text, CoeffKind kind, int num_edges = 1);

  CoeffKind kind() const { return expr_.kind(); }
  std::string print() const { return expr_.print(); }
  const Expression& expr() const { return expr_; }

  double eval(const EvalPoint& pt) const { return expr_.eval(pt); }

  // Typed helpers for the common slots.
  double sigma(double x, double p) const;
  ValueGrad sigma_grad(double x, double p) const;  // dp tangent
  double ham(double x, double u, double p) const;
  ValueGrad ham_grad(double x, double u, double p) const;  // du, dp tangents
  double vertex(double u, std::span<const double> flux) const;
  double initial(double x) const;
  double outer(double t) const;
  double forcing(double t, double x) const;

 private:
  explicit Coefficient(Expression e) : expr_(std::move(e)) {}
  Expression expr_;
};

/// Expands a built-in name to its expression text, or nullopt if `text`
/// is not a built-in for this kind.
std::optional<std::string> builtin_expansion(const std::string& text, CoeffKind kind,
                                             int num_edges);

}  // namespace starpde
