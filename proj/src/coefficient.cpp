#include "starpde/coefficient.hpp"

namespace starpde {

std::optional<std::string> builtin_expansion(const std::string& text, CoeffKind kind,
                                             int num_edges) {
  if (text == "zero") return std::string("0");
  if (text == "one") return std::string("1");
  if (text == "kirchhoff" && kind == CoeffKind::VertexCondition) {
    std::string sum = "p1";
    for (int i = 2; i <= num_edges; ++i) sum += "+p" + std::to_string(i);
    return sum;
  }
  return std::nullopt;
}

Coefficient Coefficient::parse(const std::string& text, CoeffKind kind, int num_edges) {
  if (auto expanded = builtin_expansion(text, kind, num_edges))
    return Coefficient(Expression::parse(*expanded, kind, num_edges));
  return Coefficient(Expression::parse(text, kind, num_edges));
}

double Coefficient::sigma(double x, double p) const {
  EvalPoint pt;
  pt.x = x;
  pt.p = p;
  return expr_.eval(pt);
}

ValueGrad Coefficient::sigma_grad(double x, double p) const {
  EvalPoint pt;
  pt.x = x;
  pt.p = p;
  return expr_.eval_grad(pt);
}

double Coefficient::ham(double x, double u, double p) const {
  EvalPoint pt;
  pt.x = x;
  pt.u = u;
  pt.p = p;
  return expr_.eval(pt);
}

ValueGrad Coefficient::ham_grad(double x, double u, double p) const {
  EvalPoint pt;
  pt.x = x;
  pt.u = u;
  pt.p = p;
  return expr_.eval_grad(pt);
}

double Coefficient::vertex(double u, std::span<const double> flux) const {
  EvalPoint pt;
  pt.u = u;
  pt.p_vec = flux;
  return expr_.eval(pt);
}

double Coefficient::initial(double x) const {
  EvalPoint pt;
  pt.x = x;
  return expr_.eval(pt);
}

double Coefficient::outer(double t) const {
  EvalPoint pt;
  pt.t = t;
  return expr_.eval(pt);
}

double Coefficient::forcing(double t, double x) const {
  EvalPoint pt;
  pt.t = t;
  pt.x = x;
  return expr_.eval(pt);
}

}  // namespace starpde
