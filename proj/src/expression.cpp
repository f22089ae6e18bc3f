#include "starpde/expression.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace starpde {

namespace {

enum FuncId : std::uint8_t { FExp, FLn, FSin, FCos, FCosh, FSinh, FTanh, FAbs, FSqrt, FMin, FMax };

struct FuncInfo {
  const char* name;
  int arity;
};

constexpr std::array<FuncInfo, 11> kFuncs = {{{"exp", 1},
                                              {"ln", 1},
                                              {"sin", 1},
                                              {"cos", 1},
                                              {"cosh", 1},
                                              {"sinh", 1},
                                              {"tanh", 1},
                                              {"abs", 1},
                                              {"sqrt", 1},
                                              {"min", 2},
                                              {"max", 2}}};

int func_lookup(std::string_view name) {
  for (std::size_t i = 0; i < kFuncs.size(); ++i)
    if (name == kFuncs[i].name) return static_cast<int>(i);
  return -1;
}

// Variable ids: 0=x, 1=t, 2=u, 3=p, 4+i = p_{i+1}
constexpr std::int32_t kVarX = 0, kVarT = 1, kVarU = 2, kVarP = 3, kVarPVec = 4;

bool var_legal_for(CoeffKind kind, std::int32_t var) {
  switch (kind) {
    case CoeffKind::Sigma:
      return var == kVarX || var == kVarP;
    case CoeffKind::Hamiltonian:
      return var == kVarX || var == kVarU || var == kVarP;
    case CoeffKind::VertexCondition:
      return var == kVarU || var >= kVarPVec;
    case CoeffKind::Initial:
      return var == kVarX;
    case CoeffKind::OuterBoundary:
      return var == kVarT;
    case CoeffKind::Forcing:
      return var == kVarX || var == kVarT;
    case CoeffKind::BoundOfU:
      return var == kVarU;
    case CoeffKind::BoundOfUP:
      return var == kVarU || var == kVarP;
    case CoeffKind::Reference:
      return var == kVarX || var == kVarT;
  }
  return false;
}

std::string var_name(std::int32_t var) {
  switch (var) {
    case kVarX: return "x";
    case kVarT: return "t";
    case kVarU: return "u";
    case kVarP: return "p";
    default: return "p" + std::to_string(var - kVarPVec + 1);
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what);
  return v;
}

}  // namespace

const char* coeff_kind_name(CoeffKind kind) {
  switch (kind) {
    case CoeffKind::Sigma: return "sigma";
    case CoeffKind::Hamiltonian: return "hamiltonian";
    case CoeffKind::VertexCondition: return "vertex_condition";
    case CoeffKind::Initial: return "initial";
    case CoeffKind::OuterBoundary: return "outer_boundary";
    case CoeffKind::Forcing: return "forcing";
    case CoeffKind::BoundOfU: return "bound(u)";
    case CoeffKind::BoundOfUP: return "bound(u,p)";
    case CoeffKind::Reference: return "reference";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class ExprParser {
 public:
  ExprParser(std::string_view text, CoeffKind kind, int num_edges)
      : text_(text), kind_(kind), num_edges_(num_edges) {}

  Expression run() {
    Expression e;
    e.kind_ = kind_;
    e.num_edges_ = num_edges_;
    nodes_ = &e.nodes_;
    skip_ws();
    e.root_ = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  using Node = Expression::Node;
  using NodeKind = Expression::NodeKind;

  std::string_view text_;
  CoeffKind kind_;
  int num_edges_;
  std::size_t pos_ = 0;
  std::vector<Node>* nodes_ = nullptr;

  std::int32_t add(Node n) {
    nodes_->push_back(n);
    return static_cast<std::int32_t>(nodes_->size() - 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  std::int32_t parse_expr() {
    std::int32_t lhs = parse_term();
    for (;;) {
      skip_ws();
      if (eat('+'))
        lhs = add({NodeKind::Add, 0, lhs, parse_term(), 0.0});
      else if (eat('-'))
        lhs = add({NodeKind::Sub, 0, lhs, parse_term(), 0.0});
      else
        return lhs;
    }
  }

  std::int32_t parse_term() {
    std::int32_t lhs = parse_factor();
    for (;;) {
      skip_ws();
      if (eat('*'))
        lhs = add({NodeKind::Mul, 0, lhs, parse_factor(), 0.0});
      else if (eat('/'))
        lhs = add({NodeKind::Div, 0, lhs, parse_factor(), 0.0});
      else
        return lhs;
    }
  }

  std::int32_t parse_factor() {
    std::int32_t base = parse_base();
    if (eat('^')) return add({NodeKind::Pow, 0, base, parse_factor(), 0.0});
    return base;
  }

  std::int32_t parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return add({NodeKind::Neg, 0, parse_base(), -1, 0.0});
    }
    if (c == '(') {
      ++pos_;
      std::int32_t inner = parse_expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  std::int32_t parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // bare 'e' belongs to the next token
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    if (token == ".") throw ParseError("malformed number", start);
    char* end = nullptr;
    double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) throw ParseError("malformed number '" + token + "'", start);
    return add({NodeKind::Num, 0, -1, -1, v});
  }

  std::int32_t parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));

    if (peek() == '(') {
      int fid = func_lookup(name);
      if (fid < 0) throw ParseError("unknown function '" + name + "'", start);
      eat('(');
      std::int32_t a = parse_expr();
      std::int32_t b = -1;
      int got = 1;
      while (eat(',')) {
        std::int32_t arg = parse_expr();
        if (got == 1) b = arg;
        ++got;
      }
      if (!eat(')')) throw ParseError("expected ')' in call to '" + name + "'", pos_);
      if (got != kFuncs[fid].arity)
        throw ParseError("function '" + name + "' expects " + std::to_string(kFuncs[fid].arity) +
                             " argument(s), got " + std::to_string(got),
                         start);
      return add({NodeKind::Call, static_cast<std::uint8_t>(fid), a, b, 0.0});
    }

    std::int32_t var = -1;
    if (name == "x")
      var = kVarX;
    else if (name == "t")
      var = kVarT;
    else if (name == "u")
      var = kVarU;
    else if (name == "p")
      var = kVarP;
    else if (name.size() >= 2 && name[0] == 'p') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      if (digits) {
        int idx = std::stoi(name.substr(1));
        if (idx < 1 || idx > num_edges_)
          throw ParseError("flux component '" + name + "' out of range for " +
                               std::to_string(num_edges_) + " edge(s)",
                           start);
        var = kVarPVec + idx - 1;
      }
    }
    if (var < 0) throw ParseError("unknown identifier '" + name + "'", start);
    if (!var_legal_for(kind_, var))
      throw ParseError("variable '" + name + "' not allowed in " +
                           std::string(coeff_kind_name(kind_)) + " expressions",
                       start);
    return add({NodeKind::Var, 0, var, -1, 0.0});
  }
};

Expression Expression::parse(std::string_view text, CoeffKind kind, int num_edges) {
  return ExprParser(text, kind, num_edges).run();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

double read_var(std::int32_t var, const EvalPoint& pt) {
  switch (var) {
    case kVarX: return pt.x;
    case kVarT: return pt.t;
    case kVarU: return pt.u;
    case kVarP: return pt.p;
    default: {
      std::size_t i = static_cast<std::size_t>(var - kVarPVec);
      if (i >= pt.p_vec.size()) throw EvalError("flux vector too short for " + var_name(var));
      return pt.p_vec[i];
    }
  }
}

double apply_func(int fid, double a, double b) {
  switch (fid) {
    case FExp: return std::exp(a);
    case FLn:
      if (a <= 0.0) throw EvalError("ln of non-positive value");
      return std::log(a);
    case FSin: return std::sin(a);
    case FCos: return std::cos(a);
    case FCosh: return std::cosh(a);
    case FSinh: return std::sinh(a);
    case FTanh: return std::tanh(a);
    case FAbs: return std::abs(a);
    case FSqrt:
      if (a < 0.0) throw EvalError("sqrt of negative value");
      return std::sqrt(a);
    case FMin: return a <= b ? a : b;
    case FMax: return a >= b ? a : b;
  }
  throw EvalError("bad function id");
}

// Forward-mode scalar with tangents in u and p.
struct Dual {
  double v = 0.0, du = 0.0, dp = 0.0;
};

Dual dual_func(int fid, Dual a, Dual b) {
  auto chain = [&](double v, double d) { return Dual{v, d * a.du, d * a.dp}; };
  switch (fid) {
    case FExp: {
      double e = std::exp(a.v);
      return chain(e, e);
    }
    case FLn:
      if (a.v <= 0.0) throw EvalError("ln of non-positive value");
      return chain(std::log(a.v), 1.0 / a.v);
    case FSin: return chain(std::sin(a.v), std::cos(a.v));
    case FCos: return chain(std::cos(a.v), -std::sin(a.v));
    case FCosh: return chain(std::cosh(a.v), std::sinh(a.v));
    case FSinh: return chain(std::sinh(a.v), std::cosh(a.v));
    case FTanh: {
      double th = std::tanh(a.v);
      return chain(th, 1.0 - th * th);
    }
    case FAbs:
      // kink convention: derivative 0 at the origin
      return chain(std::abs(a.v), a.v > 0.0 ? 1.0 : (a.v < 0.0 ? -1.0 : 0.0));
    case FSqrt: {
      if (a.v < 0.0) throw EvalError("sqrt of negative value");
      double s = std::sqrt(a.v);
      return chain(s, a.v > 0.0 ? 0.5 / s : 0.0);
    }
    case FMin: return a.v <= b.v ? a : b;
    case FMax: return a.v >= b.v ? a : b;
  }
  throw EvalError("bad function id");
}

}  // namespace

double Expression::eval_node(std::int32_t idx, const EvalPoint& pt) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.kind) {
    case NodeKind::Num: return n.value;
    case NodeKind::Var: return read_var(n.a, pt);
    case NodeKind::Neg: return -eval_node(n.a, pt);
    case NodeKind::Add: return eval_node(n.a, pt) + eval_node(n.b, pt);
    case NodeKind::Sub: return eval_node(n.a, pt) - eval_node(n.b, pt);
    case NodeKind::Mul: return eval_node(n.a, pt) * eval_node(n.b, pt);
    case NodeKind::Div: {
      double den = eval_node(n.b, pt);
      if (den == 0.0) throw EvalError("division by zero");
      return eval_node(n.a, pt) / den;
    }
    case NodeKind::Pow: {
      double base = eval_node(n.a, pt);
      double expo = eval_node(n.b, pt);
      double r = std::pow(base, expo);
      if (std::isnan(r)) throw EvalError("pow with negative base and non-integer exponent");
      return r;
    }
    case NodeKind::Call:
      return apply_func(n.func, eval_node(n.a, pt), n.b >= 0 ? eval_node(n.b, pt) : 0.0);
  }
  throw EvalError("bad node");
}

double Expression::eval(const EvalPoint& pt) const {
  return checked(eval_node(root_, pt), "expression evaluation");
}

template <typename D>
D grad_eval_node(const Expression& e, std::int32_t idx, const EvalPoint& pt) {
  using Node = Expression::Node;
  using NodeKind = Expression::NodeKind;
  const Node& n = e.nodes_[static_cast<std::size_t>(idx)];
  switch (n.kind) {
    case NodeKind::Num: return D{n.value, 0.0, 0.0};
    case NodeKind::Var: {
      D d{read_var(n.a, pt), 0.0, 0.0};
      if (n.a == kVarU) d.du = 1.0;
      if (n.a == kVarP) d.dp = 1.0;
      return d;
    }
    case NodeKind::Neg: {
      D a = grad_eval_node<D>(e, n.a, pt);
      return D{-a.v, -a.du, -a.dp};
    }
    case NodeKind::Add: {
      D a = grad_eval_node<D>(e, n.a, pt), b = grad_eval_node<D>(e, n.b, pt);
      return D{a.v + b.v, a.du + b.du, a.dp + b.dp};
    }
    case NodeKind::Sub: {
      D a = grad_eval_node<D>(e, n.a, pt), b = grad_eval_node<D>(e, n.b, pt);
      return D{a.v - b.v, a.du - b.du, a.dp - b.dp};
    }
    case NodeKind::Mul: {
      D a = grad_eval_node<D>(e, n.a, pt), b = grad_eval_node<D>(e, n.b, pt);
      return D{a.v * b.v, a.du * b.v + a.v * b.du, a.dp * b.v + a.v * b.dp};
    }
    case NodeKind::Div: {
      D a = grad_eval_node<D>(e, n.a, pt), b = grad_eval_node<D>(e, n.b, pt);
      if (b.v == 0.0) throw EvalError("division by zero");
      double inv = 1.0 / b.v;
      double v = a.v * inv;
      return D{v, (a.du - v * b.du) * inv, (a.dp - v * b.dp) * inv};
    }
    case NodeKind::Pow: {
      D a = grad_eval_node<D>(e, n.a, pt), b = grad_eval_node<D>(e, n.b, pt);
      if (b.du == 0.0 && b.dp == 0.0) {
        double c = b.v;
        double v = std::pow(a.v, c);
        if (std::isnan(v)) throw EvalError("pow with negative base and non-integer exponent");
        double d = 0.0;
        if (a.v != 0.0)
          d = c * std::pow(a.v, c - 1.0);
        else if (c > 1.0)
          d = 0.0;
        else if (c == 1.0)
          d = 1.0;
        // c < 1 at base 0: keep the kink convention d = 0
        return D{v, d * a.du, d * a.dp};
      }
      if (a.v <= 0.0) throw EvalError("pow with varying exponent requires positive base");
      double v = std::pow(a.v, b.v);
      double la = std::log(a.v);
      double common = b.v / a.v;
      return D{v, v * (b.du * la + common * a.du), v * (b.dp * la + common * a.dp)};
    }
    case NodeKind::Call: {
      D a = grad_eval_node<D>(e, n.a, pt);
      D b = n.b >= 0 ? grad_eval_node<D>(e, n.b, pt) : D{};
      return dual_func(n.func, a, b);
    }
  }
  throw EvalError("bad node");
}

ValueGrad Expression::eval_grad(const EvalPoint& pt) const {
  Dual d = grad_eval_node<Dual>(*this, root_, pt);
  if (!std::isfinite(d.v)) throw EvalError("non-finite result in expression evaluation");
  return ValueGrad{d.v, d.du, d.dp};
}

bool Expression::is_constant() const {
  return nodes_[static_cast<std::size_t>(root_)].kind == NodeKind::Num;
}

double Expression::constant_value() const {
  return nodes_[static_cast<std::size_t>(root_)].value;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

void Expression::print_node(std::int32_t idx, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  auto kind_of = [&](std::int32_t i) { return nodes_[static_cast<std::size_t>(i)].kind; };
  auto is_base_like = [&](std::int32_t i) {
    NodeKind k = kind_of(i);
    return k == NodeKind::Num || k == NodeKind::Var || k == NodeKind::Call || k == NodeKind::Neg;
  };
  auto wrapped = [&](std::int32_t i) {
    out += '(';
    print_node(i, out);
    out += ')';
  };

  switch (n.kind) {
    case NodeKind::Num:
      out += format_double(n.value);
      return;
    case NodeKind::Var:
      out += var_name(n.a);
      return;
    case NodeKind::Neg:
      out += '-';
      if (is_base_like(n.a))
        print_node(n.a, out);
      else
        wrapped(n.a);
      return;
    case NodeKind::Add:
    case NodeKind::Sub: {
      print_node(n.a, out);
      out += n.kind == NodeKind::Add ? '+' : '-';
      NodeKind rk = kind_of(n.b);
      if (rk == NodeKind::Add || rk == NodeKind::Sub)
        wrapped(n.b);
      else
        print_node(n.b, out);
      return;
    }
    case NodeKind::Mul:
    case NodeKind::Div: {
      NodeKind lk = kind_of(n.a);
      if (lk == NodeKind::Add || lk == NodeKind::Sub)
        wrapped(n.a);
      else
        print_node(n.a, out);
      out += n.kind == NodeKind::Mul ? '*' : '/';
      NodeKind rk = kind_of(n.b);
      if (rk == NodeKind::Add || rk == NodeKind::Sub || rk == NodeKind::Mul || rk == NodeKind::Div)
        wrapped(n.b);
      else
        print_node(n.b, out);
      return;
    }
    case NodeKind::Pow: {
      if (is_base_like(n.a))
        print_node(n.a, out);
      else
        wrapped(n.a);
      out += '^';
      NodeKind rk = kind_of(n.b);
      if (is_base_like(n.b) || rk == NodeKind::Pow)
        print_node(n.b, out);
      else
        wrapped(n.b);
      return;
    }
    case NodeKind::Call: {
      out += kFuncs[n.func].name;
      out += '(';
      print_node(n.a, out);
      if (n.b >= 0) {
        out += ',';
        print_node(n.b, out);
      }
      out += ')';
      return;
    }
  }
}

std::string Expression::print() const {
  std::string out;
  print_node(root_, out);
  return out;
}

}  // namespace starpde
