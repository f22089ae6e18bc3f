#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "starpde/coefficient.hpp"

using namespace starpde;

TEST_CASE("literals and arithmetic follow the grammar") {
  auto e = Expression::parse("1", CoeffKind::Sigma);
  EvalPoint pt;
  pt.x = 0.3;
  pt.p = -2.0;
  CHECK(e.eval(pt) == 1.0);

  auto q = Expression::parse("(1+abs(p))^2", CoeffKind::Sigma);
  pt.x = 0.0;
  pt.p = 1.0;
  CHECK(q.eval(pt) == doctest::Approx(4.0).epsilon(1e-15));

  // left associativity of binary -, /
  CHECK(Expression::parse("2-1-1", CoeffKind::Sigma).eval({}) == 0.0);
  CHECK(Expression::parse("8/4/2", CoeffKind::Sigma).eval({}) == 1.0);
  // ^ is right associative
  CHECK(Expression::parse("2^3^2", CoeffKind::Sigma).eval({}) == 512.0);
  // unary minus sits at base level, so -2^2 is (-2)^2
  CHECK(Expression::parse("-2^2", CoeffKind::Sigma).eval({}) == 4.0);
  CHECK(Expression::parse("2^-2", CoeffKind::Sigma).eval({}) == 0.25);
  CHECK(Expression::parse("--3", CoeffKind::Sigma).eval({}) == 3.0);
  CHECK(Expression::parse("1.5e-3", CoeffKind::Sigma).eval({}) == 1.5e-3);
}

TEST_CASE("unknown identifiers and kind legality are rejected with positions") {
  CHECK_THROWS_AS(Expression::parse("u + q", CoeffKind::Hamiltonian), ParseError);
  try {
    Expression::parse("u + q", CoeffKind::Hamiltonian);
  } catch (const ParseError& e) {
    CHECK(e.position == 4);
    CHECK(std::string(e.what()).find("'q'") != std::string::npos);
  }
  // t is not a sigma variable
  CHECK_THROWS_AS(Expression::parse("t + 1", CoeffKind::Sigma), ParseError);
  // flux components only exist in vertex conditions
  CHECK_THROWS_AS(Expression::parse("p1", CoeffKind::Sigma), ParseError);
  CHECK_NOTHROW(Expression::parse("p1+p3", CoeffKind::VertexCondition, 3));
  CHECK_THROWS_AS(Expression::parse("p4", CoeffKind::VertexCondition, 3), ParseError);
  CHECK_THROWS_AS(Expression::parse("sin(1,2)", CoeffKind::Sigma), ParseError);
  CHECK_THROWS_AS(Expression::parse("min(1)", CoeffKind::Sigma), ParseError);
  CHECK_THROWS_AS(Expression::parse("1 +", CoeffKind::Sigma), ParseError);
  CHECK_THROWS_AS(Expression::parse("(1", CoeffKind::Sigma), ParseError);
}

TEST_CASE("evaluation errors on domain violations") {
  EvalPoint pt;
  pt.p = -1.0;
  CHECK_THROWS_AS(Expression::parse("1/(1+p)", CoeffKind::Sigma).eval(pt), EvalError);
  CHECK_THROWS_AS(Expression::parse("ln(p)", CoeffKind::Sigma).eval(pt), EvalError);
  CHECK_THROWS_AS(Expression::parse("sqrt(p)", CoeffKind::Sigma).eval(pt), EvalError);
  pt.p = 0.5;
  CHECK_NOTHROW(Expression::parse("ln(p)", CoeffKind::Sigma).eval(pt));
}

TEST_CASE("evaluation agrees with a direct reference evaluator on random points") {
  struct Ref {
    const char* text;
    CoeffKind kind;
    std::function<double(double, double, double, double)> fn;  // (x,t,u,p)
  };
  const std::vector<Ref> refs = {
      {"(1+abs(p))^2", CoeffKind::Sigma,
       [](double, double, double, double p) { return std::pow(1.0 + std::abs(p), 2.0); }},
      {"u - sin(x)*((1+abs(cos(x)))^2+1)", CoeffKind::Hamiltonian,
       [](double x, double, double u, double) {
         return u - std::sin(x) * (std::pow(1.0 + std::abs(std::cos(x)), 2.0) + 1.0);
       }},
      {"exp(-t)*(cos(1)+0.5*sin(1))", CoeffKind::OuterBoundary,
       [](double, double t, double, double) {
         return std::exp(-t) * (std::cos(1.0) + 0.5 * std::sin(1.0));
       }},
      {"max(0,1-x^2)^3", CoeffKind::Initial,
       [](double x, double, double, double) {
         return std::pow(std::max(0.0, 1.0 - x * x), 3.0);
       }},
      {"tanh(u)+cosh(p)/sinh(p+4)", CoeffKind::Hamiltonian,
       [](double, double, double u, double p) {
         return std::tanh(u) + std::cosh(p) / std::sinh(p + 4.0);
       }},
      {"2*x^2-x*u+p/(2+u)-0.5", CoeffKind::Hamiltonian,
       [](double x, double, double u, double p) {
         return 2.0 * x * x - x * u + p / (2.0 + u) - 0.5;
       }},
      {"sqrt(1+p^2)", CoeffKind::Sigma,
       [](double, double, double, double p) { return std::sqrt(1.0 + p * p); }},
      {"min(u,2*u)+max(x,0.25)", CoeffKind::Hamiltonian,
       [](double x, double, double u, double) {
         return std::min(u, 2.0 * u) + std::max(x, 0.25);
       }},
  };
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  for (const Ref& r : refs) {
    auto e = Expression::parse(r.text, r.kind);
    for (int i = 0; i < 1000; ++i) {
      EvalPoint pt;
      pt.x = std::abs(dist(rng));
      pt.t = std::abs(dist(rng));
      pt.u = dist(rng);
      pt.p = dist(rng);
      double want = r.fn(pt.x, pt.t, pt.u, pt.p);
      double got = e.eval(pt);
      CHECK(got == doctest::Approx(want).epsilon(1e-14));
    }
  }
}

TEST_CASE("forward-mode derivatives match finite differences") {
  auto h = Expression::parse("u^2+p*u+sin(p)", CoeffKind::Hamiltonian);
  EvalPoint pt;
  pt.x = 0.2;
  pt.u = 0.7;
  pt.p = -0.4;
  ValueGrad g = h.eval_grad(pt);
  CHECK(g.value == doctest::Approx(0.49 - 0.28 + std::sin(-0.4)));
  CHECK(g.du == doctest::Approx(2 * 0.7 - 0.4).epsilon(1e-12));
  CHECK(g.dp == doctest::Approx(0.7 + std::cos(-0.4)).epsilon(1e-12));

  auto s = Expression::parse("(1+abs(p))^2", CoeffKind::Sigma);
  EvalPoint q;
  q.p = 1.0;
  CHECK(s.eval_grad(q).dp == doctest::Approx(4.0));
  q.p = -1.0;
  CHECK(s.eval_grad(q).dp == doctest::Approx(-4.0));
}

namespace {

// random well-formed expression text for round-trip checks
std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 12);
  std::uniform_real_distribution<double> lit(0.0, 4.0);
  switch (pick(rng)) {
    case 0: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3g", lit(rng));
      return buf;
    }
    case 1: return "u";
    case 2: return "p";
    case 3: return "(" + random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1) + ")";
    case 4: return random_expr(rng, depth - 1) + "-" + random_expr(rng, depth - 1);
    case 5: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
    case 6: return "-" + random_expr(rng, depth - 1);
    case 7: return "abs(" + random_expr(rng, depth - 1) + ")";
    case 8: return "min(" + random_expr(rng, depth - 1) + "," + random_expr(rng, depth - 1) + ")";
    case 9: return random_expr(rng, depth - 1) + "/" + random_expr(rng, depth - 1);
    case 10:
      return "(" + random_expr(rng, depth - 1) + ")^(" + random_expr(rng, depth - 1) + ")";
    case 11: return "-" + random_expr(rng, depth - 1) + "^2";
    default: return "(" + random_expr(rng, depth - 1) + ")^2";
  }
}

}  // namespace

TEST_CASE("parse -> print -> parse is a fixed point") {
  std::mt19937_64 rng(20240901);
  for (int i = 0; i < 300; ++i) {
    std::string text = random_expr(rng, 4);
    auto e1 = Expression::parse(text, CoeffKind::Hamiltonian);
    std::string printed = e1.print();
    auto e2 = Expression::parse(printed, CoeffKind::Hamiltonian);
    CHECK(printed == e2.print());
    // the printed form evaluates identically (or fails identically: random
    // trees may divide by zero or hit pow domain errors at the probe point)
    EvalPoint pt;
    pt.u = 0.3;
    pt.p = -1.2;
    double v1 = 0.0, v2 = 0.0;
    bool threw1 = false, threw2 = false;
    try {
      v1 = e1.eval(pt);
    } catch (const EvalError&) {
      threw1 = true;
    }
    try {
      v2 = e2.eval(pt);
    } catch (const EvalError&) {
      threw2 = true;
    }
    CHECK(threw1 == threw2);
    if (!threw1) CHECK(v1 == doctest::Approx(v2).epsilon(1e-15));
  }
}

TEST_CASE("named built-ins expand to expressions") {
  auto kirchhoff = Coefficient::parse("kirchhoff", CoeffKind::VertexCondition, 3);
  std::vector<double> flux = {1.0, 2.0, -0.5};
  CHECK(kirchhoff.vertex(9.0, flux) == doctest::Approx(2.5));
  CHECK(kirchhoff.print() == "p1+p2+p3");
  CHECK(Coefficient::parse("zero", CoeffKind::Hamiltonian).ham(0.1, 2.0, 3.0) == 0.0);
  CHECK(Coefficient::parse("one", CoeffKind::Sigma).sigma(0.1, 2.0) == 1.0);
  // not a builtin outside vertex conditions
  CHECK_THROWS_AS(Coefficient::parse("kirchhoff", CoeffKind::Sigma), ParseError);
}
