#include <cmath>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace starpde;
using starpde::testing::simple_spec;

TEST_CASE("compatibility accepts data satisfying (P)(v)") {
  // dx cos(pi x / 2)|_0 = 0 and g(1) = 0 = phi(0)
  ProblemSpec p = simple_spec(1, {1.0}, "1", "0", "p1", "cos(1.5707963267948966*x)", "0", 1e-9,
                              0.0, {0.0});
  CompatibilityReport rep = compatibility_check(p, 1e-6);
  CHECK(rep.ok);
  CHECK(rep.f_residual <= 1e-6);
}

TEST_CASE("compatibility flags a vertex-condition residual") {
  ProblemSpec p = simple_spec(1, {1.0}, "1", "0", "p1", "x", "1", 1e-9, 0.0, {0.0});
  CompatibilityReport rep = compatibility_check(p, 1e-6);
  CHECK_FALSE(rep.ok);
  CHECK(rep.f_residual == doctest::Approx(1.0).epsilon(1e-6));
  // the outer ends match: g(1) = 1 = phi(0)
  CHECK(rep.outer_residuals[0] <= 1e-12);
}

TEST_CASE("compatibility accepts constant data at a root of F") {
  ProblemSpec p = simple_spec(2, {1.0, 2.0}, "1", "0", "-u+p1+p2+1", "1", "1", 1e-9, 1.0,
                              {0.0, 0.0});
  CHECK(compatibility_check(p, 1e-8).ok);
}

TEST_CASE("ellipticity envelope passes when sigma matches it exactly") {
  ProblemSpec p = simple_spec(1, {1.0}, "(1+abs(p))^2", "0", "p1", "0", "0", 1e-9, 0.0, {0.0},
                              1.0, 4.0, 1.0, 1.0);
  ValidationReport rep = validate_assumptions(p);
  for (const auto& c : rep.checks)
    if (c.id == "P.ii") CHECK(c.verdict == Verdict::Pass);
  CHECK_FALSE(rep.has_fail());
}

TEST_CASE("ellipticity fails outside the envelope with a witness") {
  // sigma = 1 but m = 4 demands growth (1+|p|)^2
  ProblemSpec p = simple_spec(1, {1.0}, "1", "0", "p1", "0", "0", 1e-9, 0.0, {0.0}, 1.0, 4.0);
  ValidationReport rep = validate_assumptions(p);
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.id == "P.ii") {
      found = true;
      CHECK(c.verdict == Verdict::Fail);
      CHECK(!c.witness.empty());
    }
  CHECK(found);
}

TEST_CASE("the Kirchhoff branch of (P)(i) passes for a flux sum") {
  ProblemSpec p = simple_spec(2, {1.0, 1.0}, "1", "u", "p1+p2", "0", "0", 1.0, 0.0, {0.0, 0.0});
  ValidationReport rep = validate_assumptions(p);
  for (const auto& c : rep.checks)
    if (c.id == "P.i") {
      CHECK(c.verdict == Verdict::Pass);
      CHECK(c.description.find("Kirchhoff") != std::string::npos);
    }
  CHECK_FALSE(rep.has_fail());
}

TEST_CASE("F increasing in u fails (P)(i) with a witness pair") {
  ProblemSpec p = simple_spec(1, {1.0}, "1", "0", "u+p1", "0", "0", 1e-9, 0.0, {0.0});
  ValidationReport rep = validate_assumptions(p);
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.id == "P.i") {
      found = true;
      CHECK(c.verdict == Verdict::Fail);
      CHECK(c.witness.find("u:") != std::string::npos);
    }
  CHECK(found);
  CHECK(rep.has_fail());
}

TEST_CASE("du H below -C_H fails the derivative probe") {
  ProblemSpec p = simple_spec(1, {1.0}, "1", "-2*u", "p1", "0", "0", 1.0, 0.0, {0.0});
  ValidationReport rep = validate_assumptions(p);
  int fails = 0;
  for (const auto& c : rep.checks)
    if ((c.id == "P.iv.c" || c.id == "E.iii") && c.verdict == Verdict::Fail) ++fails;
  CHECK(fails == 2);
}

TEST_CASE("asymptotic checks never report PASS") {
  ProblemSpec p = simple_spec(1, {1.0}, "1", "u", "p1", "0", "0", 1.0, 0.0, {0.0});
  p.envelope.mu_bound = Coefficient::parse("u+1", CoeffKind::BoundOfU);
  p.envelope.gamma_bound = Coefficient::parse("1", CoeffKind::BoundOfU);
  ValidationReport rep = validate_assumptions(p);
  for (const auto& c : rep.checks) {
    if (c.id == "P.iii" || c.id == "P.iv.a" || c.id == "E.iv")
      CHECK(c.verdict == Verdict::SpotChecked);
    if (c.id == "P.iv.b") CHECK(c.verdict == Verdict::Unchecked);  // eps, P undeclared
  }
}

TEST_CASE("validator reports are reproducible for a fixed seed") {
  ProblemSpec p = simple_spec(1, {1.0}, "1", "u", "p1", "0", "0", 1.0, 0.0, {0.0});
  ValidationReport a = validate_assumptions(p);
  ValidationReport b = validate_assumptions(p);
  CHECK(a.to_text() == b.to_text());
}

TEST_CASE("evaluation failures during sampling become FAIL verdicts with points") {
  // ln(p) is undefined on half the sampling box
  ProblemSpec p = simple_spec(1, {1.0}, "ln(p+6)", "u", "p1", "0", "0", 1.0, 0.0, {0.0});
  p.sigma.clear();
  p.sigma.push_back(Coefficient::parse("ln(p)", CoeffKind::Sigma));
  ValidationReport rep = validate_assumptions(p);
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.id == "P.ii") {
      found = true;
      CHECK(c.verdict == Verdict::Fail);
      CHECK(c.witness.find("evaluation error") != std::string::npos);
      CHECK(c.witness.find("edge 1") != std::string::npos);
    }
  CHECK(found);
}
