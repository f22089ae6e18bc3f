#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "starpde/coefficient.hpp"
#include "starpde/junction.hpp"

namespace starpde {

/// Structural constants of assumptions (P)/(E): ellipticity envelope,
/// Hamiltonian monotonicity constant, and a root pair of F. The bound
/// functions mu/gamma/epsilon/P are optional user declarations consumed
/// only by the validator.
struct GrowthEnvelope {
  double m = 2.0;
  double nu_lower = 1.0;
  double nu_upper = 1.0;
  double c_h = 1.0;
  double root_b = 0.0;
  std::vector<double> root_B;
  std::optional<Coefficient> mu_bound;
  std::optional<Coefficient> gamma_bound;
  std::optional<Coefficient> epsilon_bound;
  std::optional<Coefficient> p_bound;
};

/// Full problem data for the parabolic junction problem; the elliptic
/// problem uses the same structure with `initial` ignored and the outer
/// data read at t = 0.
struct ProblemSpec {
  Junction junction;
  std::vector<Coefficient> sigma;           // per edge, sigma_i(x, p)
  std::vector<Coefficient> hamiltonian;     // per edge, H_i(x, u, p)
  Coefficient vertex_condition;             // F(u, p_1..p_I)
  std::vector<Coefficient> initial;         // per edge, g_i(x)
  std::vector<Coefficient> outer_boundary;  // per edge, phi_i(t)
  std::optional<std::vector<Coefficient>> forcing;  // per edge, f_i(t, x)
  double horizon = 1.0;
  GrowthEnvelope envelope;

  int num_edges() const { return junction.num_edges; }

  /// H with the forcing term folded in: H_i(x,u,p) - f_i(t,x).
  double ham_eff(int edge, double t, double x, double u, double p) const;

  /// Throws ConfigError on arity/invariant violations.
  void check_shape() const;
};

struct CompatibilityReport {
  bool ok = false;
  double f_residual = 0.0;               // |F(g(0), dx g(0))|
  std::vector<double> outer_residuals;   // |g_i(a_i) - phi_i(0)|
  double vertex_mismatch = 0.0;          // max_i |g_i(0) - g_1(0)|
  double g0 = 0.0;
  std::vector<double> g0_gradient;
  std::string to_text() const;
};

/// Checks assumption (P)(v): |F(g(0), dx g(0))| <= tol and
/// |g_i(a_i) - phi_i(0)| <= tol, plus vertex continuity of g.
/// dx g(0) uses the one-sided second-order stencil with step a_i/1024.
CompatibilityReport compatibility_check(const ProblemSpec& p, double tol);

enum class Verdict : std::uint8_t { Pass, Fail, Unchecked, SpotChecked };
const char* verdict_name(Verdict v);

struct AssumptionCheck {
  std::string id;           // e.g. "P.ii"
  std::string description;
  Verdict verdict = Verdict::Unchecked;
  double measured = 0.0;    // worst sampled value (meaning depends on check)
  double bound = 0.0;
  std::string witness;      // FAIL only: offending point and both sides
};

struct SamplingPlan {
  int n_x = 9;
  int n_u = 7;
  int n_p = 11;
  double u_max = 2.0;
  double p_max = 5.0;
  int pair_samples = 200;
  std::uint64_t seed = 20240901;
  double tol = 1e-7;            // slack on sampled inequalities
  double fd_step = 1e-6;        // relative step for derivative probes
  double p_exclusion = 1e-3;    // |p| excluded from (E)(iv), singular 1/p
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  SamplingPlan plan;
  bool has_fail() const;
  std::string to_text() const;
};

/// Samples assumptions (P)(i)-(iv) and (E)(iii)-(iv) on the box
/// [0, a_i] x [-u_max, u_max] x [-p_max, p_max]. Asymptotic conditions are
/// reported SPOT-CHECKED at best; checks that need undeclared bound
/// functions report UNCHECKED.
ValidationReport validate_assumptions(const ProblemSpec& p, const SamplingPlan& plan = {});

}  // namespace starpde
