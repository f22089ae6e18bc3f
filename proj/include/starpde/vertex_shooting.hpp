#pragma once

#include <optional>
#include <span>
#include <utility>

#include "starpde/edge_bvp.hpp"
#include "starpde/junction.hpp"
#include "starpde/problem.hpp"

namespace starpde {

struct BracketError : std::runtime_error {
  BracketError(const std::string& msg, double f_lo, double f_hi)
      : std::runtime_error(msg), f_at_lo(f_lo), f_at_hi(f_hi) {}
  double f_at_lo;
  double f_at_hi;
};

/// Elliptic junction problem in callback form: I Dirichlet edges coupled by
/// the nonlinear vertex condition F(u(0), flux) = 0.
struct EllipticProblem {
  JunctionGrid grid;
  std::vector<EdgeCoefficients> coeffs;  // per edge
  std::vector<double> outer_values;      // phi_i
  std::function<double(double u, std::span<const double> flux)> vertex_condition;
};

/// Plain elliptic problem from a ProblemSpec; outer data and forcing are
/// read at time t (0 for the stationary problem).
EllipticProblem elliptic_from_spec(const ProblemSpec& p, const JunctionGrid& grid, double t = 0.0);

struct ThetaBracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Super/sub-solution bracket for the vertex value. `rate` is the strong
/// monotonicity constant dividing K_i (C_H for plain solves, 1/dt - C_H for
/// Rothe-augmented ones). K_i is sampled over 1025 equispaced x per edge and
/// inflated by 10%; degenerate brackets widen to width 0.2.
ThetaBracket theta_bracket(const EllipticProblem& ep, double root_b, std::span<const double> root_B,
                           double rate);
ThetaBracket theta_bracket(const ProblemSpec& p, const JunctionGrid& grid, double t = 0.0);

struct ShootResult {
  double vertex_value = 0.0;
  std::vector<double> flux;  // dx u_i(0) by the one-sided stencil
  double f_value = 0.0;
  std::vector<EdgeSolution> edges;
};

/// Solves the I decoupled Dirichlet problems with left value theta
/// (concurrently for I >= 2) and evaluates the vertex condition.
/// Throws SolveError, tagged with the edge index and theta, if an edge
/// solve diverges.
ShootResult shoot(const EllipticProblem& ep, double theta, const EdgeSolveOptions& edge_opts = {},
                  const std::vector<EdgeSolution>* warm = nullptr);

struct EllipticOptions {
  double theta_tol = 1e-12;
  double f_tol = 1e-9;  // scaled by 1 + |F(lo)| + |F(hi)|
  std::optional<ThetaBracket> bracket;
  EdgeSolveOptions edge;
  int max_bisections = 200;
};

struct EllipticSolution {
  double theta_star = 0.0;
  GridFunction solution;
  std::vector<double> vertex_flux;
  double f_residual = 0.0;
  double f_tol_effective = 0.0;
  int bisection_iterations = 0;
  bool converged = false;
  ThetaBracket initial_bracket;
  std::vector<EdgeSolution> edge_solutions;
  std::string message;
};

/// Bisection on theta between bracket endpoints with opposite signs of
/// F(u^theta(0), dx u^theta(0)); mirrors the intermediate-value construction
/// of the existence proof. A same-sign bracket is doubled up to 8 times
/// before SIGN_BRACKET_FAILED is raised.
EllipticSolution solve_elliptic_junction(const EllipticProblem& ep, double root_b,
                                         std::span<const double> root_B, double rate,
                                         const EllipticOptions& opts = {});
EllipticSolution solve_elliptic_junction(const ProblemSpec& p, const JunctionGrid& grid,
                                         const EllipticOptions& opts = {}, double t = 0.0);

}  // namespace starpde
