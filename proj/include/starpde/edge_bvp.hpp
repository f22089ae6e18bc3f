#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "starpde/coefficient.hpp"
#include "starpde/junction.hpp"

namespace starpde {

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SigmaEval {
  double value = 0.0;
  double dp = 0.0;
};

struct HamEval {
  double value = 0.0;
  double du = 0.0;
  double dp = 0.0;
};

/// Per-edge coefficient callbacks. `node` is the grid node index of the
/// evaluation point (-1 for off-grid probes); the Rothe augmentation uses it
/// to look up the previous snapshot without interpolation.
struct EdgeCoefficients {
  std::function<SigmaEval(double x, double p)> sigma;
  std::function<HamEval(int node, double x, double u, double p)> ham;
};

EdgeCoefficients plain_edge_coefficients(const Coefficient& sigma, const Coefficient& ham);

/// One quasilinear Dirichlet problem on a single edge:
///   -sigma(x, u') u'' + H(x, u, u') = 0,  u(0) = left_value, u(a) = right_value
struct EdgeProblem {
  double length = 1.0;
  int nodes = 3;  // N >= 3, uniform spacing length/(N-1)
  double left_value = 0.0;
  double right_value = 0.0;
  EdgeCoefficients coeffs;

  double spacing() const { return length / (nodes - 1); }
};

enum class EdgeStatus { Converged, MaxIterations, LineSearchStalled, SingularJacobian };
const char* edge_status_name(EdgeStatus s);

struct EdgeSolution {
  std::vector<double> values;  // all N nodes, endpoints pinned exactly
  double residual_sup = 0.0;   // scaled: sup|R| / (1 + sup|v|)
  int newton_iterations = 0;
  bool converged = false;
  EdgeStatus status = EdgeStatus::MaxIterations;
  std::vector<double> residual_history;
};

struct EdgeSolveOptions {
  double tol = 1e-10;  // on the scaled residual
  int max_iter = 100;
  bool damping = true;  // Armijo backtracking, at most 40 halvings
  enum class Jacobian { Analytic, FiniteDifference } jacobian = Jacobian::Analytic;
  bool continuation = true;  // retry via homotopy in the left value on failure
  const std::vector<double>* initial = nullptr;  // warm start, N values
};

/// Interior residual R_j = -sigma(x_j, Dv_j) D2v_j + H(x_j, v_j, Dv_j) with
/// central differences; v must carry N entries with the boundary values set.
std::vector<double> assemble_residual(const EdgeProblem& p, const std::vector<double>& v);

EdgeSolution solve_dirichlet_edge(const EdgeProblem& p, const EdgeSolveOptions& opts = {});

}  // namespace starpde
