#include "starpde/edge_bvp.hpp"

#include <algorithm>
#include <cmath>

namespace starpde {

const char* edge_status_name(EdgeStatus s) {
  switch (s) {
    case EdgeStatus::Converged: return "converged";
    case EdgeStatus::MaxIterations: return "max iterations";
    case EdgeStatus::LineSearchStalled: return "line search stalled";
    case EdgeStatus::SingularJacobian: return "singular jacobian";
  }
  return "?";
}

EdgeCoefficients plain_edge_coefficients(const Coefficient& sigma, const Coefficient& ham) {
  EdgeCoefficients c;
  c.sigma = [sigma](double x, double p) {
    ValueGrad g = sigma.sigma_grad(x, p);
    return SigmaEval{g.value, g.dp};
  };
  c.ham = [ham](int /*node*/, double x, double u, double p) {
    ValueGrad g = ham.ham_grad(x, u, p);
    return HamEval{g.value, g.du, g.dp};
  };
  return c;
}

namespace {

double scaled_sup(const std::vector<double>& r, const std::vector<double>& v) {
  double rs = 0.0, vs = 0.0;
  for (double x : r) rs = std::max(rs, std::abs(x));
  for (double x : v) vs = std::max(vs, std::abs(x));
  return rs / (1.0 + vs);
}

// Tridiagonal system (lower, diag, upper); returns false on a zero pivot.
bool thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) return false;
    double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) return false;
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  return true;
}

struct Tridiag {
  std::vector<double> lower, diag, upper;
};

Tridiag analytic_jacobian(const EdgeProblem& p, const std::vector<double>& v) {
  const int n = p.nodes;
  const double h = p.spacing();
  Tridiag J;
  J.lower.assign(n - 2, 0.0);
  J.diag.assign(n - 2, 0.0);
  J.upper.assign(n - 2, 0.0);
  for (int j = 1; j <= n - 2; ++j) {
    double x = j * h;
    double dv = (v[j + 1] - v[j - 1]) / (2.0 * h);
    double d2v = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
    SigmaEval s = p.coeffs.sigma(x, dv);
    HamEval hm = p.coeffs.ham(j, x, v[j], dv);
    int row = j - 1;
    J.lower[row] = -s.dp * (-1.0 / (2.0 * h)) * d2v - s.value / (h * h) + hm.dp * (-1.0 / (2.0 * h));
    J.diag[row] = 2.0 * s.value / (h * h) + hm.du;
    J.upper[row] = -s.dp * (1.0 / (2.0 * h)) * d2v - s.value / (h * h) + hm.dp * (1.0 / (2.0 * h));
  }
  return J;
}

Tridiag fd_jacobian(const EdgeProblem& p, std::vector<double>& v, const std::vector<double>& r0) {
  const int n = p.nodes;
  Tridiag J;
  J.lower.assign(n - 2, 0.0);
  J.diag.assign(n - 2, 0.0);
  J.upper.assign(n - 2, 0.0);
  const double h = p.spacing();
  for (int j = 1; j <= n - 2; ++j) {
    double step = 1e-7 * (1.0 + std::abs(v[j]));
    double saved = v[j];
    v[j] = saved + step;
    // residual rows touched by v_j: j-1, j, j+1
    for (int row = std::max(1, j - 1); row <= std::min(n - 2, j + 1); ++row) {
      double x = row * h;
      double dv = (v[row + 1] - v[row - 1]) / (2.0 * h);
      double d2v = (v[row + 1] - 2.0 * v[row] + v[row - 1]) / (h * h);
      double rj = -p.coeffs.sigma(x, dv).value * d2v + p.coeffs.ham(row, x, v[row], dv).value;
      double deriv = (rj - r0[row - 1]) / step;
      if (row == j - 1)
        J.upper[row - 1] = deriv;
      else if (row == j)
        J.diag[row - 1] = deriv;
      else
        J.lower[row - 1] = deriv;
    }
    v[j] = saved;
  }
  return J;
}

EdgeSolution newton_attempt(const EdgeProblem& p, const EdgeSolveOptions& opts,
                            std::vector<double> v) {
  EdgeSolution sol;
  std::vector<double> r = assemble_residual(p, v);
  double rn = scaled_sup(r, v);
  sol.residual_history.push_back(rn);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (rn <= opts.tol) {
      sol.converged = true;
      sol.status = EdgeStatus::Converged;
      break;
    }
    Tridiag J = opts.jacobian == EdgeSolveOptions::Jacobian::Analytic
                    ? analytic_jacobian(p, v)
                    : fd_jacobian(p, v, r);
    std::vector<double> delta(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) delta[i] = -r[i];
    if (!thomas_solve(J.lower, J.diag, J.upper, delta)) {
      sol.status = EdgeStatus::SingularJacobian;
      break;
    }

    double step = 1.0;
    bool accepted = false;
    std::vector<double> trial(v);
    std::vector<double> r_trial;
    double rn_trial = 0.0;
    const int max_halvings = opts.damping ? 40 : 0;
    for (int halving = 0; halving <= max_halvings; ++halving) {
      for (std::size_t i = 0; i < delta.size(); ++i) trial[i + 1] = v[i + 1] + step * delta[i];
      bool eval_ok = true;
      try {
        r_trial = assemble_residual(p, trial);
      } catch (const EvalError&) {
        eval_ok = false;  // step left the coefficient domain; shrink
        if (!opts.damping) throw;
      }
      if (eval_ok) {
        rn_trial = scaled_sup(r_trial, trial);
        if (rn_trial < rn || !opts.damping) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    ++sol.newton_iterations;
    if (!accepted) {
      sol.status = EdgeStatus::LineSearchStalled;
      break;
    }
    v.swap(trial);
    r.swap(r_trial);
    rn = rn_trial;
    sol.residual_history.push_back(rn);
  }

  if (!sol.converged && rn <= opts.tol) {
    sol.converged = true;
    sol.status = EdgeStatus::Converged;
  }
  sol.values = std::move(v);
  sol.residual_sup = rn;
  return sol;
}

}  // namespace

std::vector<double> assemble_residual(const EdgeProblem& p, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != p.nodes) throw ConfigError("node value count mismatch");
  const int n = p.nodes;
  const double h = p.spacing();
  std::vector<double> r(n - 2);
  for (int j = 1; j <= n - 2; ++j) {
    double x = j * h;
    double dv = (v[j + 1] - v[j - 1]) / (2.0 * h);
    double d2v = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
    try {
      r[j - 1] = -p.coeffs.sigma(x, dv).value * d2v + p.coeffs.ham(j, x, v[j], dv).value;
    } catch (const EvalError& e) {
      throw EvalError("coefficient evaluation failed at node " + std::to_string(j) + ": " +
                      e.what());
    }
  }
  return r;
}

EdgeSolution solve_dirichlet_edge(const EdgeProblem& p, const EdgeSolveOptions& opts) {
  if (p.nodes < 3) throw ConfigError("edge grid needs at least 3 nodes");
  std::vector<double> v;
  if (opts.initial) {
    if (static_cast<int>(opts.initial->size()) != p.nodes)
      throw ConfigError("warm start size mismatch");
    v = *opts.initial;
    v[0] = p.left_value;
    v[p.nodes - 1] = p.right_value;
  } else {
    v.resize(p.nodes);
    for (int j = 0; j < p.nodes; ++j) {
      double s = static_cast<double>(j) / (p.nodes - 1);
      v[j] = (1.0 - s) * p.left_value + s * p.right_value;
    }
  }

  EdgeSolution sol = newton_attempt(p, opts, v);
  if (sol.converged || !opts.continuation) return sol;

  // Homotopy in the vertex-side value, warm starting each stage.
  EdgeProblem staged = p;
  std::vector<double> warm;
  for (int stage = 1; stage <= 4; ++stage) {
    double s = stage / 4.0;
    staged.left_value = (1.0 - s) * p.right_value + s * p.left_value;
    EdgeSolveOptions stage_opts = opts;
    stage_opts.continuation = false;
    stage_opts.initial = warm.empty() ? nullptr : &warm;
    EdgeSolution stage_sol = solve_dirichlet_edge(staged, stage_opts);
    if (!stage_sol.converged) return sol;  // report the direct attempt
    warm = stage_sol.values;
    if (stage == 4) {
      stage_sol.newton_iterations += sol.newton_iterations;
      return stage_sol;
    }
  }
  return sol;
}

}  // namespace starpde
