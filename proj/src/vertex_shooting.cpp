#include "starpde/vertex_shooting.hpp"

#include <cmath>
#include <future>
#include <sstream>

namespace starpde {

EllipticProblem elliptic_from_spec(const ProblemSpec& p, const JunctionGrid& grid, double t) {
  p.check_shape();
  EllipticProblem ep;
  ep.grid = grid;
  const int I = p.num_edges();
  ep.coeffs.reserve(I);
  for (int i = 0; i < I; ++i) {
    EdgeCoefficients c = plain_edge_coefficients(p.sigma[i], p.hamiltonian[i]);
    if (p.forcing) {
      Coefficient f = (*p.forcing)[i];
      auto base = c.ham;
      c.ham = [base, f, t](int node, double x, double u, double q) {
        HamEval h = base(node, x, u, q);
        h.value -= f.forcing(t, x);
        return h;
      };
    }
    ep.coeffs.push_back(std::move(c));
    ep.outer_values.push_back(p.outer_boundary[i].outer(t));
  }
  Coefficient F = p.vertex_condition;
  ep.vertex_condition = [F](double u, std::span<const double> flux) { return F.vertex(u, flux); };
  return ep;
}

ThetaBracket theta_bracket(const EllipticProblem& ep, double root_b,
                           std::span<const double> root_B, double rate) {
  const int I = ep.grid.junction.num_edges;
  if (static_cast<int>(root_B.size()) != I)
    throw ConfigError(
        "theta_bracket needs a root pair (b, B) with F(b, B) = 0; supply envelope.root_b and "
        "envelope.root_B (one B per edge)");
  if (!(rate > 0.0)) throw ConfigError("theta_bracket needs a positive monotonicity rate");

  double hi = std::abs(root_b);
  double worst = 0.0;
  for (int i = 0; i < I; ++i) {
    double a = ep.grid.junction.lengths[i];
    double k_i = 0.0;
    for (int s = 0; s <= 1024; ++s) {
      double x = a * s / 1024.0;
      k_i = std::max(k_i, std::abs(ep.coeffs[i].ham(-1, x, root_B[i] * x, root_B[i]).value));
    }
    k_i *= 1.1;  // finite sampling can undershoot the sup
    double term = std::abs(ep.outer_values[i]) + std::abs(a * root_B[i]) + (k_i > 0.0 ? k_i / rate : 0.0);
    worst = std::max(worst, term);
  }
  hi += worst;

  ThetaBracket b{-hi, hi};
  if (b.hi - b.lo < 0.2) {
    double c = 0.5 * (b.lo + b.hi);
    b = ThetaBracket{c - 0.1, c + 0.1};
  }
  return b;
}

ThetaBracket theta_bracket(const ProblemSpec& p, const JunctionGrid& grid, double t) {
  if (static_cast<int>(p.envelope.root_B.size()) != p.num_edges())
    throw ConfigError(
        "theta_bracket needs a root pair (b, B) with F(b, B) = 0; supply envelope.root_b and "
        "envelope.root_B (one B per edge)");
  EllipticProblem ep = elliptic_from_spec(p, grid, t);
  return theta_bracket(ep, p.envelope.root_b, p.envelope.root_B, p.envelope.c_h);
}

ShootResult shoot(const EllipticProblem& ep, double theta, const EdgeSolveOptions& edge_opts,
                  const std::vector<EdgeSolution>* warm) {
  const int I = ep.grid.junction.num_edges;
  ShootResult res;
  res.vertex_value = theta;
  res.edges.resize(I);

  auto solve_edge = [&](int i) {
    EdgeProblem prob;
    prob.length = ep.grid.junction.lengths[i];
    prob.nodes = ep.grid.nodes_per_edge[i];
    prob.left_value = theta;
    prob.right_value = ep.outer_values[i];
    prob.coeffs = ep.coeffs[i];
    EdgeSolveOptions opts = edge_opts;
    if (warm && static_cast<int>(warm->size()) == I && !(*warm)[i].values.empty())
      opts.initial = &(*warm)[i].values;
    EdgeSolution sol = solve_dirichlet_edge(prob, opts);
    if (!sol.converged && opts.initial) {
      // a stale warm start can strand Newton; the linear-interpolant start
      // must get its chance before the solve counts as diverged
      opts.initial = nullptr;
      sol = solve_dirichlet_edge(prob, opts);
    }
    return sol;
  };

  if (I == 1) {
    res.edges[0] = solve_edge(0);
  } else {
    std::vector<std::future<EdgeSolution>> futures;
    futures.reserve(I);
    for (int i = 0; i < I; ++i)
      futures.push_back(std::async(std::launch::async, solve_edge, i));
    for (int i = 0; i < I; ++i) res.edges[i] = futures[i].get();
  }

  res.flux.resize(I);
  for (int i = 0; i < I; ++i) {
    const EdgeSolution& es = res.edges[i];
    if (!es.converged) {
      std::ostringstream os;
      os << "edge " << i + 1 << " solve failed (" << edge_status_name(es.status)
         << ", residual " << es.residual_sup << ") at theta = " << theta;
      throw SolveError(os.str());
    }
    double h = ep.grid.spacing[i];
    res.flux[i] = (-3.0 * es.values[0] + 4.0 * es.values[1] - es.values[2]) / (2.0 * h);
  }
  res.f_value = ep.vertex_condition(theta, res.flux);
  return res;
}

namespace {

GridFunction assemble(const EllipticProblem& ep, const ShootResult& shot) {
  GridFunction u(ep.grid);
  u.set_vertex_value(shot.vertex_value);
  for (int i = 0; i < ep.grid.junction.num_edges; ++i) u.set_edge_nodes(i, shot.edges[i].values);
  return u;
}

}  // namespace

EllipticSolution solve_elliptic_junction(const EllipticProblem& ep, double root_b,
                                         std::span<const double> root_B, double rate,
                                         const EllipticOptions& opts) {
  ThetaBracket br = opts.bracket ? *opts.bracket : theta_bracket(ep, root_b, root_B, rate);

  ShootResult lo_shot = shoot(ep, br.lo, opts.edge);
  ShootResult hi_shot = shoot(ep, br.hi, opts.edge, &lo_shot.edges);
  // The proof's orientation: F(theta_lo) >= 0 >= F(theta_hi).
  for (int expand = 0; lo_shot.f_value * hi_shot.f_value > 0.0; ++expand) {
    if (expand >= 8) {
      std::ostringstream os;
      os << "SIGN_BRACKET_FAILED: F has the same sign at both bracket ends after 8 doublings; "
         << "F(" << br.lo << ") = " << lo_shot.f_value << ", F(" << br.hi
         << ") = " << hi_shot.f_value;
      throw BracketError(os.str(), lo_shot.f_value, hi_shot.f_value);
    }
    double mid = 0.5 * (br.lo + br.hi);
    double half = (br.hi - br.lo);  // doubled width
    br = ThetaBracket{mid - half, mid + half};
    lo_shot = shoot(ep, br.lo, opts.edge, &lo_shot.edges);
    hi_shot = shoot(ep, br.hi, opts.edge, &hi_shot.edges);
  }

  EllipticSolution sol;
  sol.initial_bracket = br;
  sol.f_tol_effective = opts.f_tol * (1.0 + std::abs(lo_shot.f_value) + std::abs(hi_shot.f_value));

  double sign_lo = lo_shot.f_value >= 0.0 ? 1.0 : -1.0;
  double lo = br.lo, hi = br.hi;
  ShootResult best;
  if (lo_shot.f_value == 0.0) {
    best = lo_shot;
  } else if (hi_shot.f_value == 0.0) {
    best = hi_shot;
  } else {
    // endpoints only bracket the root; iterate from the midpoint so the
    // returned theta converges to the sign change, not to a bracket end
    best = shoot(ep, 0.5 * (lo + hi), opts.edge, &lo_shot.edges);
    ++sol.bisection_iterations;
    ShootResult last_mid = best;
    for (;;) {
      if ((last_mid.f_value >= 0.0 ? 1.0 : -1.0) == sign_lo)
        lo = last_mid.vertex_value;
      else
        hi = last_mid.vertex_value;
      if (std::abs(best.f_value) <= sol.f_tol_effective || hi - lo <= opts.theta_tol ||
          sol.bisection_iterations >= opts.max_bisections)
        break;
      last_mid = shoot(ep, 0.5 * (lo + hi), opts.edge, &last_mid.edges);
      ++sol.bisection_iterations;
      if (std::abs(last_mid.f_value) <= std::abs(best.f_value)) best = last_mid;
    }
  }

  sol.theta_star = best.vertex_value;
  sol.vertex_flux = best.flux;
  sol.f_residual = std::abs(best.f_value);
  sol.converged = sol.f_residual <= sol.f_tol_effective;
  sol.solution = assemble(ep, best);
  sol.edge_solutions = std::move(best.edges);
  if (!sol.converged) {
    std::ostringstream os;
    os << "bisection stopped with |F| = " << sol.f_residual << " > " << sol.f_tol_effective
       << " (bracket width " << hi - lo << ")";
    sol.message = os.str();
  }
  return sol;
}

EllipticSolution solve_elliptic_junction(const ProblemSpec& p, const JunctionGrid& grid,
                                         const EllipticOptions& opts, double t) {
  EllipticProblem ep = elliptic_from_spec(p, grid, t);
  return solve_elliptic_junction(ep, p.envelope.root_b, p.envelope.root_B, p.envelope.c_h, opts);
}

}  // namespace starpde
