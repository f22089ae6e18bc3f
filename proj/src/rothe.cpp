#include "starpde/rothe.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace starpde {

// ---------------------------------------------------------------------------
// SnapshotStore
// ---------------------------------------------------------------------------

SnapshotStore::SnapshotStore(JunctionGrid grid, bool in_memory, std::string path)
    : grid_(std::move(grid)), in_memory_(in_memory), path_(std::move(path)) {
  record_doubles_ = 1;  // vertex value
  for (int n : grid_.nodes_per_edge) record_doubles_ += static_cast<std::size_t>(n - 1);
  if (!in_memory_) {
    if (path_.empty()) throw ConfigError("spill mode needs a spill_path");
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open spill file " + path_);
  }
}

SnapshotStore::~SnapshotStore() {
  if (!in_memory_ && !path_.empty()) std::remove(path_.c_str());
}

void SnapshotStore::append(const GridFunction& u) {
  if (in_memory_) {
    mem_.push_back(u);
  } else {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    std::vector<double> rec;
    rec.reserve(record_doubles_);
    rec.push_back(u.vertex_value());
    for (int i = 0; i < u.num_edges(); ++i)
      for (int j = 1; j < u.nodes(i); ++j) rec.push_back(u.at(i, j));
    out.write(reinterpret_cast<const char*>(rec.data()),
              static_cast<std::streamsize>(rec.size() * sizeof(double)));
    if (!out) throw ConfigError("failed writing spill file " + path_);
  }
  ++count_;
}

GridFunction SnapshotStore::load(int k) const {
  if (k < 0 || k >= count_) throw ConfigError("snapshot index out of range");
  if (in_memory_) return mem_[static_cast<std::size_t>(k)];
  std::ifstream in(path_, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(k) *
           static_cast<std::streamoff>(record_doubles_ * sizeof(double)));
  std::vector<double> rec(record_doubles_);
  in.read(reinterpret_cast<char*>(rec.data()),
          static_cast<std::streamsize>(rec.size() * sizeof(double)));
  if (!in) throw ConfigError("failed reading spill file " + path_);
  GridFunction u(grid_);
  std::size_t at = 0;
  u.set_vertex_value(rec[at++]);
  for (int i = 0; i < u.num_edges(); ++i)
    for (int j = 1; j < u.nodes(i); ++j) u.set(i, j, rec[at++]);
  return u;
}

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

GridFunction sample_initial(const ProblemSpec& p, const JunctionGrid& grid) {
  GridFunction u(grid);
  u.set_vertex_value(p.initial[0].initial(0.0));
  for (int i = 0; i < p.num_edges(); ++i)
    for (int j = 1; j < grid.nodes_per_edge[i]; ++j)
      u.set(i, j, p.initial[i].initial(grid.node_x(i, j)));
  return u;
}

double initial_elliptic_load(const ProblemSpec& p, const JunctionGrid& grid) {
  double m0 = 0.0;
  for (int i = 0; i < p.num_edges(); ++i) {
    const int n = grid.nodes_per_edge[i];
    const double h = grid.spacing[i];
    std::vector<double> g(n);
    for (int j = 0; j < n; ++j) g[j] = p.initial[i].initial(j * h);
    double load = 0.0;
    for (int j = 1; j <= n - 2; ++j) {
      double dg = (g[j + 1] - g[j - 1]) / (2.0 * h);
      double d2g = (g[j + 1] - 2.0 * g[j] + g[j - 1]) / (h * h);
      double x = j * h;
      double r = -p.sigma[i].sigma(x, dg) * d2g + p.ham_eff(i, 0.0, x, g[j], dg);
      load = std::max(load, std::abs(r));
    }
    double dphi = 0.0;
    const int samples = 1024;
    double ht = p.horizon / samples;
    for (int s = 1; s < samples; ++s) {
      double t = s * ht;
      dphi = std::max(dphi, std::abs(p.outer_boundary[i].outer(t + ht) -
                                     p.outer_boundary[i].outer(t - ht)) /
                                (2.0 * ht));
    }
    m0 = std::max(m0, load + dphi);
  }
  return m0;
}

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------

namespace {

// Elliptic problem of step k: Hamiltonian augmented by (u - u_prev)/dt.
EllipticProblem augmented_problem(const ProblemSpec& p, const GridFunction& u_prev, double t_k,
                                  double dt, const JunctionGrid& grid) {
  EllipticProblem ep = elliptic_from_spec(p, grid, t_k);
  for (int i = 0; i < p.num_edges(); ++i) {
    auto base = ep.coeffs[i].ham;
    std::vector<double> prev = u_prev.edge_nodes(i);
    double h = grid.spacing[i];
    ep.coeffs[i].ham = [base, prev, h, dt](int node, double x, double u, double q) {
      double up;
      if (node >= 0) {
        up = prev[static_cast<std::size_t>(node)];
      } else {
        // off-grid probe (bracket sampling): interpolate u_prev linearly
        double s = x / h;
        int j = std::min(static_cast<int>(s), static_cast<int>(prev.size()) - 2);
        if (j < 0) j = 0;
        double lam = s - j;
        up = (1.0 - lam) * prev[static_cast<std::size_t>(j)] +
             lam * prev[static_cast<std::size_t>(j + 1)];
      }
      HamEval out = base(node, x, u, q);
      out.value += (u - up) / dt;
      out.du += 1.0 / dt;
      return out;
    };
    ep.outer_values[i] = p.outer_boundary[i].outer(t_k);
  }
  return ep;
}

void check_config(const ProblemSpec& p, const RotheConfig& cfg) {
  p.check_shape();
  if (cfg.steps < 2) throw ConfigError("the scheme needs at least 2 time steps");
  if (cfg.steps <= p.envelope.c_h * p.horizon)
    throw ConfigError("the scheme needs n > C_H * T (got n = " + std::to_string(cfg.steps) + ")");
}

}  // namespace

EllipticSolution rothe_step(const ProblemSpec& p, const GridFunction& u_prev, int k,
                            const RotheConfig& cfg) {
  check_config(p, cfg);
  const double dt = p.horizon / cfg.steps;
  const double t_k = k * dt;
  EllipticProblem ep = augmented_problem(p, u_prev, t_k, dt, u_prev.grid());
  double rate = 1.0 / dt - p.envelope.c_h;
  return solve_elliptic_junction(ep, p.envelope.root_b, p.envelope.root_B, rate, cfg.elliptic);
}

ParabolicSolution solve_parabolic(const ProblemSpec& p, const RotheConfig& cfg) {
  check_config(p, cfg);
  CompatibilityReport compat = compatibility_check(p, cfg.compat_tol);
  if (!compat.ok)
    throw ConfigError("initial data fails the compatibility conditions:\n" + compat.to_text());

  JunctionGrid grid = build_grid(p.junction, cfg.nodes_per_edge);
  const double dt = p.horizon / cfg.steps;
  const double m0 = initial_elliptic_load(p, grid);

  ParabolicSolution sol;
  sol.horizon = p.horizon;
  sol.steps = cfg.steps;
  sol.snapshots = std::make_shared<SnapshotStore>(grid, cfg.keep_in_memory, cfg.spill_path);

  GridFunction u_prev = sample_initial(p, grid);
  sol.snapshots->append(u_prev);

  double theta_prev = u_prev.vertex_value();
  double dtheta_prev = 0.0;
  double rate = 1.0 / dt - p.envelope.c_h;

  for (int k = 1; k <= cfg.steps; ++k) {
    EllipticProblem ep = augmented_problem(p, u_prev, k * dt, dt, grid);
    EllipticOptions opts = cfg.elliptic;
    // the time-difference bound caps the per-step motion of theta*, so try
    // a local bracket around the previous vertex value first.
    double w = std::max(10.0 * opts.theta_tol, 2.0 * std::abs(dtheta_prev) + dt * m0);
    opts.bracket = ThetaBracket{theta_prev - w, theta_prev + w};

    EllipticSolution step;
    bool ok = false;
    try {
      step = solve_elliptic_junction(ep, p.envelope.root_b, p.envelope.root_B, rate, opts);
      ok = step.converged;
    } catch (const BracketError&) {
      ok = false;
    } catch (const SolveError&) {
      ok = false;
    }
    if (!ok) {
      opts.bracket.reset();  // global fallback bracket
      try {
        step = solve_elliptic_junction(ep, p.envelope.root_b, p.envelope.root_B, rate, opts);
      } catch (const std::runtime_error& e) {
        sol.failed_step = k;
        sol.message = std::string("step ") + std::to_string(k) + ": " + e.what();
        return sol;
      }
      if (!step.converged) {
        sol.failed_step = k;
        sol.message = "step " + std::to_string(k) + ": " + step.message;
        return sol;
      }
    }

    StepDiagnostics diag;
    diag.theta_star = step.theta_star;
    diag.f_residual = step.f_residual;
    diag.f_tol_effective = step.f_tol_effective;
    diag.bisection_iterations = step.bisection_iterations;
    for (const EdgeSolution& es : step.edge_solutions) diag.newton_iterations += es.newton_iterations;
    sol.diagnostics.push_back(diag);

    dtheta_prev = step.theta_star - theta_prev;
    theta_prev = step.theta_star;
    u_prev = step.solution;
    sol.snapshots->append(u_prev);
  }
  sol.completed = true;
  return sol;
}

double interpolant_eval(const ParabolicSolution& sol, double t, double x, int edge) {
  const double T = sol.horizon;
  const double slack = 1e-12 * (1.0 + T);
  if (t < -slack || t > T + slack) throw ConfigError("interpolant time out of range");
  const JunctionGrid& grid = sol.grid();
  if (edge < 0 || edge >= grid.junction.num_edges) throw ConfigError("edge index out of range");
  double a = grid.junction.lengths[edge];
  if (x < -1e-12 * (1.0 + a) || x > a * (1.0 + 1e-12)) throw ConfigError("interpolant x out of range");
  t = std::clamp(t, 0.0, T);
  x = std::clamp(x, 0.0, a);

  double dt = sol.dt();
  int k = std::min(static_cast<int>(t / dt), sol.steps - 1);
  double lam_t = (t - k * dt) / dt;

  double h = grid.spacing[edge];
  int n = grid.nodes_per_edge[edge];
  int j = std::min(static_cast<int>(x / h), n - 2);
  double lam_x = x / h - j;

  GridFunction uk = sol.snapshot(k);
  GridFunction uk1 = sol.snapshot(k + 1);
  double vk = (1.0 - lam_x) * uk.at(edge, j) + lam_x * uk.at(edge, j + 1);
  double vk1 = (1.0 - lam_x) * uk1.at(edge, j) + lam_x * uk1.at(edge, j + 1);
  return (1.0 - lam_t) * vk + lam_t * vk1;
}

// ---------------------------------------------------------------------------
// Truncation study
// ---------------------------------------------------------------------------

std::string TruncationReport::to_text() const {
  std::ostringstream os;
  os << "truncation study: " << (pass ? "PASS" : "FAIL") << "\n";
  for (std::size_t i = 0; i < distances.size(); ++i)
    os << "  sup-distance a=" << lengths[i] << " vs a=" << lengths[i + 1] << ": " << distances[i]
       << "\n";
  return os.str();
}

TruncationReport truncation_study(const ProblemSpec& p, const std::vector<double>& lengths_ladder,
                                  double window, const RotheConfig& cfg) {
  if (lengths_ladder.size() < 2) throw ConfigError("the ladder needs at least 2 lengths");
  for (std::size_t i = 1; i < lengths_ladder.size(); ++i)
    if (lengths_ladder[i] <= lengths_ladder[i - 1])
      throw ConfigError("the length ladder must be strictly increasing");
  if (!(window > 0.0) || window > lengths_ladder.front())
    throw ConfigError("window must lie inside the shortest truncation");

  TruncationReport rep;
  rep.lengths = lengths_ladder;

  char buf[40];
  std::vector<ParabolicSolution> runs;
  for (double a : lengths_ladder) {
    ProblemSpec truncated = p;
    truncated.junction = build_junction(p.num_edges(), std::vector<double>(p.num_edges(), a));
    truncated.outer_boundary.clear();
    for (int i = 0; i < p.num_edges(); ++i) {
      // far Dirichlet value frozen in time at g_i(a)
      std::snprintf(buf, sizeof(buf), "%.17g", p.initial[i].initial(a));
      truncated.outer_boundary.push_back(
          Coefficient::parse(buf, CoeffKind::OuterBoundary, p.num_edges()));
    }
    RotheConfig run_cfg = cfg;
    run_cfg.nodes_per_edge =
        std::max(3, static_cast<int>(std::lround(a * (cfg.nodes_per_edge - 1))) + 1);
    runs.push_back(solve_parabolic(truncated, run_cfg));
    if (!runs.back().completed)
      throw SolveError("truncation run at a = " + std::to_string(a) +
                       " failed: " + runs.back().message);
  }

  // Common sample lattice on [0, window] x [0, T].
  const int nx = std::max(2, static_cast<int>(std::lround(window * (cfg.nodes_per_edge - 1))) + 1);
  for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
    double d = 0.0;
    for (int k = 0; k <= cfg.steps; ++k) {
      double t = runs[r].time(k);
      for (int i = 0; i < p.num_edges(); ++i)
        for (int q = 0; q < nx; ++q) {
          double x = window * q / (nx - 1);
          d = std::max(d, std::abs(interpolant_eval(runs[r], t, x, i) -
                                   interpolant_eval(runs[r + 1], t, x, i)));
        }
    }
    rep.distances.push_back(d);
  }

  rep.pass = true;
  for (std::size_t i = 1; i < rep.distances.size(); ++i)
    if (rep.distances[i] > rep.distances[i - 1] * (1.0 + 1e-9) + 1e-15) rep.pass = false;
  return rep;
}

}  // namespace starpde
