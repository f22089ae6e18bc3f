#include "starpde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace starpde {

// ---------------------------------------------------------------------------
// Holder seminorms (pair separation <= 1 throughout)
// ---------------------------------------------------------------------------

SpaceTimeSamples samples_from_solution(const ParabolicSolution& sol, int edge) {
  SpaceTimeSamples s;
  const JunctionGrid& grid = sol.grid();
  const int n = grid.nodes_per_edge[edge];
  for (int j = 0; j < n; ++j) s.coords.push_back(grid.node_x(edge, j));
  for (int k = 0; k <= sol.steps; ++k) {
    s.times.push_back(sol.time(k));
    GridFunction u = sol.snapshot(k);
    std::vector<double> row(n);
    for (int j = 0; j < n; ++j) row[j] = u.at(edge, j);
    s.values.push_back(std::move(row));
  }
  return s;
}

namespace {

void check_samples(const SpaceTimeSamples& f) {
  if (f.times.empty() || f.coords.empty() || f.values.empty())
    throw ConfigError("empty sample set");
  if (f.values.size() != f.times.size()) throw ConfigError("sample row count mismatch");
  for (const auto& row : f.values)
    if (row.size() != f.coords.size()) throw ConfigError("sample column count mismatch");
}

}  // namespace

double holder_seminorm_x(const SpaceTimeSamples& f, double alpha) {
  check_samples(f);
  if (!(alpha > 0.0) || alpha > 1.0) throw ConfigError("alpha must lie in (0, 1]");
  double sup = 0.0;
  const std::size_t nx = f.coords.size();
  for (const auto& row : f.values)
    for (std::size_t j = 0; j < nx; ++j)
      for (std::size_t l = j + 1; l < nx; ++l) {
        double sep = std::abs(f.coords[l] - f.coords[j]);
        if (sep == 0.0 || sep > 1.0) continue;
        sup = std::max(sup, std::abs(row[l] - row[j]) / std::pow(sep, alpha));
      }
  return sup;
}

double holder_seminorm_t(const SpaceTimeSamples& f, double alpha) {
  check_samples(f);
  if (!(alpha > 0.0) || alpha > 1.0) throw ConfigError("alpha must lie in (0, 1]");
  double sup = 0.0;
  const std::size_t nt = f.times.size();
  for (std::size_t j = 0; j < f.coords.size(); ++j)
    for (std::size_t k = 0; k < nt; ++k)
      for (std::size_t l = k + 1; l < nt; ++l) {
        double sep = std::abs(f.times[l] - f.times[k]);
        if (sep == 0.0 || sep > 1.0) continue;
        sup = std::max(sup, std::abs(f.values[l][j] - f.values[k][j]) / std::pow(sep, alpha));
      }
  return sup;
}

SpaceTimeSamples derivative_x(const SpaceTimeSamples& f) {
  check_samples(f);
  const std::size_t nx = f.coords.size();
  if (nx < 3) throw ConfigError("x-derivative needs at least 3 sample columns");
  SpaceTimeSamples d;
  d.times = f.times;
  d.coords = f.coords;
  d.values.reserve(f.values.size());
  for (const auto& row : f.values) {
    std::vector<double> dr(nx);
    dr[0] = (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (f.coords[2] - f.coords[0]);
    dr[nx - 1] = (3.0 * row[nx - 1] - 4.0 * row[nx - 2] + row[nx - 3]) /
                 (f.coords[nx - 1] - f.coords[nx - 3]);
    for (std::size_t j = 1; j + 1 < nx; ++j)
      dr[j] = (row[j + 1] - row[j - 1]) / (f.coords[j + 1] - f.coords[j - 1]);
    d.values.push_back(std::move(dr));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Interpolation constant (time regularity of dx u)
// ---------------------------------------------------------------------------

double interpolation_bound(double nu1, double nu2, double gamma) {
  if (!(nu1 > 0.0) || !(nu2 > 0.0) || !(gamma > 0.0) || gamma > 1.0)
    throw ConfigError("interpolation_bound needs nu1, nu2 > 0 and gamma in (0, 1]");
  double ratio = nu1 / (gamma * nu2);
  return 2.0 * nu2 * std::pow(ratio, gamma / (1.0 + gamma)) +
         2.0 * nu1 * std::pow(ratio, 1.0 / (1.0 + gamma));
}

InterpolationCheck check_interpolation(const SpaceTimeSamples& f, double alpha, double gamma) {
  InterpolationCheck c;
  c.exponent = alpha * gamma / (1.0 + gamma);
  SpaceTimeSamples df = derivative_x(f);
  c.nu1 = holder_seminorm_t(f, alpha);
  c.nu2 = holder_seminorm_x(df, gamma);
  c.measured = holder_seminorm_t(df, c.exponent);
  if (c.nu1 == 0.0) {
    c.bound = 0.0;  // f constant in t, so is dx f
  } else if (c.nu2 == 0.0) {
    c.bound = std::numeric_limits<double>::infinity();
  } else {
    c.bound = interpolation_bound(c.nu1, c.nu2, gamma);
  }
  c.pass = c.measured <= c.bound;
  return c;
}

// ---------------------------------------------------------------------------
// time-difference recursion monitor
// ---------------------------------------------------------------------------

std::vector<double> time_difference_recursion(double c_h, double horizon, int steps, double m0) {
  double c_tilde = c_h * horizon;
  if (steps <= c_tilde)
    throw ConfigError("the time-difference recursion needs n > C_H * T");
  std::vector<double> table(static_cast<std::size_t>(steps) + 1);
  table[0] = m0;
  double factor = steps / (steps - c_tilde);
  for (int k = 1; k <= steps; ++k) table[static_cast<std::size_t>(k)] = factor * table[k - 1];
  return table;
}

TimeDifferenceReport time_difference_bound(const ParabolicSolution& sol, const ProblemSpec& p,
                                    double margin) {
  TimeDifferenceReport rep;
  rep.margin = margin;
  rep.steps = sol.steps;
  rep.c_tilde = p.envelope.c_h * sol.horizon;
  if (sol.steps <= rep.c_tilde)
    throw ConfigError("the time-difference bound needs n > C_H * T");
  rep.m0 = initial_elliptic_load(p, sol.grid());
  rep.recursion = time_difference_recursion(p.envelope.c_h, sol.horizon, sol.steps, rep.m0);
  rep.bound = rep.recursion.back();

  const double inv_dt = sol.steps / sol.horizon;
  GridFunction prev = sol.snapshot(0);
  // snapshots are only solver-tolerance accurate; the quotient amplifies
  // that by 1/dt
  rep.noise_floor = inv_dt * 1e-8 * (1.0 + sup_norm(prev));
  for (int k = 1; k < sol.snapshots->size(); ++k) {
    GridFunction cur = sol.snapshot(k);
    double sup = std::abs(cur.vertex_value() - prev.vertex_value());
    for (int i = 0; i < cur.num_edges(); ++i)
      for (int j = 1; j < cur.nodes(i); ++j)
        sup = std::max(sup, std::abs(cur.at(i, j) - prev.at(i, j)));
    rep.measured = std::max(rep.measured, inv_dt * sup);
    prev = cur;
  }
  rep.pass = rep.measured <= rep.bound * (1.0 + margin) + rep.noise_floor;
  rep.note = "scaled restatement: the recursion factor uses C_H * T in place of the unit-horizon C_H";
  return rep;
}

// ---------------------------------------------------------------------------
// Barrier construction (gradient bound at the vertex)
// ---------------------------------------------------------------------------

BarrierParams barrier_params(double m_bound, double mu_at_2m, double nu_lower, double min_length) {
  if (!(m_bound > 0.0) || !(nu_lower > 0.0) || !(min_length > 0.0) || mu_at_2m < 0.0)
    throw ConfigError("barrier_params needs M, nu_lower, min_length > 0 and mu >= 0");
  double beta = 0.0;
  for (double cand = 1.0; cand <= std::ldexp(1.0, 60); cand *= 2.0) {
    double need = mu_at_2m / nu_lower * (1.0 + 1.0 / (cand * cand)) +
                  m_bound / (nu_lower * cand * cand);
    if (cand >= need) {
      beta = cand;
      break;
    }
  }
  if (beta == 0.0)
    throw ConfigError("no beta <= 2^60 satisfies the barrier condition; envelope inconsistent");
  double e2bm = std::exp(2.0 * beta * m_bound);
  BarrierParams out;
  out.beta = beta;
  out.theta = beta * beta * e2bm + e2bm / min_length;
  out.kappa = (e2bm - 1.0) / out.theta;
  return out;
}

BarrierCheck verify_barrier(const ParabolicSolution& sol, const BarrierParams& params) {
  BarrierCheck c;
  c.params = params;
  c.pass = true;
  const JunctionGrid& grid = sol.grid();
  for (int k = 1; k < sol.snapshots->size(); ++k) {
    GridFunction u = sol.snapshot(k);
    double u0 = u.vertex_value();
    for (int i = 0; i < u.num_edges(); ++i)
      for (int j = 1; j < u.nodes(i); ++j) {
        double x = grid.node_x(i, j);
        if (x > params.kappa) break;
        double bump = std::log1p(params.theta * x) / params.beta;
        double upper_gap = (u0 + bump) - u.at(i, j);
        double lower_gap = u.at(i, j) - (u0 - bump);
        double gap = std::min(upper_gap, lower_gap);
        if (gap < c.worst_gap) {
          c.worst_gap = gap;
          std::ostringstream os;
          os << "snapshot " << k << ", edge " << i + 1 << ", x = " << x;
          c.witness = os.str();
        }
        if (gap < 0.0) c.pass = false;
      }
  }
  return c;
}

double barrier_bound_m(const ParabolicSolution& sol) {
  double m = 0.0;
  const double inv_dt = sol.steps / sol.horizon;
  GridFunction prev = sol.snapshot(0);
  m = sup_norm(prev);
  for (int k = 1; k < sol.snapshots->size(); ++k) {
    GridFunction cur = sol.snapshot(k);
    double diff = std::abs(cur.vertex_value() - prev.vertex_value());
    for (int i = 0; i < cur.num_edges(); ++i)
      for (int j = 1; j < cur.nodes(i); ++j)
        diff = std::max(diff, std::abs(cur.at(i, j) - prev.at(i, j)));
    m = std::max(m, sup_norm(cur) + inv_dt * diff);
    prev = cur;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Comparison and residuals
// ---------------------------------------------------------------------------

namespace {

bool same_grid(const JunctionGrid& a, const JunctionGrid& b) {
  return a.nodes_per_edge == b.nodes_per_edge &&
         a.junction.lengths == b.junction.lengths;
}

}  // namespace

ComparisonResult check_comparison(const GridFunction& sub, const GridFunction& super, double tol) {
  if (!same_grid(sub.grid(), super.grid())) throw ConfigError("comparison needs identical grids");
  ComparisonResult r;
  r.ordered = true;
  for (int i = 0; i < sub.num_edges(); ++i)
    for (int j = 0; j < sub.nodes(i); ++j) {
      double v = sub.at(i, j) - super.at(i, j);
      if (v > tol && v > r.max_violation) {
        if (r.ordered) {
          r.snapshot = 0;
          r.edge = i;
          r.node = j;
        }
        r.ordered = false;
        r.max_violation = v;
      }
    }
  return r;
}

ComparisonResult check_comparison(const ParabolicSolution& sub, const ParabolicSolution& super,
                                  double tol) {
  if (!same_grid(sub.grid(), super.grid()) || sub.steps != super.steps ||
      sub.horizon != super.horizon)
    throw ConfigError("comparison needs identical grids and time grids");
  ComparisonResult r;
  r.ordered = true;
  for (int k = 0; k < sub.snapshots->size(); ++k) {
    GridFunction a = sub.snapshot(k), b = super.snapshot(k);
    ComparisonResult rk = check_comparison(a, b, tol);
    if (!rk.ordered) {
      if (r.ordered) {
        r.snapshot = k;
        r.edge = rk.edge;
        r.node = rk.node;
      }
      r.ordered = false;
      r.max_violation = std::max(r.max_violation, rk.max_violation);
    }
  }
  return r;
}

double residual_norm(const GridFunction& u, const ProblemSpec& p, double t) {
  double sup = 0.0;
  const JunctionGrid& grid = u.grid();
  for (int i = 0; i < u.num_edges(); ++i) {
    const double h = grid.spacing[i];
    for (int j = 1; j < u.nodes(i) - 1; ++j) {
      double x = grid.node_x(i, j);
      double du = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * h);
      double d2u = (u.at(i, j + 1) - 2.0 * u.at(i, j) + u.at(i, j - 1)) / (h * h);
      double r = -p.sigma[i].sigma(x, du) * d2u + p.ham_eff(i, t, x, u.at(i, j), du);
      sup = std::max(sup, std::abs(r));
    }
  }
  return sup;
}

double residual_norm(const ParabolicSolution& sol, int k, const ProblemSpec& p) {
  if (k < 1 || k >= sol.snapshots->size())
    throw ConfigError("parabolic residual needs a snapshot index k >= 1");
  GridFunction u = sol.snapshot(k);
  GridFunction prev = sol.snapshot(k - 1);
  const double inv_dt = sol.steps / sol.horizon;
  const double t = sol.time(k);
  double sup = 0.0;
  const JunctionGrid& grid = u.grid();
  for (int i = 0; i < u.num_edges(); ++i) {
    const double h = grid.spacing[i];
    for (int j = 1; j < u.nodes(i) - 1; ++j) {
      double x = grid.node_x(i, j);
      double du = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * h);
      double d2u = (u.at(i, j + 1) - 2.0 * u.at(i, j) + u.at(i, j - 1)) / (h * h);
      double r = inv_dt * (u.at(i, j) - prev.at(i, j)) - p.sigma[i].sigma(x, du) * d2u +
                 p.ham_eff(i, t, x, u.at(i, j), du);
      sup = std::max(sup, std::abs(r));
    }
  }
  return sup;
}

Prop44Observation prop44_observe(const ParabolicSolution& sol) {
  Prop44Observation ob;
  const JunctionGrid& grid = sol.grid();
  const double inv_dt = sol.steps / sol.horizon;
  GridFunction prev = sol.snapshot(0);
  for (int k = 0; k < sol.snapshots->size(); ++k) {
    GridFunction u = sol.snapshot(k);
    ob.sup_u = std::max(ob.sup_u, sup_norm(u));
    for (int i = 0; i < u.num_edges(); ++i) {
      const double h = grid.spacing[i];
      for (int j = 0; j < u.nodes(i); ++j)
        ob.sup_du = std::max(ob.sup_du, std::abs(node_derivative(u, i, j)));
      for (int j = 1; j < u.nodes(i) - 1; ++j) {
        double d2u = (u.at(i, j + 1) - 2.0 * u.at(i, j) + u.at(i, j - 1)) / (h * h);
        ob.sup_d2u = std::max(ob.sup_d2u, std::abs(d2u));
      }
    }
    if (k >= 1) {
      double diff = std::abs(u.vertex_value() - prev.vertex_value());
      for (int i = 0; i < u.num_edges(); ++i)
        for (int j = 1; j < u.nodes(i); ++j)
          diff = std::max(diff, std::abs(u.at(i, j) - prev.at(i, j)));
      ob.time_quotient = std::max(ob.time_quotient, inv_dt * diff);
    }
    prev = u;
  }
  return ob;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

bool EstimateReport::has_fail() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const EstimateEntry& e) { return e.verdict == Verdict::Fail; });
}

std::string EstimateReport::to_text() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << "[" << verdict_name(e.verdict) << "] " << e.lemma << ": measured " << e.measured
       << ", bound " << e.bound << " (margin " << e.margin << ")\n";
    for (const auto& w : e.witnesses) os << "    " << w << "\n";
  }
  return os.str();
}

std::string EstimateReport::to_json() const {
  nlohmann::json root = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json j;
    j["lemma"] = e.lemma;
    j["measured"] = e.measured;
    j["bound"] = e.bound;
    j["margin"] = e.margin;
    j["verdict"] = verdict_name(e.verdict);
    j["witnesses"] = e.witnesses;
    root.push_back(j);
  }
  return root.dump(2);
}

}  // namespace starpde
