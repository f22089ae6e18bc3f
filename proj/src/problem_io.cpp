#include "starpde/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace starpde {

using nlohmann::json;

namespace {

const json& need(const json& j, const char* key, const std::string& pointer) {
  if (!j.contains(key)) throw SchemaError(pointer + "/" + key, "missing required key");
  return j.at(key);
}

double need_number(const json& j, const char* key, const std::string& pointer) {
  const json& v = need(j, key, pointer);
  if (!v.is_number()) throw SchemaError(pointer + "/" + key, "expected a number");
  return v.get<double>();
}

int need_int(const json& j, const char* key, const std::string& pointer) {
  const json& v = need(j, key, pointer);
  if (!v.is_number_integer()) throw SchemaError(pointer + "/" + key, "expected an integer");
  return v.get<int>();
}

std::vector<double> need_real_array(const json& j, const char* key, const std::string& pointer,
                                    int arity) {
  const json& v = need(j, key, pointer);
  if (!v.is_array()) throw SchemaError(pointer + "/" + key, "expected an array");
  if (static_cast<int>(v.size()) != arity)
    throw SchemaError(pointer + "/" + key,
                      "expected " + std::to_string(arity) + " entries, got " +
                          std::to_string(v.size()));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw SchemaError(pointer + "/" + key + "/" + std::to_string(i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

Coefficient parse_coeff_at(const json& v, const std::string& pointer, CoeffKind kind, int edges) {
  if (!v.is_string()) throw SchemaError(pointer, "expected a coefficient string");
  try {
    return Coefficient::parse(v.get<std::string>(), kind, edges);
  } catch (const ParseError& e) {
    throw SchemaError(pointer, e.what());
  }
}

std::vector<Coefficient> need_coeff_array(const json& j, const char* key,
                                          const std::string& pointer, CoeffKind kind, int edges) {
  const json& v = need(j, key, pointer);
  if (!v.is_array()) throw SchemaError(pointer + "/" + key, "expected an array");
  if (static_cast<int>(v.size()) != edges)
    throw SchemaError(pointer + "/" + key, "expected one coefficient per edge (" +
                                               std::to_string(edges) + "), got " +
                                               std::to_string(v.size()));
  std::vector<Coefficient> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(parse_coeff_at(v[i], pointer + "/" + key + "/" + std::to_string(i), kind, edges));
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError(path, "cannot open output file");
    out << content;
    if (!out) throw SchemaError(path, "write failed");
  }
  std::filesystem::rename(tmp, path);
}

void append_rows(std::ostringstream& os, const GridFunction& u, int edge, int k, double t,
                 ExportFormat format) {
  const JunctionGrid& grid = u.grid();
  for (int j = 0; j < u.nodes(edge); ++j) {
    double x = grid.node_x(edge, j);
    double val = u.at(edge, j);
    double dval = node_derivative(u, edge, j);
    if (format == ExportFormat::Csv) {
      os << edge + 1 << ',' << k << ',' << fmt(t) << ',' << fmt(x) << ',' << fmt(val) << ','
         << fmt(dval) << '\n';
    } else {
      os << "{\"edge\":" << edge + 1 << ",\"k\":" << k << ",\"t\":" << fmt(t) << ",\"x\":" << fmt(x)
         << ",\"u\":" << fmt(val) << ",\"du_dx\":" << fmt(dval) << "}\n";
    }
  }
}

}  // namespace

ProblemSpec load_problem_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("", "problem file must be a JSON object");

  const json& junction = need(root, "junction", "");
  int edges = need_int(junction, "edges", "/junction");
  if (edges < 1) throw SchemaError("/junction/edges", "needs at least one edge");
  std::vector<double> lengths = need_real_array(junction, "lengths", "/junction", edges);

  ProblemSpec p;
  try {
    p.junction = build_junction(edges, lengths);
  } catch (const ConfigError& e) {
    throw SchemaError("/junction/lengths", e.what());
  }

  const json& coeffs = need(root, "coefficients", "");
  const std::string cp = "/coefficients";
  p.sigma = need_coeff_array(coeffs, "sigma", cp, CoeffKind::Sigma, edges);
  p.hamiltonian = need_coeff_array(coeffs, "hamiltonian", cp, CoeffKind::Hamiltonian, edges);
  p.vertex_condition = parse_coeff_at(need(coeffs, "vertex_condition", cp),
                                      cp + "/vertex_condition", CoeffKind::VertexCondition, edges);
  p.initial = need_coeff_array(coeffs, "initial", cp, CoeffKind::Initial, edges);
  p.outer_boundary = need_coeff_array(coeffs, "outer_boundary", cp, CoeffKind::OuterBoundary, edges);
  if (coeffs.contains("forcing"))
    p.forcing = need_coeff_array(coeffs, "forcing", cp, CoeffKind::Forcing, edges);

  const json& env = need(root, "envelope", "");
  const std::string ep = "/envelope";
  p.envelope.m = need_number(env, "m", ep);
  p.envelope.nu_lower = need_number(env, "nu_lower", ep);
  p.envelope.nu_upper = need_number(env, "nu_upper", ep);
  p.envelope.c_h = need_number(env, "c_h", ep);
  p.envelope.root_b = need_number(env, "root_b", ep);
  p.envelope.root_B = need_real_array(env, "root_B", ep, edges);
  if (env.contains("mu_bound"))
    p.envelope.mu_bound =
        parse_coeff_at(env.at("mu_bound"), ep + "/mu_bound", CoeffKind::BoundOfU, edges);
  if (env.contains("gamma_bound"))
    p.envelope.gamma_bound =
        parse_coeff_at(env.at("gamma_bound"), ep + "/gamma_bound", CoeffKind::BoundOfU, edges);
  if (env.contains("epsilon_bound"))
    p.envelope.epsilon_bound =
        parse_coeff_at(env.at("epsilon_bound"), ep + "/epsilon_bound", CoeffKind::BoundOfU, edges);
  if (env.contains("p_bound"))
    p.envelope.p_bound =
        parse_coeff_at(env.at("p_bound"), ep + "/p_bound", CoeffKind::BoundOfUP, edges);

  p.horizon = need_number(root, "horizon", "");

  try {
    p.check_shape();
  } catch (const ConfigError& e) {
    throw SchemaError("", e.what());
  }
  return p;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path, "cannot open problem file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_problem_text(buf.str());
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

void export_solution(const ParabolicSolution& sol, const std::string& path, ExportFormat format) {
  std::ostringstream os;
  if (format == ExportFormat::Csv) os << "edge,k,t,x,u,du_dx\n";
  const int edges = sol.grid().junction.num_edges;
  for (int i = 0; i < edges; ++i)
    for (int k = 0; k < sol.snapshots->size(); ++k) {
      GridFunction u = sol.snapshot(k);
      append_rows(os, u, i, k, sol.time(k), format);
    }
  atomic_write(path, os.str());
}

void export_solution(const EllipticSolution& sol, const std::string& path, ExportFormat format) {
  std::ostringstream os;
  if (format == ExportFormat::Csv) os << "edge,k,t,x,u,du_dx\n";
  for (int i = 0; i < sol.solution.num_edges(); ++i)
    append_rows(os, sol.solution, i, 0, 0.0, format);
  atomic_write(path, os.str());
}

// ---------------------------------------------------------------------------
// Convergence ladders
// ---------------------------------------------------------------------------

std::string ConvergenceReport::to_text() const {
  std::ostringstream os;
  os << "convergence ladder (" << (kind == LadderKind::TimeSteps ? "time steps" : "nodes")
     << ", reference: " << reference << ")\n";
  for (const auto& r : rungs) os << "  " << r.value << "  sup-error " << r.error << "\n";
  if (!applicable)
    os << "  order: NOT-APPLICABLE (all errors below 1e-12)\n";
  else
    os << "  fitted order " << fitted_order << " (fit residual " << fit_residual << "), "
       << (pass ? "PASS" : "FAIL") << " at threshold " << pass_threshold << "\n";
  return os.str();
}

namespace {

double sup_error_vs_reference(const ParabolicSolution& sol,
                              const std::vector<Coefficient>& ref) {
  double err = 0.0;
  const JunctionGrid& grid = sol.grid();
  for (int k = 0; k < sol.snapshots->size(); ++k) {
    GridFunction u = sol.snapshot(k);
    double t = sol.time(k);
    for (int i = 0; i < u.num_edges(); ++i)
      for (int j = 0; j < u.nodes(i); ++j)
        err = std::max(err, std::abs(u.at(i, j) - ref[i].forcing(t, grid.node_x(i, j))));
  }
  return err;
}

double sup_error_vs_fine(const ParabolicSolution& coarse, const ParabolicSolution& fine) {
  double err = 0.0;
  const JunctionGrid& grid = coarse.grid();
  for (int k = 0; k < coarse.snapshots->size(); ++k) {
    GridFunction u = coarse.snapshot(k);
    double t = coarse.time(k);
    for (int i = 0; i < u.num_edges(); ++i)
      for (int j = 0; j < u.nodes(i); ++j)
        err = std::max(err, std::abs(u.at(i, j) - interpolant_eval(fine, t, grid.node_x(i, j), i)));
  }
  return err;
}

}  // namespace

ConvergenceReport run_convergence(const ProblemSpec& p, const ConvergenceRequest& req) {
  if (req.ladder.size() < 3) throw ConfigError("a convergence ladder needs at least 3 rungs");
  for (std::size_t i = 1; i < req.ladder.size(); ++i)
    if (req.ladder[i] <= req.ladder[i - 1])
      throw ConfigError("the ladder must be strictly increasing");
  const bool self_ref = req.reference.empty();
  if (!self_ref && static_cast<int>(req.reference.size()) != p.num_edges())
    throw ConfigError("closed-form reference needs one expression per edge");

  ConvergenceReport rep;
  rep.kind = req.kind;
  rep.pass_threshold = req.kind == LadderKind::TimeSteps ? 0.9 : 1.9;
  rep.reference = self_ref ? "finest-grid self-reference" : "closed form";

  std::vector<ParabolicSolution> runs;
  for (int value : req.ladder) {
    RotheConfig cfg = req.base;
    if (req.kind == LadderKind::TimeSteps) {
      cfg.steps = value;
      cfg.nodes_per_edge = req.fixed_nodes;
    } else {
      cfg.steps = req.fixed_steps;
      cfg.nodes_per_edge = value;
    }
    ParabolicSolution sol = solve_parabolic(p, cfg);
    if (!sol.completed)
      throw SolveError("convergence rung " + std::to_string(value) + " failed: " + sol.message);
    runs.push_back(std::move(sol));
  }

  std::size_t fit_count = self_ref ? runs.size() - 1 : runs.size();
  for (std::size_t r = 0; r < fit_count; ++r) {
    double err = self_ref ? sup_error_vs_fine(runs[r], runs.back())
                          : sup_error_vs_reference(runs[r], req.reference);
    rep.rungs.push_back({req.ladder[r], err});
  }

  double max_err = 0.0;
  for (const auto& r : rep.rungs) max_err = std::max(max_err, r.error);
  if (max_err <= 1e-12) {
    rep.applicable = false;
    rep.pass = true;
    return rep;
  }

  // least squares of log(err) against log(dt) or log(h)
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = rep.rungs.size();
  std::vector<double> xs(m), ys(m);
  for (std::size_t r = 0; r < m; ++r) {
    double res = req.kind == LadderKind::TimeSteps
                     ? p.horizon / rep.rungs[r].value
                     : 1.0 / (rep.rungs[r].value - 1);
    xs[r] = std::log(res);
    ys[r] = std::log(std::max(rep.rungs[r].error, 1e-300));
    sx += xs[r];
    sy += ys[r];
    sxx += xs[r] * xs[r];
    sxy += xs[r] * ys[r];
  }
  double denom = m * sxx - sx * sx;
  rep.fitted_order = (m * sxy - sx * sy) / denom;
  double intercept = (sy - rep.fitted_order * sx) / m;
  for (std::size_t r = 0; r < m; ++r)
    rep.fit_residual =
        std::max(rep.fit_residual, std::abs(ys[r] - rep.fitted_order * xs[r] - intercept));
  rep.pass = rep.fitted_order >= rep.pass_threshold;
  return rep;
}

}  // namespace starpde
