#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "starpde/analysis.hpp"
#include "starpde/problem_io.hpp"

using namespace starpde;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitValidationFail = 2;
constexpr int kExitIoError = 3;

ExportFormat parse_format(const std::string& name) {
  if (name == "csv") return ExportFormat::Csv;
  if (name == "jsonl") return ExportFormat::Jsonl;
  throw ConfigError("unknown format '" + name + "' (expected csv or jsonl)");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t at = 0;
  while (at < text.size()) {
    std::size_t comma = text.find(',', at);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stoi(text.substr(at, comma - at)));
    at = comma + 1;
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::size_t at = 0;
  while (at < text.size()) {
    std::size_t comma = text.find(',', at);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stod(text.substr(at, comma - at)));
    at = comma + 1;
  }
  return out;
}

int cmd_validate(const std::string& file, const SamplingPlan& plan, double compat_tol) {
  ProblemSpec p = load_problem(file);
  CompatibilityReport compat = compatibility_check(p, compat_tol);
  std::cout << compat.to_text();
  ValidationReport rep = validate_assumptions(p, plan);
  std::cout << rep.to_text();
  return (compat.ok && !rep.has_fail()) ? kExitOk : kExitValidationFail;
}

int cmd_solve_elliptic(const std::string& file, int nodes, double theta_tol, double f_tol,
                       const std::string& out, const std::string& format) {
  ProblemSpec p = load_problem(file);
  JunctionGrid grid = build_grid(p.junction, nodes);
  EllipticOptions opts;
  opts.theta_tol = theta_tol;
  opts.f_tol = f_tol;
  EllipticSolution sol = solve_elliptic_junction(p, grid, opts);
  std::printf("theta_star %.17g\n", sol.theta_star);
  std::printf("F_residual %.17g (tolerance %.17g)\n", sol.f_residual, sol.f_tol_effective);
  std::printf("bisection_iterations %d\n", sol.bisection_iterations);
  std::printf("pde_residual %.17g\n", residual_norm(sol.solution, p));
  if (!sol.converged) {
    std::cout << "solver failure: " << sol.message << "\n";
    return kExitSolverFailure;
  }
  if (!out.empty()) export_solution(sol, out, parse_format(format));
  return kExitOk;
}

int cmd_solve_parabolic(const std::string& file, int steps, int nodes, const std::string& out,
                        const std::string& format, double compat_tol) {
  ProblemSpec p = load_problem(file);
  RotheConfig cfg;
  cfg.steps = steps;
  cfg.nodes_per_edge = nodes;
  cfg.compat_tol = compat_tol;
  ParabolicSolution sol = solve_parabolic(p, cfg);
  if (!sol.completed) {
    std::cout << "solver failure: " << sol.message << "\n";
    return kExitSolverFailure;
  }
  double worst_f = 0.0;
  for (const auto& d : sol.diagnostics) worst_f = std::max(worst_f, d.f_residual);
  std::printf("steps %d, nodes %d, dt %.17g\n", steps, nodes, sol.dt());
  std::printf("final_vertex_value %.17g\n", sol.snapshot(sol.steps).vertex_value());
  std::printf("max_vertex_residual %.17g\n", worst_f);
  if (!out.empty()) export_solution(sol, out, parse_format(format));
  return kExitOk;
}

int cmd_estimates(const std::string& file, int steps, int nodes, double margin, double alpha,
                  double gamma, const std::string& json_out) {
  ProblemSpec p = load_problem(file);
  RotheConfig cfg;
  cfg.steps = steps;
  cfg.nodes_per_edge = nodes;
  ParabolicSolution sol = solve_parabolic(p, cfg);
  if (!sol.completed) {
    std::cout << "solver failure: " << sol.message << "\n";
    return kExitSolverFailure;
  }

  EstimateReport report;

  TimeDifferenceReport l41 = time_difference_bound(sol, p, margin);
  EstimateEntry e41;
  e41.lemma = "lemma_4_1";
  e41.measured = l41.measured;
  e41.bound = l41.bound;
  e41.margin = margin;
  e41.verdict = l41.pass ? Verdict::Pass : Verdict::Fail;
  e41.witnesses.push_back("M0 = " + std::to_string(l41.m0) +
                          ", scaled constant C_H*T = " + std::to_string(l41.c_tilde));
  e41.witnesses.push_back(l41.note);
  report.entries.push_back(e41);

  EstimateEntry e42;
  e42.lemma = "lemma_4_2_barrier";
  e42.margin = 0.0;
  if (p.envelope.mu_bound) {
    double m_bound = barrier_bound_m(sol);
    EvalPoint pt;
    pt.u = 2.0 * m_bound;
    double mu2m = p.envelope.mu_bound->eval(pt);
    double min_len = *std::min_element(p.junction.lengths.begin(), p.junction.lengths.end());
    BarrierParams params = barrier_params(m_bound, mu2m, p.envelope.nu_lower, min_len);
    BarrierCheck check = verify_barrier(sol, params);
    e42.measured = check.worst_gap;
    e42.bound = 0.0;
    e42.verdict = check.pass ? Verdict::Pass : Verdict::Fail;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "beta=%g, theta=%.6g, kappa=%.6g, M=%.6g", params.beta,
                  params.theta, params.kappa, m_bound);
    e42.witnesses.push_back(buf);
    if (!check.pass) e42.witnesses.push_back("first violation: " + check.witness);
  } else {
    e42.verdict = Verdict::Unchecked;
    e42.witnesses.push_back("mu_bound undeclared; barrier parameters unavailable");
  }
  report.entries.push_back(e42);

  EstimateEntry e21;
  e21.lemma = "lemma_2_1";
  e21.margin = 0.0;
  e21.verdict = Verdict::Pass;
  for (int i = 0; i < p.num_edges(); ++i) {
    InterpolationCheck c = check_interpolation(samples_from_solution(sol, i), alpha, gamma);
    e21.measured = std::max(e21.measured, c.measured);
    e21.bound = std::max(e21.bound, c.bound);
    if (!c.pass) e21.verdict = Verdict::Fail;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "edge %d: nu1=%.6g nu2=%.6g exponent=%.6g measured=%.6g bound=%.6g", i + 1, c.nu1,
                  c.nu2, c.exponent, c.measured, c.bound);
    e21.witnesses.push_back(buf);
  }
  report.entries.push_back(e21);

  Prop44Observation ob = prop44_observe(sol);
  EstimateEntry e44;
  e44.lemma = "prop_4_4";
  e44.verdict = Verdict::SpotChecked;  // uniformity in n needs a ladder
  e44.measured = ob.sup_u;
  e44.margin = 0.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "M1_obs=%.8g M2_obs=%.8g M3_obs=%.8g time_quotient=%.8g",
                ob.sup_u, ob.sup_du, ob.sup_d2u, ob.time_quotient);
  e44.witnesses.push_back(buf);
  report.entries.push_back(e44);

  std::cout << report.to_text();
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    out << report.to_json() << "\n";
  }
  return report.has_fail() ? kExitValidationFail : kExitOk;
}

int cmd_convergence(const std::string& file, const std::string& ladder,
                    const std::vector<std::string>& reference, int fixed_nodes, int fixed_steps) {
  ProblemSpec p = load_problem(file);
  ConvergenceRequest req;
  std::size_t colon = ladder.find(':');
  if (colon == std::string::npos)
    throw ConfigError("--ladder expects n:16,32,... or N:51,101,...");
  std::string kind = ladder.substr(0, colon);
  if (kind == "n")
    req.kind = LadderKind::TimeSteps;
  else if (kind == "N")
    req.kind = LadderKind::Nodes;
  else
    throw ConfigError("ladder kind must be n (time steps) or N (nodes)");
  req.ladder = parse_int_list(ladder.substr(colon + 1));
  req.fixed_nodes = fixed_nodes;
  req.fixed_steps = fixed_steps;
  if (!(reference.size() == 1 && reference[0] == "self")) {
    if (static_cast<int>(reference.size()) != p.num_edges())
      throw ConfigError("--reference needs 'self' or one expression per edge");
    for (const auto& text : reference)
      req.reference.push_back(Coefficient::parse(text, CoeffKind::Reference, p.num_edges()));
  }
  ConvergenceReport rep = run_convergence(p, req);
  std::cout << rep.to_text();
  return rep.pass || !rep.applicable ? kExitOk : kExitValidationFail;
}

int cmd_truncate_study(const std::string& file, const std::string& lengths, double window,
                       int steps, int nodes_per_unit, double compat_tol) {
  ProblemSpec p = load_problem(file);
  RotheConfig cfg;
  cfg.steps = steps;
  cfg.nodes_per_edge = nodes_per_unit;
  cfg.compat_tol = compat_tol;
  TruncationReport rep = truncation_study(p, parse_real_list(lengths), window, cfg);
  std::cout << rep.to_text();
  return rep.pass ? kExitOk : kExitValidationFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasilinear parabolic solver on star junctions with a nonlinear vertex condition"};
  app.require_subcommand(1);

  std::string file, out, format = "csv", ladder, lengths, json_out;
  std::vector<std::string> reference{"self"};
  int nodes = 201, steps = 32, fixed_nodes = 801, fixed_steps = 64, nodes_per_unit = 51;
  double theta_tol = 1e-12, f_tol = 1e-9, window = 1.0, margin = 0.2;
  double alpha = 1.0, gamma = 1.0, compat_tol = 1e-6;
  SamplingPlan plan;

  auto* validate = app.add_subcommand("validate", "check assumptions (P)/(E) by sampling");
  validate->add_option("file", file)->required();
  validate->add_option("--seed", plan.seed, "sampling seed");
  validate->add_option("--pairs", plan.pair_samples, "ordered pair samples");
  validate->add_option("--u-max", plan.u_max);
  validate->add_option("--p-max", plan.p_max);
  validate->add_option("--tol", plan.tol);
  validate->add_option("--compat-tol", compat_tol);

  auto* ell = app.add_subcommand("solve-elliptic", "solve the stationary junction problem");
  ell->add_option("file", file)->required();
  ell->add_option("--nodes", nodes);
  ell->add_option("--theta-tol", theta_tol);
  ell->add_option("--f-tol", f_tol);
  ell->add_option("--out", out);
  ell->add_option("--format", format, "csv or jsonl");

  auto* par = app.add_subcommand("solve-parabolic", "run the implicit time-stepping scheme");
  par->add_option("file", file)->required();
  par->add_option("--steps", steps);
  par->add_option("--nodes", nodes);
  par->add_option("--out", out);
  par->add_option("--format", format, "csv or jsonl");
  par->add_option("--compat-tol", compat_tol);

  auto* est = app.add_subcommand("estimates", "run the a-priori estimate monitors");
  est->add_option("file", file)->required();
  est->add_option("--steps", steps)->required();
  est->add_option("--nodes", nodes)->required();
  est->add_option("--margin", margin);
  est->add_option("--alpha", alpha);
  est->add_option("--gamma", gamma);
  est->add_option("--json", json_out, "also write the JSON report here");

  auto* conv = app.add_subcommand("convergence", "order study over an n- or N-ladder");
  conv->add_option("file", file)->required();
  conv->add_option("--ladder", ladder, "n:16,32,64,128 or N:51,101,201,401")->required();
  conv->add_option("--reference", reference,
                   "'self' or one closed-form expression in (t,x) per edge");
  conv->add_option("--nodes", fixed_nodes, "nodes held fine for an n-ladder");
  conv->add_option("--steps", fixed_steps, "steps held fine for an N-ladder");

  auto* trunc = app.add_subcommand("truncate-study", "truncated-domain approximation study");
  trunc->add_option("file", file)->required();
  trunc->add_option("--lengths", lengths, "increasing truncation lengths, e.g. 2,4,8")->required();
  trunc->add_option("--window", window)->required();
  trunc->add_option("--steps", steps);
  trunc->add_option("--nodes-per-unit", nodes_per_unit, "grid nodes per unit length + 1");
  trunc->add_option("--compat-tol", compat_tol);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(file, plan, compat_tol);
    if (ell->parsed()) return cmd_solve_elliptic(file, nodes, theta_tol, f_tol, out, format);
    if (par->parsed()) return cmd_solve_parabolic(file, steps, nodes, out, format, compat_tol);
    if (est->parsed()) return cmd_estimates(file, steps, nodes, margin, alpha, gamma, json_out);
    if (conv->parsed()) return cmd_convergence(file, ladder, reference, fixed_nodes, fixed_steps);
    if (trunc->parsed()) return cmd_truncate_study(file, lengths, window, steps, nodes_per_unit, compat_tol);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const BracketError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const SolveError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const EvalError& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return kExitOk;
}
