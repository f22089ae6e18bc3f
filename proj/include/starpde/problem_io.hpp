#pragma once

#include <optional>
#include <string>
#include <vector>

#include "starpde/analysis.hpp"
#include "starpde/problem.hpp"
#include "starpde/rothe.hpp"

namespace starpde {

/// Schema or I/O failure; `pointer` is a JSON pointer to the offending spot.
struct SchemaError : std::runtime_error {
  SchemaError(const std::string& pointer_path, const std::string& msg)
      : std::runtime_error(pointer_path + ": " + msg), pointer(pointer_path) {}
  std::string pointer;
};

/// Loads and cross-validates a problem file:
///   junction {edges, lengths[]}, coefficients {sigma[], hamiltonian[],
///   vertex_condition, initial[], outer_boundary[], forcing[]?},
///   envelope {m, nu_lower, nu_upper, c_h, root_b, root_B[],
///   mu_bound?, gamma_bound?, epsilon_bound?, p_bound?}, horizon.
ProblemSpec load_problem(const std::string& path);
ProblemSpec load_problem_text(const std::string& json_text);

enum class ExportFormat { Csv, Jsonl };

/// Writes rows `edge,k,t,x,u,du_dx` (17 significant digits, edge-major then
/// snapshot then node; vertex rows repeated per edge). Atomic: temp + rename.
void export_solution(const ParabolicSolution& sol, const std::string& path, ExportFormat format);
void export_solution(const EllipticSolution& sol, const std::string& path, ExportFormat format);

enum class LadderKind { TimeSteps, Nodes };

struct ConvergenceRung {
  int value = 0;  // n or N
  double error = 0.0;
};

struct ConvergenceReport {
  LadderKind kind = LadderKind::TimeSteps;
  std::vector<ConvergenceRung> rungs;  // reference rung excluded for self-reference
  double fitted_order = 0.0;
  double fit_residual = 0.0;
  bool applicable = true;  // false when every error is below 1e-12
  bool pass = false;
  double pass_threshold = 0.0;
  std::string reference;
  std::string to_text() const;
};

struct ConvergenceRequest {
  LadderKind kind = LadderKind::TimeSteps;
  std::vector<int> ladder;  // >= 3 increasing resolutions
  int fixed_nodes = 801;    // held fine for a time-step ladder
  int fixed_steps = 64;     // held fine for a node ladder
  /// Closed-form reference per edge; empty means finest-grid self-reference.
  std::vector<Coefficient> reference;
  RotheConfig base;
};

/// Solves the problem along the ladder and fits the convergence order by
/// least squares in log-log; PASS needs order >= 0.9 (time-step ladders) or
/// >= 1.9 (node ladders).
ConvergenceReport run_convergence(const ProblemSpec& p, const ConvergenceRequest& req);

}  // namespace starpde
