#pragma once

#include <memory>
#include <optional>
#include <string>

#include "starpde/vertex_shooting.hpp"

namespace starpde {

/// Configuration of the implicit scheme: n elliptic solves with augmented
/// Hamiltonian H + (u - u_prev)/dt, dt = T/n. Requires n >= 2 and
/// n > C_H * T (the scaled form of the scheme's hypothesis).
struct RotheConfig {
  int steps = 32;
  int nodes_per_edge = 101;
  EllipticOptions elliptic;
  double compat_tol = 1e-6;
  bool keep_in_memory = true;           // false spills snapshots to disk
  std::string spill_path;               // file used when spilling
};

/// Snapshot container; either in memory or backed by a flat binary file of
/// fixed-size records (spill mode for large n).
class SnapshotStore {
 public:
  SnapshotStore(JunctionGrid grid, bool in_memory, std::string path);
  ~SnapshotStore();

  void append(const GridFunction& u);
  GridFunction load(int k) const;
  int size() const { return count_; }
  const JunctionGrid& grid() const { return grid_; }

 private:
  JunctionGrid grid_;
  bool in_memory_;
  std::string path_;
  int count_ = 0;
  std::size_t record_doubles_ = 0;
  std::vector<GridFunction> mem_;
};

struct StepDiagnostics {
  double theta_star = 0.0;
  double f_residual = 0.0;
  double f_tol_effective = 0.0;
  int bisection_iterations = 0;
  int newton_iterations = 0;  // summed over edges of the final shoot
};

struct ParabolicSolution {
  std::shared_ptr<SnapshotStore> snapshots;  // u_0 .. u_n when completed
  double horizon = 0.0;
  int steps = 0;
  std::vector<StepDiagnostics> diagnostics;  // one per performed step
  bool completed = false;
  int failed_step = -1;
  std::string message;

  double dt() const { return horizon / steps; }
  double time(int k) const { return horizon * k / steps; }
  GridFunction snapshot(int k) const { return snapshots->load(k); }
  const JunctionGrid& grid() const { return snapshots->grid(); }
};

/// M_0 of the time-difference estimate: the sup of the initial elliptic
/// load |-sigma(x, g') g'' + H(x, g, g')| over interior grid nodes plus
/// sup_t |phi'(t)|, maximized over edges.
double initial_elliptic_load(const ProblemSpec& p, const JunctionGrid& grid);

/// Samples the initial datum g onto the grid (vertex value from edge 1).
GridFunction sample_initial(const ProblemSpec& p, const JunctionGrid& grid);

/// One implicit step: solves the elliptic junction problem with Hamiltonian
/// H + (u - u_prev)/dt, outer data phi_i(t_k), vertex condition unchanged.
/// u_prev node values enter by direct index lookup (no interpolation).
EllipticSolution rothe_step(const ProblemSpec& p, const GridFunction& u_prev, int k,
                            const RotheConfig& cfg);

/// Runs rothe_step for k = 1..n. Fails fast on a step error: the partial
/// solution is retained with failed_step set.
ParabolicSolution solve_parabolic(const ProblemSpec& p, const RotheConfig& cfg);

/// Piecewise-linear interpolant: linear in t between snapshots and linear
/// in x between nodes.
double interpolant_eval(const ParabolicSolution& sol, double t, double x, int edge);

struct TruncationReport {
  std::vector<double> lengths;
  std::vector<double> distances;  // sup over the window, consecutive pairs
  bool pass = false;
  std::string to_text() const;
};

/// Truncated-domain study for the unbounded junction: for each a in the
/// ladder, solves the problem on edges of length a with far Dirichlet data
/// frozen at g_i(a), then reports sup-distances between consecutive
/// solutions on [0, window] x [0, T]. cfg.nodes_per_edge anchors the node
/// density per unit length, so every truncation runs at the same spacing.
TruncationReport truncation_study(const ProblemSpec& p, const std::vector<double>& lengths_ladder,
                                  double window, const RotheConfig& cfg);

}  // namespace starpde
