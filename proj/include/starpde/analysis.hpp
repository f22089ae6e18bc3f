#pragma once

#include <string>
#include <vector>

#include "starpde/problem.hpp"
#include "starpde/rothe.hpp"

namespace starpde {

/// Rectangular space-time sample set: values[i][j] = f(times[i], coords[j]).
/// A single time row represents a static function.
struct SpaceTimeSamples {
  std::vector<double> times;
  std::vector<double> coords;
  std::vector<std::vector<double>> values;
};

/// Samples of one edge of a parabolic solution (all snapshots, all nodes).
SpaceTimeSamples samples_from_solution(const ParabolicSolution& sol, int edge);

/// sup over time slices and pairs |x - y| <= 1 of |f(t,x) - f(t,y)| / |x-y|^a.
double holder_seminorm_x(const SpaceTimeSamples& f, double alpha);
/// sup over spatial columns and pairs |t - s| <= 1 of |f(t,x) - f(s,x)| / |t-s|^a.
double holder_seminorm_t(const SpaceTimeSamples& f, double alpha);

/// Finite-difference x-derivative of a sample set (central interior,
/// one-sided second-order ends).
SpaceTimeSamples derivative_x(const SpaceTimeSamples& f);

/// The interpolation constant C(nu1, nu2, gamma) =
/// 2 nu2 (nu1/(gamma nu2))^(gamma/(1+gamma)) + 2 nu1 (nu1/(gamma nu2))^(1/(1+gamma)).
double interpolation_bound(double nu1, double nu2, double gamma);

struct InterpolationCheck {
  double nu1 = 0.0;       // Holder-alpha-in-t constant of f
  double nu2 = 0.0;       // Holder-gamma-in-x constant of dx f
  double exponent = 0.0;  // alpha*gamma/(1+gamma)
  double measured = 0.0;  // Holder-exponent-in-t seminorm of dx f
  double bound = 0.0;     // C(nu1, nu2, gamma)
  bool pass = false;
};

/// Measures nu1 and nu2 from the samples and verifies the measured
/// Holder-(alpha*gamma/(1+gamma))-in-t seminorm of dx f against the constant.
InterpolationCheck check_interpolation(const SpaceTimeSamples& f, double alpha, double gamma);

struct TimeDifferenceReport {
  double m0 = 0.0;
  double c_tilde = 0.0;  // C_H * T, the scaled constant
  int steps = 0;
  double measured = 0.0;           // max_k (1/dt) sup |u_k - u_{k-1}|
  double bound = 0.0;              // (n/(n - c_tilde))^n * m0
  double margin = 0.2;
  double noise_floor = 0.0;        // solver-tolerance allowance on the quotient
  bool pass = false;
  std::vector<double> recursion;   // M_{k,n}, k = 0..n
  std::string note;
};

/// The recursion table M_{k,n} = (n/(n - c_tilde))^k * M0.
std::vector<double> time_difference_recursion(double c_h, double horizon, int steps, double m0);

/// Time-difference monitor: errors out when n <= C_H * T.
TimeDifferenceReport time_difference_bound(const ParabolicSolution& sol, const ProblemSpec& p,
                                    double margin = 0.2);

struct BarrierParams {
  double beta = 0.0;
  double theta = 0.0;
  double kappa = 0.0;
};

/// Logarithmic barrier parameters: beta is the smallest power of two with
/// beta >= mu(2M)/nu (1 + 1/beta^2) + M/(nu beta^2); theta and kappa follow
/// the printed formulas. Errors out when no beta <= 2^60 works.
BarrierParams barrier_params(double m_bound, double mu_at_2m, double nu_lower, double min_length);

struct BarrierCheck {
  BarrierParams params;
  double m_bound = 0.0;
  bool pass = false;
  double worst_gap = 0.0;  // most negative barrier-minus-solution gap
  std::string witness;
};

/// Verifies that w+(x) = u_k(0) + ln(1 + theta x)/beta dominates every
/// snapshot k >= 1 on [0, kappa] node by node, and w- bounds from below.
BarrierCheck verify_barrier(const ParabolicSolution& sol, const BarrierParams& params);

/// M such that sup|u_k| + (1/dt) sup|u_k - u_{k-1}| <= M over the run.
double barrier_bound_m(const ParabolicSolution& sol);

struct ComparisonResult {
  bool ordered = false;
  double max_violation = 0.0;
  int snapshot = -1;  // first violation
  int edge = -1;
  int node = -1;
};

/// True iff sub <= super + tol at every node (and snapshot); on violation
/// carries the first offending (snapshot, edge, node).
ComparisonResult check_comparison(const GridFunction& sub, const GridFunction& super, double tol);
ComparisonResult check_comparison(const ParabolicSolution& sub, const ParabolicSolution& super,
                                  double tol);

/// sup over interior nodes of the discrete elliptic residual of u at time t.
double residual_norm(const GridFunction& u, const ProblemSpec& p, double t = 0.0);
/// Discrete parabolic residual of snapshot k >= 1 with the backward time
/// difference (u_k - u_{k-1})/dt.
double residual_norm(const ParabolicSolution& sol, int k, const ProblemSpec& p);

struct Prop44Observation {
  double sup_u = 0.0;        // M1 observation
  double sup_du = 0.0;       // M2 observation, discrete gradient
  double sup_d2u = 0.0;      // M3 observation, interior second differences
  double time_quotient = 0.0;  // max_k (1/dt) sup |u_k - u_{k-1}|
};

Prop44Observation prop44_observe(const ParabolicSolution& sol);

struct EstimateEntry {
  std::string lemma;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  Verdict verdict = Verdict::Unchecked;
  std::vector<std::string> witnesses;
};

struct EstimateReport {
  std::vector<EstimateEntry> entries;
  bool has_fail() const;
  std::string to_text() const;
  std::string to_json() const;
};

}  // namespace starpde
