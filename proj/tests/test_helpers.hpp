#pragma once

#include <string>
#include <vector>

#include "starpde/problem.hpp"

namespace starpde::testing {

/// Problem with one sigma/H/g/phi expression shared by every edge.
inline ProblemSpec simple_spec(int edges, std::vector<double> lengths, const std::string& sigma,
                               const std::string& ham, const std::string& vertex,
                               const std::string& initial, const std::string& outer, double c_h,
                               double root_b, std::vector<double> root_B, double horizon = 1.0,
                               double m = 2.0, double nu_lower = 1.0, double nu_upper = 1.0) {
  ProblemSpec p;
  p.junction = build_junction(edges, std::move(lengths));
  for (int i = 0; i < edges; ++i) {
    p.sigma.push_back(Coefficient::parse(sigma, CoeffKind::Sigma, edges));
    p.hamiltonian.push_back(Coefficient::parse(ham, CoeffKind::Hamiltonian, edges));
    p.initial.push_back(Coefficient::parse(initial, CoeffKind::Initial, edges));
    p.outer_boundary.push_back(Coefficient::parse(outer, CoeffKind::OuterBoundary, edges));
  }
  p.vertex_condition = Coefficient::parse(vertex, CoeffKind::VertexCondition, edges);
  p.horizon = horizon;
  p.envelope.m = m;
  p.envelope.nu_lower = nu_lower;
  p.envelope.nu_upper = nu_upper;
  p.envelope.c_h = c_h;
  p.envelope.root_b = root_b;
  p.envelope.root_B = std::move(root_B);
  return p;
}

}  // namespace starpde::testing
