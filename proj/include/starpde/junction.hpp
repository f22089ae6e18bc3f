#pragma once

#include <stdexcept>
#include <vector>

namespace starpde {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A star junction: I edges of lengths a_i glued at a single vertex x = 0.
struct Junction {
  int num_edges = 0;
  std::vector<double> lengths;
};

Junction build_junction(int num_edges, std::vector<double> lengths);

/// Uniform per-edge grid. Node 0 of every edge is the vertex, node N_i - 1
/// sits at x = a_i, spacing h_i = a_i / (N_i - 1).
struct JunctionGrid {
  Junction junction;
  std::vector<int> nodes_per_edge;
  std::vector<double> spacing;

  double node_x(int edge, int node) const { return spacing[edge] * node; }
};

JunctionGrid build_grid(const Junction& junction, const std::vector<int>& nodes_per_edge);
JunctionGrid build_grid(const Junction& junction, int nodes_per_edge);

/// Function on a junction grid. The vertex value is stored once, so
/// continuity at the junction point holds by construction.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(JunctionGrid grid, double fill = 0.0);

  double vertex_value() const { return vertex_value_; }
  void set_vertex_value(double v) { vertex_value_ = v; }

  /// Value at node `node` of edge `edge`; node 0 always reads the vertex.
  double at(int edge, int node) const {
    return node == 0 ? vertex_value_ : edge_values_[edge][node - 1];
  }
  void set(int edge, int node, double v) {
    if (node == 0)
      vertex_value_ = v;
    else
      edge_values_[edge][node - 1] = v;
  }

  const JunctionGrid& grid() const { return grid_; }
  int num_edges() const { return grid_.junction.num_edges; }
  int nodes(int edge) const { return grid_.nodes_per_edge[edge]; }

  /// All node values of one edge, vertex included (index 0).
  std::vector<double> edge_nodes(int edge) const;
  void set_edge_nodes(int edge, const std::vector<double>& values);

 private:
  JunctionGrid grid_;
  double vertex_value_ = 0.0;
  std::vector<std::vector<double>> edge_values_;  // nodes 1 .. N_i - 1
};

/// One-sided second-order derivative at the vertex, per edge:
/// (-3 f(0) + 4 f(h) - f(2h)) / (2h). Exact on quadratics.
std::vector<double> vertex_gradient(const GridFunction& f);

/// max |f| over every grid node of every edge.
double sup_norm(const GridFunction& f);

/// Discrete first derivative at a node: central in the interior, one-sided
/// second-order at both ends.
double node_derivative(const GridFunction& f, int edge, int node);

}  // namespace starpde
