#include "starpde/junction.hpp"

#include <cmath>
#include <string>

namespace starpde {

Junction build_junction(int num_edges, std::vector<double> lengths) {
  if (num_edges < 1) throw ConfigError("a junction needs at least one edge");
  if (static_cast<int>(lengths.size()) != num_edges)
    throw ConfigError("expected " + std::to_string(num_edges) + " edge lengths, got " +
                      std::to_string(lengths.size()));
  for (std::size_t i = 0; i < lengths.size(); ++i)
    if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i]))
      throw ConfigError("edge length " + std::to_string(i + 1) + " must be positive and finite");
  return Junction{num_edges, std::move(lengths)};
}

JunctionGrid build_grid(const Junction& junction, const std::vector<int>& nodes_per_edge) {
  if (static_cast<int>(nodes_per_edge.size()) != junction.num_edges)
    throw ConfigError("nodes_per_edge arity mismatch");
  JunctionGrid g;
  g.junction = junction;
  g.nodes_per_edge = nodes_per_edge;
  g.spacing.resize(nodes_per_edge.size());
  for (std::size_t i = 0; i < nodes_per_edge.size(); ++i) {
    if (nodes_per_edge[i] < 3) throw ConfigError("each edge needs at least 3 grid nodes");
    g.spacing[i] = junction.lengths[i] / (nodes_per_edge[i] - 1);
  }
  return g;
}

JunctionGrid build_grid(const Junction& junction, int nodes_per_edge) {
  return build_grid(junction, std::vector<int>(junction.num_edges, nodes_per_edge));
}

GridFunction::GridFunction(JunctionGrid grid, double fill)
    : grid_(std::move(grid)), vertex_value_(fill) {
  edge_values_.resize(grid_.nodes_per_edge.size());
  for (std::size_t i = 0; i < edge_values_.size(); ++i)
    edge_values_[i].assign(grid_.nodes_per_edge[i] - 1, fill);
}

std::vector<double> GridFunction::edge_nodes(int edge) const {
  std::vector<double> out(grid_.nodes_per_edge[edge]);
  out[0] = vertex_value_;
  for (std::size_t j = 0; j < edge_values_[edge].size(); ++j) out[j + 1] = edge_values_[edge][j];
  return out;
}

void GridFunction::set_edge_nodes(int edge, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != grid_.nodes_per_edge[edge])
    throw ConfigError("edge value count mismatch");
  vertex_value_ = values[0];
  for (std::size_t j = 1; j < values.size(); ++j) edge_values_[edge][j - 1] = values[j];
}

std::vector<double> vertex_gradient(const GridFunction& f) {
  std::vector<double> out(f.num_edges());
  for (int i = 0; i < f.num_edges(); ++i) {
    double h = f.grid().spacing[i];
    out[i] = (-3.0 * f.at(i, 0) + 4.0 * f.at(i, 1) - f.at(i, 2)) / (2.0 * h);
  }
  return out;
}

double sup_norm(const GridFunction& f) {
  double m = std::abs(f.vertex_value());
  for (int i = 0; i < f.num_edges(); ++i)
    for (int j = 1; j < f.nodes(i); ++j) m = std::max(m, std::abs(f.at(i, j)));
  return m;
}

double node_derivative(const GridFunction& f, int edge, int node) {
  double h = f.grid().spacing[edge];
  int n = f.nodes(edge);
  if (node == 0) return (-3.0 * f.at(edge, 0) + 4.0 * f.at(edge, 1) - f.at(edge, 2)) / (2.0 * h);
  if (node == n - 1)
    return (3.0 * f.at(edge, n - 1) - 4.0 * f.at(edge, n - 2) + f.at(edge, n - 3)) / (2.0 * h);
  return (f.at(edge, node + 1) - f.at(edge, node - 1)) / (2.0 * h);
}

}  // namespace starpde
