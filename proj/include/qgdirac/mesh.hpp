#pragma once

#include <memory>
#include <vector>

#include "qgdirac/graph.hpp"

namespace qgdirac {

/// Staggered grid on one edge: nodes x_j = j*h (j = 0..cells) carry the
/// first spinor component, midpoints x_{j+1/2} carry the second.
struct EdgeGrid {
  int edge = -1;
  int cells = 0;
  double h = 0.0;
  double length = 0.0;  ///< ℓ_e, or the truncation length for half-lines
  bool core = false;
  bool half_line = false;
  bool far_end_truncated = false;  ///< homogeneous Dirichlet at x = length
  int raw_offset = 0;              ///< first raw (per-edge) node index
  int first_mid = 0;               ///< first global midpoint index
  /// Global node DOF for every local node; -1 where the value is pinned to 0.
  std::vector<int> node_dofs;

  double node_x(int j) const { return j * h; }
  double mid_x(int j) const { return (j + 0.5) * h; }
};

struct MeshOptions {
  /// Vertices with a homogeneous Dirichlet condition on the node component.
  /// Used by the Schrödinger benchmarks; Dirac meshes leave this empty.
  std::vector<int> dirichlet_vertices;
};

/// Discretised metric graph. Shared vertices own a single node DOF
/// (continuity of the first component), truncated half-line ends are pinned.
struct Mesh {
  std::shared_ptr<const MetricGraph> graph;
  double target_h = 0.0;
  double truncation = 0.0;
  std::vector<EdgeGrid> edges;

  int node_count = 0;      ///< reduced node DOFs
  int mid_count = 0;       ///< midpoint DOFs (one per cell)
  int raw_node_count = 0;  ///< Σ_e (cells_e + 1)
  std::vector<int> vertex_dof;  ///< node DOF per graph vertex, -1 if Dirichlet

  std::vector<double> node_weight;       ///< trapezoid weight over 𝒢
  std::vector<double> node_core_weight;  ///< trapezoid weight restricted to 𝒦
  std::vector<double> mid_h;             ///< cell length per midpoint
  std::vector<char> mid_core;            ///< cell lies on a bounded edge
  std::vector<int> mid_edge;             ///< owning edge-grid index
  std::vector<int> mid_local;            ///< local cell index on its edge

  int spinor_dim() const { return node_count + mid_count; }
  /// Σ of all cell lengths, i.e. Σ_e ℓ_e + N·L.
  double total_length() const;
};

/// Builds the staggered mesh. Per-edge spacing is ℓ_e / round(ℓ_e / h);
/// half-lines are cut at length L. Throws SpacingTooCoarse when an edge would
/// get fewer than three nodes.
Mesh build_mesh(std::shared_ptr<const MetricGraph> graph, double h, double L, const MeshOptions& opts = {});
Mesh build_mesh(const MetricGraph& graph, double h, double L, const MeshOptions& opts = {});

}  // namespace qgdirac
