#include "qgdirac/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "qgdirac/errors.hpp"

namespace qgdirac {

double Mesh::total_length() const {
  double s = 0.0;
  for (double h : mid_h) s += h;
  return s;
}

Mesh build_mesh(const MetricGraph& graph, double h, double L, const MeshOptions& opts) {
  return build_mesh(std::make_shared<const MetricGraph>(graph), h, L, opts);
}

Mesh build_mesh(std::shared_ptr<const MetricGraph> graph, double h, double L, const MeshOptions& opts) {
  if (!(h > 0.0)) throw Error(ErrorCode::PreconditionViolated, "mesh spacing must be positive");
  if (!(L > 0.0)) throw Error(ErrorCode::PreconditionViolated, "truncation length must be positive");

  Mesh mesh;
  mesh.graph = graph;
  mesh.target_h = h;
  mesh.truncation = L;

  const int nv = graph->vertex_count();
  mesh.vertex_dof.assign(nv, -1);
  std::vector<char> dirichlet(nv, 0);
  for (int v : opts.dirichlet_vertices) {
    if (v < 0 || v >= nv) throw Error(ErrorCode::PreconditionViolated, "Dirichlet vertex out of range");
    dirichlet[v] = 1;
  }
  int next_node = 0;
  for (int v = 0; v < nv; ++v) {
    if (!dirichlet[v]) mesh.vertex_dof[v] = next_node++;
  }

  int raw = 0;
  int mids = 0;
  for (int e = 0; e < graph->edge_count(); ++e) {
    const Edge& edge = graph->edges()[e];
    EdgeGrid g;
    g.edge = e;
    g.core = edge.bounded();
    g.half_line = !edge.bounded();
    g.length = edge.bounded() ? edge.length : L;
    g.cells = static_cast<int>(std::lround(g.length / h));
    if (g.cells < 2) {
      throw Error(ErrorCode::SpacingTooCoarse,
                  "edge " + std::to_string(e) + " of length " + std::to_string(g.length) + " gets fewer than 3 nodes");
    }
    g.h = g.length / g.cells;
    g.far_end_truncated = g.half_line;
    g.raw_offset = raw;
    g.first_mid = mids;
    g.node_dofs.resize(g.cells + 1);
    g.node_dofs[0] = mesh.vertex_dof[edge.start];
    for (int j = 1; j < g.cells; ++j) g.node_dofs[j] = next_node++;
    g.node_dofs[g.cells] = g.half_line ? -1 : mesh.vertex_dof[edge.end];
    raw += g.cells + 1;
    mids += g.cells;
    mesh.edges.push_back(std::move(g));
  }
  mesh.node_count = next_node;
  mesh.mid_count = mids;
  mesh.raw_node_count = raw;

  mesh.node_weight.assign(next_node, 0.0);
  mesh.node_core_weight.assign(next_node, 0.0);
  mesh.mid_h.resize(mids);
  mesh.mid_core.resize(mids);
  mesh.mid_edge.resize(mids);
  mesh.mid_local.resize(mids);
  for (int ge = 0; ge < static_cast<int>(mesh.edges.size()); ++ge) {
    const EdgeGrid& g = mesh.edges[ge];
    for (int j = 0; j <= g.cells; ++j) {
      int dof = g.node_dofs[j];
      if (dof < 0) continue;
      double w = (j == 0 || j == g.cells) ? 0.5 * g.h : g.h;
      mesh.node_weight[dof] += w;
      if (g.core) mesh.node_core_weight[dof] += w;
    }
    for (int j = 0; j < g.cells; ++j) {
      int m = g.first_mid + j;
      mesh.mid_h[m] = g.h;
      mesh.mid_core[m] = g.core;
      mesh.mid_edge[m] = ge;
      mesh.mid_local[m] = j;
    }
  }
  if (mesh.node_count == 0) throw Error(ErrorCode::RankDeficiency, "no free node DOFs remain");
  return mesh;
}

}  // namespace qgdirac
