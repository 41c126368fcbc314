#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qgdirac {

/// One entry of a graph description. Half-lines have no `to` vertex and no
/// length; bounded edges carry both. `from == to` describes a loop.
struct EdgeSpec {
  std::string from;
  std::optional<std::string> to;
  std::optional<double> length;
  bool halfline = false;
};

struct GraphSpec {
  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
};

enum class EdgeKind { Bounded, HalfLine };

/// An edge of a metric graph. The local coordinate runs from `start` (x = 0)
/// to `end` (x = length). Half-lines start at their only graph vertex and
/// have end == -1.
struct Edge {
  int start = -1;
  int end = -1;
  EdgeKind kind = EdgeKind::Bounded;
  double length = 0.0;

  bool bounded() const { return kind == EdgeKind::Bounded; }
};

/// Validated noncompact metric graph with finitely many edges.
class MetricGraph {
 public:
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int half_line_count() const { return half_lines_; }
  /// Total length |K| of the compact core.
  double core_length() const { return core_length_; }
  /// Index of the longest bounded edge (first one on ties).
  int longest_core_edge() const;
  /// Number of edge ends incident at vertex v (a loop counts twice).
  int degree(int v) const;
  int vertex_index(const std::string& id) const;

 private:
  friend MetricGraph build_graph(const GraphSpec& spec);

  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  int half_lines_ = 0;
  double core_length_ = 0.0;
};

MetricGraph build_graph(const GraphSpec& spec);

GraphSpec parse_graph_spec(const std::string& json_text);
GraphSpec read_graph_spec(const std::filesystem::path& path);
std::string graph_spec_to_json(const GraphSpec& spec);

namespace graphs {
// Reference graphs used throughout tests, examples and the CLI.

/// One bounded edge of length `core` between two half-lines.
GraphSpec line(double core = 1.0);
/// A single bounded edge, no half-lines.
GraphSpec interval(double length = 1.0);
/// Star with bounded edges of the given lengths glued at a central vertex,
/// optionally with `half_lines` additional half-lines at the centre.
GraphSpec star(const std::vector<double>& lengths, int half_lines = 0);
/// Cycle-plus-pendants core with a loop and three half-lines.
GraphSpec pendant_loop();
}  // namespace graphs

}  // namespace qgdirac
