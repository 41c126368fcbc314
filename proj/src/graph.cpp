#include "qgdirac/graph.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qgdirac/errors.hpp"

namespace qgdirac {

using nlohmann::json;

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCompactCore: return "EmptyCompactCore";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::InvalidGraphSpec: return "InvalidGraphSpec";
    case ErrorCode::SpacingTooCoarse: return "SpacingTooCoarse";
    case ErrorCode::RankDeficiency: return "RankDeficiency";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EigFailure: return "EigFailure";
    case ErrorCode::NoDecay: return "NoDecay";
    case ErrorCode::FlowStagnation: return "FlowStagnation";
    case ErrorCode::ConcavityLoss: return "ConcavityLoss";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::GapViolation: return "GapViolation";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::EmptySweep: return "EmptySweep";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int MetricGraph::longest_core_edge() const {
  int best = -1;
  for (int e = 0; e < edge_count(); ++e) {
    if (edges_[e].bounded() && (best < 0 || edges_[e].length > edges_[best].length)) best = e;
  }
  return best;
}

int MetricGraph::degree(int v) const {
  int d = 0;
  for (const auto& e : edges_) {
    if (e.start == v) ++d;
    if (e.end == v) ++d;
  }
  return d;
}

int MetricGraph::vertex_index(const std::string& id) const {
  for (int i = 0; i < vertex_count(); ++i) {
    if (vertices_[i] == id) return i;
  }
  return -1;
}

MetricGraph build_graph(const GraphSpec& spec) {
  MetricGraph g;
  g.vertices_ = spec.vertices;
  std::set<std::string> seen;
  for (const auto& v : spec.vertices) {
    if (!seen.insert(v).second) throw Error(ErrorCode::InvalidGraphSpec, "duplicate vertex id '" + v + "'");
  }

  auto lookup = [&](const std::string& id) {
    int idx = g.vertex_index(id);
    if (idx < 0) throw Error(ErrorCode::DanglingEndpoint, "edge references unknown vertex '" + id + "'");
    return idx;
  };

  for (const auto& es : spec.edges) {
    Edge e;
    e.start = lookup(es.from);
    if (es.halfline) {
      if (es.to) throw Error(ErrorCode::InvalidGraphSpec, "half-line from '" + es.from + "' must not have a 'to' vertex");
      if (es.length) throw Error(ErrorCode::InvalidGraphSpec, "half-line from '" + es.from + "' must not have a length");
      e.kind = EdgeKind::HalfLine;
      e.end = -1;
      e.length = std::numeric_limits<double>::infinity();
      ++g.half_lines_;
    } else {
      if (!es.to) throw Error(ErrorCode::DanglingEndpoint, "bounded edge from '" + es.from + "' has no 'to' vertex");
      if (!es.length || !(*es.length > 0.0) || !std::isfinite(*es.length)) {
        throw Error(ErrorCode::InvalidGraphSpec, "bounded edge from '" + es.from + "' needs a positive finite length");
      }
      e.end = lookup(*es.to);
      e.length = *es.length;
      g.core_length_ += e.length;
    }
    g.edges_.push_back(e);
  }

  if (g.core_length_ <= 0.0) throw Error(ErrorCode::EmptyCompactCore, "graph has no bounded edge");

  // Union-find over vertices; isolated vertices make the graph disconnected.
  std::vector<int> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges_) {
    if (e.end >= 0) parent[find(e.start)] = find(e.end);
  }
  std::set<int> roots;
  for (int v = 0; v < g.vertex_count(); ++v) roots.insert(find(v));
  if (roots.size() != 1) throw Error(ErrorCode::Disconnected, std::to_string(roots.size()) + " connected components");
  return g;
}

namespace {

GraphSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidGraphSpec, "graph spec must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "vertices" && key != "edges") throw Error(ErrorCode::InvalidGraphSpec, "unknown key '" + key + "'");
  }
  if (!j.contains("vertices") || !j.contains("edges")) {
    throw Error(ErrorCode::InvalidGraphSpec, "graph spec needs 'vertices' and 'edges'");
  }
  GraphSpec spec;
  try {
    spec.vertices = j.at("vertices").get<std::vector<std::string>>();
    for (const auto& je : j.at("edges")) {
      EdgeSpec e;
      for (const auto& [key, _] : je.items()) {
        if (key != "from" && key != "to" && key != "length" && key != "halfline") {
          throw Error(ErrorCode::InvalidGraphSpec, "unknown edge key '" + key + "'");
        }
      }
      e.from = je.at("from").get<std::string>();
      if (je.contains("to")) e.to = je.at("to").get<std::string>();
      if (je.contains("length")) e.length = je.at("length").get<double>();
      e.halfline = je.value("halfline", false);
      spec.edges.push_back(std::move(e));
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidGraphSpec, ex.what());
  }
  return spec;
}

}  // namespace

GraphSpec parse_graph_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidGraphSpec, ex.what());
  }
  return spec_from_json(j);
}

GraphSpec read_graph_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open graph file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_graph_spec(ss.str());
}

std::string graph_spec_to_json(const GraphSpec& spec) {
  json j;
  j["vertices"] = spec.vertices;
  j["edges"] = json::array();
  for (const auto& e : spec.edges) {
    json je;
    je["from"] = e.from;
    if (e.to) je["to"] = *e.to;
    if (e.length) je["length"] = *e.length;
    je["halfline"] = e.halfline;
    j["edges"].push_back(je);
  }
  return j.dump(2);
}

namespace graphs {

GraphSpec line(double core) {
  return {{"a", "b"},
          {{"a", "b", core, false}, {"a", std::nullopt, std::nullopt, true}, {"b", std::nullopt, std::nullopt, true}}};
}

GraphSpec interval(double length) { return {{"a", "b"}, {{"a", "b", length, false}}}; }

GraphSpec star(const std::vector<double>& lengths, int half_lines) {
  GraphSpec s;
  s.vertices.push_back("o");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    std::string tip = "t" + std::to_string(i);
    s.vertices.push_back(tip);
    s.edges.push_back({"o", tip, lengths[i], false});
  }
  for (int i = 0; i < half_lines; ++i) s.edges.push_back({"o", std::nullopt, std::nullopt, true});
  return s;
}

GraphSpec pendant_loop() {
  GraphSpec s;
  s.vertices = {"A", "B", "C", "D", "E", "F", "G"};
  s.edges = {
      {"A", "D", std::sqrt(2.0), false},
      {"D", "F", 1.0, false},
      {"G", "D", 1.0, false},
      {"A", "B", 1.0, false},
      {"C", "D", 1.0, false},
      {"E", "F", 1.0, false},
      {"G", "G", std::numbers::pi, false},
      {"A", std::nullopt, std::nullopt, true},
      {"F", std::nullopt, std::nullopt, true},
      {"E", std::nullopt, std::nullopt, true},
  };
  return s;
}

}  // namespace graphs

}  // namespace qgdirac
