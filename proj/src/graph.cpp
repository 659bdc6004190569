#include "gbd/graph.hpp"

#include <algorithm>
#include <string>

#include "gbd/errors.hpp"

namespace gbd {

namespace {

Eigen::MatrixXd degree_features(const std::vector<std::vector<int>>& adjacency, FeatureMode mode) {
  const auto n = static_cast<Eigen::Index>(adjacency.size());
  Eigen::MatrixXd features(n, 1);
  const double scale = (mode == FeatureMode::kNormalizedDegree && n > 1) ? 1.0 / static_cast<double>(n - 1) : 1.0;
  for (Eigen::Index v = 0; v < n; ++v) {
    const auto degree = static_cast<double>(adjacency[static_cast<std::size_t>(v)].size());
    features(v, 0) = (mode == FeatureMode::kNormalizedDegree && n <= 1) ? 0.0 : degree * scale;
  }
  return features;
}

std::vector<bool> membership(int n, std::span<const int> nodes) {
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (int v : nodes) in[static_cast<std::size_t>(v)] = true;
  return in;
}

}  // namespace

Graph::Graph(int node_count, std::vector<Edge> edges, FeatureMode mode)
    : node_count_(node_count), mode_(mode) {
  if (node_count < 0) throw InvalidParameterError("negative node count");
  for (Edge& e : edges) {
    if (e.u == e.v) throw InvalidPairError("self-loop at node " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u < 0 || e.v >= node_count) {
      throw InvalidPairError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                             ") out of range for " + std::to_string(node_count) + " nodes");
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  adjacency_.assign(static_cast<std::size_t>(node_count), {});
  for (const Edge& e : edges_) {
    adjacency_[static_cast<std::size_t>(e.u)].push_back(e.v);
    adjacency_[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
  features_ = degree_features(adjacency_, mode_);
}

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= node_count_ || v >= node_count_) return false;
  const auto& list = adjacency_[static_cast<std::size_t>(u)];
  return std::binary_search(list.begin(), list.end(), v);
}

std::size_t pair_count(int n) {
  if (n < 2) return 0;
  const auto m = static_cast<std::size_t>(n);
  return m * (m - 1) / 2;
}

std::size_t pair_index(int i, int j, int n) {
  if (i < 0 || i >= j || j >= n) {
    throw InvalidPairError("invalid pair (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") for n = " + std::to_string(n));
  }
  const auto a = static_cast<std::size_t>(i);
  const auto b = static_cast<std::size_t>(j);
  const auto m = static_cast<std::size_t>(n);
  return a * m - a * (a + 1) / 2 + (b - a - 1);
}

Edge pair_at(std::size_t index, int n) {
  if (index >= pair_count(n)) throw InvalidPairError("pair index out of range");
  int i = 0;
  auto row = static_cast<std::size_t>(n - 1);
  while (index >= row) {
    index -= row;
    --row;
    ++i;
  }
  return {i, i + 1 + static_cast<int>(index)};
}

StructureVector to_structure_vector(const Graph& g) {
  StructureVector v{g.node_count(), std::vector<std::uint8_t>(pair_count(g.node_count()), 0)};
  for (const Edge& e : g.edges()) v.bits[pair_index(e.u, e.v, g.node_count())] = 1;
  return v;
}

Graph from_structure_vector(const StructureVector& v, FeatureMode mode) {
  const int n = v.origin_node_count;
  if (n < 0 || v.bits.size() != pair_count(n)) {
    throw FormatError("structure vector has " + std::to_string(v.bits.size()) +
                      " entries, expected " + std::to_string(pair_count(n)));
  }
  std::vector<Edge> edges;
  std::size_t index = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++index) {
      if (v.bits[index] != 0) edges.push_back({i, j});
    }
  }
  return Graph(n, std::move(edges), mode);
}

double density(const Graph& g) {
  if (g.node_count() < 2) throw DegenerateGraphError("density needs at least 2 nodes");
  return static_cast<double>(g.edge_count()) / static_cast<double>(pair_count(g.node_count()));
}

Graph recompute_features(const Graph& g, FeatureMode mode) {
  return Graph(g.node_count(), g.edges(), mode);
}

std::size_t induced_edge_count(const Graph& g, std::span<const int> nodes) {
  const auto in = membership(g.node_count(), nodes);
  std::size_t count = 0;
  for (int v : nodes) {
    for (int u : g.neighbors(v)) {
      if (u > v && in[static_cast<std::size_t>(u)]) ++count;
    }
  }
  return count;
}

Graph remove_edges_within(const Graph& g, std::span<const int> nodes) {
  const auto in = membership(g.node_count(), nodes);
  std::vector<Edge> kept;
  kept.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    if (!(in[static_cast<std::size_t>(e.u)] && in[static_cast<std::size_t>(e.v)])) kept.push_back(e);
  }
  return Graph(g.node_count(), std::move(kept), g.feature_mode());
}

Graph permute_nodes(const Graph& g, std::span<const int> perm) {
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    edges.push_back({perm[static_cast<std::size_t>(e.u)], perm[static_cast<std::size_t>(e.v)]});
  }
  return Graph(g.node_count(), std::move(edges), g.feature_mode());
}

}  // namespace gbd
