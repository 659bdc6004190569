#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace gbd {

/// Undirected edge, always stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  auto operator<=>(const Edge&) const = default;
};

/// How node features are derived from the structure.
enum class FeatureMode {
  kNormalizedDegree,  ///< degree / (n - 1), in [0, 1]
  kRawDegree,
};

/// Undirected simple graph over nodes 0..n-1 with one degree-derived
/// feature per node. Values are immutable; operations return new graphs.
class Graph {
 public:
  Graph() = default;

  /// Edges may be given in either orientation; duplicates are merged.
  /// Throws InvalidPairError on self-loops or out-of-range endpoints.
  explicit Graph(int node_count, std::vector<Edge> edges = {},
                 FeatureMode mode = FeatureMode::kNormalizedDegree);

  int node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  /// Sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }

  /// Sorted ascending.
  std::span<const int> neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  int degree(int v) const { return static_cast<int>(adjacency_[static_cast<std::size_t>(v)].size()); }
  bool has_edge(int u, int v) const;

  /// node_count x 1 matrix.
  const Eigen::MatrixXd& features() const { return features_; }
  FeatureMode feature_mode() const { return mode_; }

  /// Index-wise equality of node count and edge set.
  friend bool operator==(const Graph& a, const Graph& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
  }

 private:
  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  Eigen::MatrixXd features_;
  FeatureMode mode_ = FeatureMode::kNormalizedDegree;
};

/// Number of node pairs, n(n-1)/2.
std::size_t pair_count(int n);

/// Row-major upper-triangular index of pair (i, j), 0 <= i < j < n:
/// i*n - i(i+1)/2 + (j - i - 1).
std::size_t pair_index(int i, int j, int n);

/// Inverse of pair_index.
Edge pair_at(std::size_t index, int n);

struct StructureVector {
  int origin_node_count = 0;
  std::vector<std::uint8_t> bits;

  friend bool operator==(const StructureVector&, const StructureVector&) = default;
};

StructureVector to_structure_vector(const Graph& g);

/// Throws FormatError if the bit count is not n(n-1)/2.
Graph from_structure_vector(const StructureVector& v,
                            FeatureMode mode = FeatureMode::kNormalizedDegree);

/// 2e / (n(n-1)). Throws DegenerateGraphError for n < 2.
double density(const Graph& g);

Graph recompute_features(const Graph& g, FeatureMode mode);

/// Edges with both endpoints in `nodes`.
std::size_t induced_edge_count(const Graph& g, std::span<const int> nodes);

/// Copy of g without the edges whose endpoints both lie in `nodes`.
Graph remove_edges_within(const Graph& g, std::span<const int> nodes);

/// Relabels node v as perm[v].
Graph permute_nodes(const Graph& g, std::span<const int> perm);

}  // namespace gbd
