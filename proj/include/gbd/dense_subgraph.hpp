#pragma once

#include <vector>

#include "gbd/graph.hpp"

namespace gbd {

/// Greedy densest-t heuristic. Peels a minimum-degree node (ties: highest
/// index goes first) until t remain, then applies the best single in/out
/// swap while one strictly increases the induced edge count. Returns the
/// node set sorted ascending. Deterministic.
///
/// Throws InvalidParameterError unless 0 <= t <= node_count.
std::vector<int> densest_subset(const Graph& g, int t);

/// The dense-subgraph detection defense; same as densest_subset.
std::vector<int> detect_dense_subgraph(const Graph& g, int t);

/// True iff the detected t-set equals `injected_nodes` as a set.
bool detection_success(const Graph& g_backdoored, std::vector<int> injected_nodes, int t);

/// |A ∩ B| / |A ∪ B|; 1 for two empty sets.
double jaccard(std::vector<int> a, std::vector<int> b);

/// Removes every edge inside the detected t-set.
Graph strip_detected(const Graph& g, int t);

/// Exhaustive maximum induced edge count over all t-subsets (small n only).
std::size_t densest_subset_exhaustive_edges(const Graph& g, int t);

}  // namespace gbd
