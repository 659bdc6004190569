#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "gbd/graph.hpp"
#include "gbd/rng.hpp"

namespace gbd {

enum class InjectionStrategy { kRandom, kMaxDegree, kMinDegree, kDenselyConnected };

std::string_view to_string(InjectionStrategy s);
/// Accepts random, max_degree, min_degree, densely_connected.
InjectionStrategy parse_injection_strategy(std::string_view name);

/// t distinct host nodes. Random: uniform without replacement. Max/MinDegree:
/// top/bottom t by degree, ties to the lower index. DenselyConnected:
/// densest_subset. Requires g.node_count() >= t.
std::vector<int> select_nodes(const Graph& g, int t, InjectionStrategy strategy, Rng& rng);

struct Injection {
  Graph graph;
  /// mapping[a] is the host node playing trigger node a; empty when the host
  /// was smaller than the trigger and got replaced.
  std::vector<int> mapping;
};

/// Replaces all connections among mapping[0..t) by the trigger's edges.
/// Edges with at most one endpoint in the mapped set are untouched.
Graph inject_at(const Graph& host, const Graph& trigger, std::span<const int> mapping);

/// Selects nodes by `strategy`, maps them to trigger nodes by a uniformly
/// random bijection and calls inject_at. A host with fewer nodes than the
/// trigger is replaced by the trigger itself.
Injection inject(const Graph& host, const Graph& trigger, InjectionStrategy strategy, Rng& rng);

}  // namespace gbd
