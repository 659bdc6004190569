#include "gbd/injection.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gbd/dense_subgraph.hpp"
#include "gbd/errors.hpp"

namespace gbd {

std::string_view to_string(InjectionStrategy s) {
  switch (s) {
    case InjectionStrategy::kRandom: return "random";
    case InjectionStrategy::kMaxDegree: return "max_degree";
    case InjectionStrategy::kMinDegree: return "min_degree";
    case InjectionStrategy::kDenselyConnected: return "densely_connected";
  }
  return "?";
}

InjectionStrategy parse_injection_strategy(std::string_view name) {
  if (name == "random") return InjectionStrategy::kRandom;
  if (name == "max_degree") return InjectionStrategy::kMaxDegree;
  if (name == "min_degree") return InjectionStrategy::kMinDegree;
  if (name == "densely_connected") return InjectionStrategy::kDenselyConnected;
  throw InvalidParameterError("unknown injection strategy '" + std::string(name) + "'");
}

std::vector<int> select_nodes(const Graph& g, int t, InjectionStrategy strategy, Rng& rng) {
  if (t < 0 || t > g.node_count()) {
    throw InvalidParameterError("cannot select " + std::to_string(t) + " nodes from a graph with " +
                                std::to_string(g.node_count()));
  }
  if (strategy == InjectionStrategy::kRandom) return sample_without_replacement(g.node_count(), t, rng);
  if (strategy == InjectionStrategy::kDenselyConnected) return densest_subset(g, t);

  std::vector<int> order(static_cast<std::size_t>(g.node_count()));
  std::iota(order.begin(), order.end(), 0);
  const bool largest = strategy == InjectionStrategy::kMaxDegree;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return largest ? g.degree(a) > g.degree(b) : g.degree(a) < g.degree(b);
  });
  order.resize(static_cast<std::size_t>(t));
  return order;
}

Graph inject_at(const Graph& host, const Graph& trigger, std::span<const int> mapping) {
  if (mapping.size() != static_cast<std::size_t>(trigger.node_count())) {
    throw InvalidParameterError("mapping size differs from trigger size");
  }
  Graph stripped = remove_edges_within(host, mapping);
  std::vector<Edge> edges = stripped.edges();
  for (const Edge& e : trigger.edges()) {
    edges.push_back({mapping[static_cast<std::size_t>(e.u)], mapping[static_cast<std::size_t>(e.v)]});
  }
  return Graph(host.node_count(), std::move(edges), host.feature_mode());
}

Injection inject(const Graph& host, const Graph& trigger, InjectionStrategy strategy, Rng& rng) {
  const int t = trigger.node_count();
  if (host.node_count() < t) return {Graph(t, trigger.edges(), host.feature_mode()), {}};
  std::vector<int> nodes = select_nodes(host, t, strategy, rng);
  shuffle(nodes, rng);
  Graph injected = inject_at(host, trigger, nodes);
  return {std::move(injected), std::move(nodes)};
}

}  // namespace gbd
