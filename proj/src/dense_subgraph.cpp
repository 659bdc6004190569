#include "gbd/dense_subgraph.hpp"

#include <algorithm>
#include <string>

#include "gbd/errors.hpp"

namespace gbd {

namespace {

void check_size(const Graph& g, int t) {
  if (t < 0 || t > g.node_count()) {
    throw InvalidParameterError("dense subgraph size " + std::to_string(t) + " needs at least that many nodes (graph has " +
                                std::to_string(g.node_count()) + ")");
  }
}

}  // namespace

std::vector<int> densest_subset(const Graph& g, int t) {
  check_size(g, t);
  const int n = g.node_count();
  std::vector<bool> in(static_cast<std::size_t>(n), true);
  std::vector<int> degree(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) degree[static_cast<std::size_t>(v)] = g.degree(v);

  for (int remaining = n; remaining > t; --remaining) {
    int victim = -1;
    for (int v = 0; v < n; ++v) {
      if (!in[static_cast<std::size_t>(v)]) continue;
      if (victim < 0 || degree[static_cast<std::size_t>(v)] <= degree[static_cast<std::size_t>(victim)]) victim = v;
    }
    in[static_cast<std::size_t>(victim)] = false;
    for (int u : g.neighbors(victim)) --degree[static_cast<std::size_t>(u)];
  }

  // degree[v] now counts neighbours inside the current set, for every v.
  while (t > 0 && t < n) {
    int best_gain = 0;
    int best_out = -1;
    int best_in = -1;
    for (int u = 0; u < n; ++u) {
      if (!in[static_cast<std::size_t>(u)]) continue;
      for (int v = 0; v < n; ++v) {
        if (in[static_cast<std::size_t>(v)]) continue;
        const int gain = degree[static_cast<std::size_t>(v)] - degree[static_cast<std::size_t>(u)] - (g.has_edge(u, v) ? 1 : 0);
        if (gain > best_gain) {
          best_gain = gain;
          best_out = u;
          best_in = v;
        }
      }
    }
    if (best_gain <= 0) break;
    in[static_cast<std::size_t>(best_out)] = false;
    for (int w : g.neighbors(best_out)) --degree[static_cast<std::size_t>(w)];
    in[static_cast<std::size_t>(best_in)] = true;
    for (int w : g.neighbors(best_in)) ++degree[static_cast<std::size_t>(w)];
  }

  std::vector<int> result;
  for (int v = 0; v < n; ++v) {
    if (in[static_cast<std::size_t>(v)]) result.push_back(v);
  }
  return result;
}

std::vector<int> detect_dense_subgraph(const Graph& g, int t) { return densest_subset(g, t); }

bool detection_success(const Graph& g_backdoored, std::vector<int> injected_nodes, int t) {
  std::sort(injected_nodes.begin(), injected_nodes.end());
  return detect_dense_subgraph(g_backdoored, t) == injected_nodes;
}

double jaccard(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  const std::size_t unite = a.size() + b.size() - common.size();
  return unite == 0 ? 1.0 : static_cast<double>(common.size()) / static_cast<double>(unite);
}

Graph strip_detected(const Graph& g, int t) {
  const auto detected = detect_dense_subgraph(g, t);
  return remove_edges_within(g, detected);
}

std::size_t densest_subset_exhaustive_edges(const Graph& g, int t) {
  check_size(g, t);
  const int n = g.node_count();
  std::vector<int> subset(static_cast<std::size_t>(t));
  for (int i = 0; i < t; ++i) subset[static_cast<std::size_t>(i)] = i;
  std::size_t best = 0;
  while (true) {
    best = std::max(best, induced_edge_count(g, subset));
    int i = t - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - t + i) --i;
    if (i < 0) break;
    ++subset[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < t; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

}  // namespace gbd
