#pragma once

#include <string_view>
#include <vector>

#include "gbd/graph.hpp"

namespace gbd {

enum class Provenance { kClean, kCleanTrain, kCleanTest, kBackdooredTrain, kBackdooredTest };

std::string_view to_string(Provenance p);

struct LabeledGraph {
  Graph graph;
  int label = 0;
  /// Label before any relabeling; equals `label` for clean items.
  int original_label = 0;
  /// Host nodes that received the trigger, indexed by trigger node. Empty
  /// when nothing was injected or the whole graph was replaced.
  std::vector<int> injected_nodes;
  bool poisoned = false;
};

struct LabeledDataset {
  std::vector<LabeledGraph> items;
  int num_classes = 2;
  Provenance provenance = Provenance::kClean;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

/// Throws InvalidParameterError when a label is out of range or num_classes < 2.
void validate(const LabeledDataset& dataset);

double average_node_count(const LabeledDataset& dataset);

/// Items whose label differs from `label`.
LabeledDataset without_label(const LabeledDataset& dataset, int label);

}  // namespace gbd
