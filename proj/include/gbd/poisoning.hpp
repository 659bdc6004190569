#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "gbd/dataset.hpp"
#include "gbd/injection.hpp"
#include "gbd/rng.hpp"
#include "gbd/trigger.hpp"

namespace gbd {

enum class TriggerMode { kFixed, kRandomPerGraph };

std::string_view to_string(TriggerMode m);
TriggerMode parse_trigger_mode(std::string_view name);

struct PoisonConfig {
  double gamma = 0.05;
  int target_label = 1;
  TriggerMode trigger_mode = TriggerMode::kFixed;
  TriggerSpec trigger_spec;
  InjectionStrategy strategy = InjectionStrategy::kRandom;
  std::uint64_t seed = 0;
};

/// Throws InvalidParameterError unless gamma is in (0, 1], the target label
/// is a valid class and the trigger spec validates.
void validate(const PoisonConfig& cfg, int num_classes);

/// ceil(fraction * n), tolerant of representation error in the product.
std::size_t fraction_count(double fraction, std::size_t n);

/// Uniform split; the training part receives ceil(train_fraction * N) items.
/// Relative item order is preserved inside each part.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& dataset, double train_fraction, Rng& rng);

struct BackdooredTrain {
  LabeledDataset dataset;
  /// The trigger to use at test time.
  Trigger trigger;
  /// Indices of poisoned items, ascending.
  std::vector<int> poisoned;
};

/// Injects a trigger into ceil(gamma N) uniformly chosen items and relabels
/// them to the target. Each poisoned item draws from its own substream
/// derived from one base seed taken from `rng`.
BackdooredTrain make_backdoored_train(const LabeledDataset& clean_train, const PoisonConfig& cfg, Rng& rng);

/// Injects `trigger` into every item whose label differs from the target.
/// Labels stay unchanged. The result may be empty.
LabeledDataset make_backdoored_test(const LabeledDataset& clean_test, const Trigger& trigger, const PoisonConfig& cfg,
                                    Rng& rng);

}  // namespace gbd
