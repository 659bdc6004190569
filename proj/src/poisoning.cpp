#include "gbd/poisoning.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "gbd/errors.hpp"

namespace gbd {

std::string_view to_string(TriggerMode m) {
  return m == TriggerMode::kFixed ? "fixed" : "random_per_graph";
}

TriggerMode parse_trigger_mode(std::string_view name) {
  if (name == "fixed") return TriggerMode::kFixed;
  if (name == "random_per_graph" || name == "random") return TriggerMode::kRandomPerGraph;
  throw InvalidParameterError("unknown trigger mode '" + std::string(name) + "'");
}

void validate(const PoisonConfig& cfg, int num_classes) {
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) throw InvalidParameterError("gamma must lie in (0, 1]");
  if (cfg.target_label < 0 || cfg.target_label >= num_classes) {
    throw InvalidParameterError("target label " + std::to_string(cfg.target_label) + " is not a class");
  }
  validate(cfg.trigger_spec);
}

std::size_t fraction_count(double fraction, std::size_t n) {
  const double exact = fraction * static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(exact - 1e-9));
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& dataset, double train_fraction, Rng& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw SplitError("train fraction must lie in (0, 1)");
  if (dataset.size() < 2) throw SplitError("need at least 2 items to split");
  const std::size_t n_train = std::min(fraction_count(train_fraction, dataset.size()), dataset.size() - 1);

  auto chosen = sample_without_replacement(static_cast<int>(dataset.size()), static_cast<int>(n_train), rng);
  std::vector<bool> in_train(dataset.size(), false);
  for (int i : chosen) in_train[static_cast<std::size_t>(i)] = true;

  LabeledDataset train{{}, dataset.num_classes, Provenance::kCleanTrain};
  LabeledDataset test{{}, dataset.num_classes, Provenance::kCleanTest};
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (in_train[i] ? train : test).items.push_back(dataset.items[i]);
  }
  return {std::move(train), std::move(test)};
}

BackdooredTrain make_backdoored_train(const LabeledDataset& clean_train, const PoisonConfig& cfg, Rng& rng) {
  validate(cfg, clean_train.num_classes);
  const std::size_t n = clean_train.size();
  const std::size_t n_poison = std::min(fraction_count(cfg.gamma, n), n);

  Trigger fixed = synthesize(cfg.trigger_spec, rng);
  auto chosen = sample_without_replacement(static_cast<int>(n), static_cast<int>(n_poison), rng);
  std::sort(chosen.begin(), chosen.end());
  const std::uint64_t base = rng();

  BackdooredTrain out{{clean_train.items, clean_train.num_classes, Provenance::kBackdooredTrain}, fixed, chosen};
  for (int index : chosen) {
    Rng item_rng = make_rng(substream_seed(base, static_cast<std::uint64_t>(index)));
    auto& item = out.dataset.items[static_cast<std::size_t>(index)];
    const Trigger trigger =
        cfg.trigger_mode == TriggerMode::kFixed ? fixed : synthesize(cfg.trigger_spec, item_rng);
    Injection injected = inject(item.graph, trigger.graph, cfg.strategy, item_rng);
    item.graph = std::move(injected.graph);
    item.injected_nodes = std::move(injected.mapping);
    item.label = cfg.target_label;
    item.poisoned = true;
  }
  // In random mode the test-time trigger is one more independent sample.
  if (cfg.trigger_mode == TriggerMode::kRandomPerGraph) out.trigger = synthesize(cfg.trigger_spec, rng);
  return out;
}

LabeledDataset make_backdoored_test(const LabeledDataset& clean_test, const Trigger& trigger, const PoisonConfig& cfg,
                                    Rng& rng) {
  validate(cfg, clean_test.num_classes);
  const std::uint64_t base = rng();
  LabeledDataset out{{}, clean_test.num_classes, Provenance::kBackdooredTest};
  for (std::size_t i = 0; i < clean_test.size(); ++i) {
    const auto& item = clean_test.items[i];
    if (item.label == cfg.target_label) continue;
    Rng item_rng = make_rng(substream_seed(base, i));
    Injection injected = inject(item.graph, trigger.graph, cfg.strategy, item_rng);
    out.items.push_back({std::move(injected.graph), item.label, item.original_label, std::move(injected.mapping), true});
  }
  if (out.empty() && !clean_test.empty()) {
    std::cerr << "warning: backdoored test set is empty (every test label equals the target)\n";
  }
  return out;
}

}  // namespace gbd
