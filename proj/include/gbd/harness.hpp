#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gbd/dataset.hpp"
#include "gbd/gin.hpp"
#include "gbd/injection.hpp"
#include "gbd/poisoning.hpp"
#include "gbd/smoothing.hpp"
#include "gbd/trigger.hpp"

namespace gbd {

// ---------------------------------------------------------------------------
// Metrics. Every metric throws UndefinedMetricError on an empty dataset.

/// Fraction of items whose prediction equals their label.
double accuracy(const BaseClassifier& classifier, const LabeledDataset& dataset);

/// Fraction of items predicted as `target`.
double target_rate(const BaseClassifier& classifier, const LabeledDataset& dataset, int target);

BaseClassifier as_classifier(const GinModel& model);

double clean_accuracy(const GinModel& clean_model, const LabeledDataset& clean_test);
double backdoor_accuracy(const GinModel& backdoored_model, const LabeledDataset& clean_test);
double attack_success_rate(const GinModel& backdoored_model, const LabeledDataset& backdoored_test, int target);

struct AsrVariants {
  double baseline = 0.0;  ///< clean model, clean non-target graphs
  double train = 0.0;     ///< backdoored model, clean non-target graphs
  double test = 0.0;      ///< clean model, triggered non-target graphs
  double both = 0.0;      ///< backdoored model, triggered non-target graphs
};

/// `backdoored_test` must hold the triggered versions of the non-target
/// items of `clean_test` (see make_backdoored_test).
AsrVariants asr_variants(const GinModel& clean_model, const GinModel& backdoored_model,
                         const LabeledDataset& clean_test, const LabeledDataset& backdoored_test, int target);

/// Same, injecting `trigger` into the non-target clean items with `strategy`.
AsrVariants asr_variants(const GinModel& clean_model, const GinModel& backdoored_model,
                         const LabeledDataset& clean_test, const Trigger& trigger, int target,
                         InjectionStrategy strategy, Rng& rng);

// ---------------------------------------------------------------------------
// Synthetic data.

struct SyntheticDatasetSpec {
  int num_graphs = 300;
  int num_classes = 2;
  /// Per-class Poisson mean of the node count.
  std::vector<double> mean_nodes{45.0, 45.0};
  /// Per-class ER edge probability.
  std::vector<double> densities{0.04, 0.20};
  std::uint64_t seed = 0;
};

/// Throws InvalidParameterError unless the per-class vectors match
/// num_classes (2 or 3) and some two class densities differ by >= 0.15.
void validate(const SyntheticDatasetSpec& spec);

/// Per item: uniform class, node count Poisson(mean) floored at 3, ER graph
/// at the class density.
LabeledDataset generate_synthetic(const SyntheticDatasetSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Experiments.

struct ExperimentConfig {
  /// Dataset file in the graph text format; empty selects `synthetic`.
  std::string dataset_path;
  SyntheticDatasetSpec synthetic;
  double train_fraction = 2.0 / 3.0;

  double phi = 0.20;
  double rho = 0.8;
  SynthesisMethod method = SynthesisMethod::kErdosRenyi;
  double sw_rewire_prob = 0.8;
  double gamma = 0.05;
  int target_label = 1;
  InjectionStrategy strategy = InjectionStrategy::kRandom;
  TriggerMode trigger_mode = TriggerMode::kFixed;

  GinConfig gin;
  SmoothingConfig smoothing;
  bool smoothing_enabled = false;
  bool smoothing_train_with_subsampling = true;
  bool defense_audit = true;

  std::uint64_t seed = 0;
  std::string output_path;
};

/// Throws ConfigError on out-of-range fields.
void validate(const ExperimentConfig& cfg);

/// ceil(phi * avg_nodes), at least 2.
int trigger_size_for(double phi, double average_nodes);

struct ExperimentResult {
  std::string setting;
  std::uint64_t seed = 0;
  std::string dataset;
  std::size_t num_graphs = 0;
  double average_nodes = 0.0;
  int trigger_size = 0;
  double phi = 0.0;
  double rho = 0.0;
  SynthesisMethod method = SynthesisMethod::kErdosRenyi;
  double gamma = 0.0;
  int target_label = 1;
  InjectionStrategy strategy = InjectionStrategy::kRandom;
  TriggerMode trigger_mode = TriggerMode::kFixed;
  SmoothingConfig smoothing;
  bool smoothing_train_with_subsampling = true;

  double clean_accuracy = 0.0;
  double backdoor_accuracy = 0.0;
  double attack_success_rate = 0.0;
  AsrVariants asr;

  std::optional<double> smoothed_clean_accuracy;
  std::optional<double> smoothed_backdoor_accuracy;
  std::optional<double> smoothed_attack_success_rate;
  /// certified_trigger_sizes[T] = number of backdoored test graphs whose
  /// smoothed backdoored prediction is certified up to trigger size T.
  std::vector<int> certified_trigger_sizes;
  int certified_abstain = 0;

  std::optional<double> detection_success_rate;
  std::optional<double> detection_jaccard;
  std::optional<double> stripped_attack_success_rate;
};

/// split -> poison -> train clean and backdoored models -> metrics ->
/// optional smoothing with certification -> optional dense-subgraph audit.
/// Stage seeds are stage_seed(cfg.seed, "<stage>"). Stage failures are
/// rethrown as StageError.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Numeric sweep parameters: phi, rho, gamma, beta, d.
ExperimentConfig with_parameter(ExperimentConfig cfg, const std::string& name, double value);

std::vector<ExperimentResult> run_sweep(const ExperimentConfig& cfg, const std::string& parameter,
                                        const std::vector<double>& values);

/// Fixed column order; see csv_columns().
const std::vector<std::string>& csv_columns();
void write_csv(std::ostream& out, const std::vector<ExperimentResult>& rows);

/// JSON field names match ExperimentConfig. Unknown keys are a ConfigError.
ExperimentConfig config_from_json_text(const std::string& text, const ExperimentConfig& defaults = {});
std::string config_to_json_text(const ExperimentConfig& cfg);

/// Model weights and config as JSON, doubles printed round-trip exact.
std::string model_to_json_text(const GinModel& model);
GinModel model_from_json_text(const std::string& text);

/// Config echo plus the result rows, as JSON.
std::string sidecar_json_text(const ExperimentConfig& cfg, const std::vector<ExperimentResult>& rows);

}  // namespace gbd
