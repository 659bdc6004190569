#include "gbd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gbd/dense_subgraph.hpp"
#include "gbd/errors.hpp"
#include "gbd/graph_io.hpp"

namespace gbd {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Metrics

double accuracy(const BaseClassifier& classifier, const LabeledDataset& dataset) {
  if (dataset.empty()) throw UndefinedMetricError("accuracy of an empty dataset");
  std::size_t correct = 0;
  for (const auto& item : dataset.items) correct += classifier(item.graph) == item.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

double target_rate(const BaseClassifier& classifier, const LabeledDataset& dataset, int target) {
  if (dataset.empty()) throw UndefinedMetricError("attack success rate of an empty dataset");
  std::size_t hits = 0;
  for (const auto& item : dataset.items) hits += classifier(item.graph) == target ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

BaseClassifier as_classifier(const GinModel& model) {
  return [&model](const Graph& g) { return predict(model, g); };
}

double clean_accuracy(const GinModel& clean_model, const LabeledDataset& clean_test) {
  return accuracy(as_classifier(clean_model), clean_test);
}

double backdoor_accuracy(const GinModel& backdoored_model, const LabeledDataset& clean_test) {
  return accuracy(as_classifier(backdoored_model), clean_test);
}

double attack_success_rate(const GinModel& backdoored_model, const LabeledDataset& backdoored_test, int target) {
  return target_rate(as_classifier(backdoored_model), backdoored_test, target);
}

AsrVariants asr_variants(const GinModel& clean_model, const GinModel& backdoored_model,
                         const LabeledDataset& clean_test, const LabeledDataset& backdoored_test, int target) {
  const LabeledDataset non_target = without_label(clean_test, target);
  const auto clean = as_classifier(clean_model);
  const auto backdoored = as_classifier(backdoored_model);
  return {target_rate(clean, non_target, target), target_rate(backdoored, non_target, target),
          target_rate(clean, backdoored_test, target), target_rate(backdoored, backdoored_test, target)};
}

AsrVariants asr_variants(const GinModel& clean_model, const GinModel& backdoored_model,
                         const LabeledDataset& clean_test, const Trigger& trigger, int target,
                         InjectionStrategy strategy, Rng& rng) {
  PoisonConfig cfg;
  cfg.target_label = target;
  cfg.trigger_spec = trigger.spec;
  cfg.strategy = strategy;
  const LabeledDataset triggered = make_backdoored_test(clean_test, trigger, cfg, rng);
  return asr_variants(clean_model, backdoored_model, clean_test, triggered, target);
}

// ---------------------------------------------------------------------------
// Synthetic data

void validate(const SyntheticDatasetSpec& spec) {
  if (spec.num_graphs < 0) throw InvalidParameterError("num_graphs must be non-negative");
  if (spec.num_classes != 2 && spec.num_classes != 3) throw InvalidParameterError("num_classes must be 2 or 3");
  const auto classes = static_cast<std::size_t>(spec.num_classes);
  if (spec.mean_nodes.size() != classes || spec.densities.size() != classes) {
    throw InvalidParameterError("per-class node means and densities must have num_classes entries");
  }
  double spread = 0.0;
  for (double a : spec.densities) {
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidParameterError("class density outside [0, 1]");
    for (double b : spec.densities) spread = std::max(spread, std::abs(a - b));
  }
  if (spread < 0.15 - 1e-12) throw InvalidParameterError("class densities must differ by at least 0.15");
  for (double m : spec.mean_nodes) {
    if (!(m > 0.0 && m < 500.0)) throw InvalidParameterError("class node mean must lie in (0, 500)");
  }
}

LabeledDataset generate_synthetic(const SyntheticDatasetSpec& spec, Rng& rng) {
  validate(spec);
  LabeledDataset dataset{{}, spec.num_classes, Provenance::kClean};
  for (int k = 0; k < spec.num_graphs; ++k) {
    const int label = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(spec.num_classes)));
    const auto cls = static_cast<std::size_t>(label);
    const int n = std::max(3, poisson(rng, spec.mean_nodes[cls]));
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (bernoulli(rng, spec.densities[cls])) edges.push_back({i, j});
      }
    }
    dataset.items.push_back({Graph(n, std::move(edges)), label, label, {}, false});
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// Experiments

void validate(const ExperimentConfig& cfg) {
  try {
    if (!(cfg.phi > 0.0 && cfg.phi <= 1.0)) throw ConfigError("phi must lie in (0, 1]");
    if (!(cfg.rho > 0.0 && cfg.rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
    if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
    if (cfg.target_label < 0) throw ConfigError("target_label must be non-negative");
    validate(cfg.gin);
    validate(cfg.smoothing);
    if (cfg.dataset_path.empty()) validate(cfg.synthetic);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

int trigger_size_for(double phi, double average_nodes) {
  return std::max(2, static_cast<int>(std::ceil(phi * average_nodes - 1e-9)));
}

namespace {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

Rng stage_rng(const ExperimentConfig& cfg, const char* name) { return make_rng(stage_seed(cfg.seed, name)); }

GinModel fit(const ExperimentConfig& cfg, const LabeledDataset& data, bool subsample, const char* init_stage,
             const char* train_stage) {
  GinConfig gin = cfg.gin;
  gin.num_classes = data.num_classes;
  gin.seed = stage_seed(cfg.seed, init_stage);
  gin.subsample_training = subsample;
  gin.subsample_beta = cfg.smoothing.beta;
  Rng rng = stage_rng(cfg, train_stage);
  return train(init_model(gin), data, gin, rng);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentResult result;
  result.seed = cfg.seed;
  result.phi = cfg.phi;
  result.rho = cfg.rho;
  result.method = cfg.method;
  result.gamma = cfg.gamma;
  result.target_label = cfg.target_label;
  result.strategy = cfg.strategy;
  result.trigger_mode = cfg.trigger_mode;
  result.smoothing = cfg.smoothing;
  result.smoothing_train_with_subsampling = cfg.smoothing_train_with_subsampling;
  result.dataset = cfg.dataset_path.empty() ? "synthetic" : cfg.dataset_path;

  const LabeledDataset data = stage("dataset", [&] {
    if (!cfg.dataset_path.empty()) return read_dataset(std::filesystem::path(cfg.dataset_path));
    Rng rng = stage_rng(cfg, "dataset");
    return generate_synthetic(cfg.synthetic, rng);
  });
  result.num_graphs = data.size();
  result.average_nodes = average_node_count(data);
  result.trigger_size = trigger_size_for(cfg.phi, result.average_nodes);

  auto [clean_train, clean_test] = stage("split", [&] {
    Rng rng = stage_rng(cfg, "split");
    return split(data, cfg.train_fraction, rng);
  });

  PoisonConfig poison;
  poison.gamma = cfg.gamma;
  poison.target_label = cfg.target_label;
  poison.trigger_mode = cfg.trigger_mode;
  poison.strategy = cfg.strategy;
  poison.trigger_spec = {result.trigger_size, cfg.rho, cfg.method, cfg.sw_rewire_prob, stage_seed(cfg.seed, "trigger")};
  poison.seed = stage_seed(cfg.seed, "poison");

  const BackdooredTrain backdoored_train = stage("poison", [&] {
    Rng rng = stage_rng(cfg, "poison_train");
    return make_backdoored_train(clean_train, poison, rng);
  });
  const LabeledDataset backdoored_test = stage("poison", [&] {
    Rng rng = stage_rng(cfg, "poison_test");
    return make_backdoored_test(clean_test, backdoored_train.trigger, poison, rng);
  });

  const GinModel clean_model = stage("train", [&] { return fit(cfg, clean_train, false, "init_clean", "train_clean"); });
  const GinModel backdoored_model =
      stage("train", [&] { return fit(cfg, backdoored_train.dataset, false, "init_backdoored", "train_backdoored"); });

  stage("evaluate", [&] {
    result.clean_accuracy = clean_accuracy(clean_model, clean_test);
    result.backdoor_accuracy = backdoor_accuracy(backdoored_model, clean_test);
    result.asr = asr_variants(clean_model, backdoored_model, clean_test, backdoored_test, cfg.target_label);
    result.attack_success_rate = result.asr.both;
  });

  if (cfg.smoothing_enabled) {
    stage("smoothing", [&] {
      GinModel smooth_clean = clean_model;
      GinModel smooth_backdoored = backdoored_model;
      if (cfg.smoothing_train_with_subsampling) {
        smooth_clean = fit(cfg, clean_train, true, "init_clean", "train_smoothed_clean");
        smooth_backdoored = fit(cfg, backdoored_train.dataset, true, "init_backdoored", "train_smoothed_backdoored");
      }
      const auto clean_base = as_classifier(smooth_clean);
      const auto backdoored_base = as_classifier(smooth_backdoored);

      Rng clean_rng = stage_rng(cfg, "smooth_clean");
      result.smoothed_clean_accuracy =
          accuracy([&](const Graph& g) { return smoothed_predict(clean_base, g, cfg.smoothing, clean_rng).label; },
                   clean_test);
      Rng backdoored_rng = stage_rng(cfg, "smooth_backdoored");
      result.smoothed_backdoor_accuracy = accuracy(
          [&](const Graph& g) { return smoothed_predict(backdoored_base, g, cfg.smoothing, backdoored_rng).label; },
          clean_test);

      Rng cert_rng = stage_rng(cfg, "certify");
      std::size_t hits = 0;
      for (const auto& item : backdoored_test.items) {
        const Certificate cert = certify(backdoored_base, item.graph, cfg.smoothing, cert_rng);
        hits += cert.predicted_label == cfg.target_label ? 1 : 0;
        if (!cert.certified_trigger_size) {
          ++result.certified_abstain;
          continue;
        }
        const auto t = static_cast<std::size_t>(*cert.certified_trigger_size);
        if (result.certified_trigger_sizes.size() <= t) result.certified_trigger_sizes.resize(t + 1, 0);
        ++result.certified_trigger_sizes[t];
      }
      if (!backdoored_test.empty()) {
        result.smoothed_attack_success_rate = static_cast<double>(hits) / static_cast<double>(backdoored_test.size());
      }
    });
  }

  if (cfg.defense_audit) {
    stage("defense", [&] {
      std::size_t audited = 0;
      std::size_t detected = 0;
      double overlap = 0.0;
      LabeledDataset stripped{{}, backdoored_test.num_classes, Provenance::kBackdooredTest};
      for (const auto& item : backdoored_test.items) {
        const int t = result.trigger_size;
        if (item.graph.node_count() < t) {
          stripped.items.push_back(item);
          continue;
        }
        const auto found = detect_dense_subgraph(item.graph, t);
        if (!item.injected_nodes.empty()) {
          ++audited;
          detected += detection_success(item.graph, item.injected_nodes, t) ? 1 : 0;
          overlap += jaccard(found, item.injected_nodes);
        }
        LabeledGraph cleaned = item;
        cleaned.graph = remove_edges_within(item.graph, found);
        stripped.items.push_back(std::move(cleaned));
      }
      if (audited > 0) {
        result.detection_success_rate = static_cast<double>(detected) / static_cast<double>(audited);
        result.detection_jaccard = overlap / static_cast<double>(audited);
      }
      if (!stripped.empty()) {
        result.stripped_attack_success_rate = attack_success_rate(backdoored_model, stripped, cfg.target_label);
      }
    });
  }
  return result;
}

ExperimentConfig with_parameter(ExperimentConfig cfg, const std::string& name, double value) {
  if (name == "phi") {
    cfg.phi = value;
  } else if (name == "rho") {
    cfg.rho = value;
  } else if (name == "gamma") {
    cfg.gamma = value;
  } else if (name == "beta") {
    cfg.smoothing.beta = value;
  } else if (name == "d") {
    cfg.smoothing.d = static_cast<int>(std::lround(value));
  } else {
    throw ConfigError("unknown sweep parameter '" + name + "' (expected phi, rho, gamma, beta or d)");
  }
  return cfg;
}

std::vector<ExperimentResult> run_sweep(const ExperimentConfig& cfg, const std::string& parameter,
                                        const std::vector<double>& values) {
  std::vector<ExperimentResult> rows;
  for (double value : values) {
    ExperimentResult row = run_experiment(with_parameter(cfg, parameter, value));
    std::ostringstream label;
    label << parameter << '=' << value;
    row.setting = label.str();
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns{
      "setting", "seed", "dataset", "num_graphs", "avg_nodes", "trigger_size", "phi", "rho", "method", "gamma",
      "target_label", "strategy", "trigger_mode", "d", "beta", "alpha", "train_with_subsampling",
      "clean_accuracy", "backdoor_accuracy", "attack_success_rate", "asr_baseline", "asr_train", "asr_test",
      "asr_both", "smoothed_clean_accuracy", "smoothed_backdoor_accuracy", "smoothed_attack_success_rate",
      "certified_abstain", "certified_trigger_size_hist", "detection_success_rate", "detection_jaccard",
      "stripped_attack_success_rate"};
  return columns;
}

namespace {

std::string fixed(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << value;
  return out.str();
}

std::string fixed(const std::optional<double>& value) { return value ? fixed(*value) : std::string(); }

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

/// "T:count" pairs separated by ';'.
std::string histogram(const std::vector<int>& counts) {
  std::string out;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t] == 0) continue;
    if (!out.empty()) out += ';';
    out += std::to_string(t) + ':' + std::to_string(counts[t]);
  }
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ExperimentResult>& rows) {
  const auto& columns = csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& r : rows) {
    const bool smoothed = r.smoothed_clean_accuracy.has_value();
    const std::vector<std::string> fields{
        csv_field(r.setting.empty() ? "default" : r.setting),
        std::to_string(r.seed),
        csv_field(r.dataset),
        std::to_string(r.num_graphs),
        fixed(r.average_nodes),
        std::to_string(r.trigger_size),
        fixed(r.phi),
        fixed(r.rho),
        std::string(to_string(r.method)),
        fixed(r.gamma),
        std::to_string(r.target_label),
        std::string(to_string(r.strategy)),
        std::string(to_string(r.trigger_mode)),
        std::to_string(r.smoothing.d),
        fixed(r.smoothing.beta),
        fixed(r.smoothing.alpha),
        r.smoothing_train_with_subsampling ? "1" : "0",
        fixed(r.clean_accuracy),
        fixed(r.backdoor_accuracy),
        fixed(r.attack_success_rate),
        fixed(r.asr.baseline),
        fixed(r.asr.train),
        fixed(r.asr.test),
        fixed(r.asr.both),
        fixed(r.smoothed_clean_accuracy),
        fixed(r.smoothed_backdoor_accuracy),
        fixed(r.smoothed_attack_success_rate),
        smoothed ? std::to_string(r.certified_abstain) : std::string(),
        histogram(r.certified_trigger_sizes),
        fixed(r.detection_success_rate),
        fixed(r.detection_jaccard),
        fixed(r.stripped_attack_success_rate)};
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end()) {
      throw ConfigError("unknown config field '" + where + key + "'");
    }
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json to_json(const GinConfig& g) {
  return {{"num_layers", g.num_layers}, {"hidden_dim", g.hidden_dim}, {"num_classes", g.num_classes},
          {"epsilon", g.epsilon},       {"learning_rate", g.learning_rate}, {"batch_size", g.batch_size},
          {"max_epochs", g.max_epochs}, {"seed", g.seed}, {"subsample_training", g.subsample_training},
          {"subsample_beta", g.subsample_beta}};
}

GinConfig gin_from_json(const json& j, GinConfig g) {
  reject_unknown(j, {"num_layers", "hidden_dim", "num_classes", "epsilon", "learning_rate", "batch_size",
                     "max_epochs", "seed", "subsample_training", "subsample_beta"},
                 "gin.");
  read_field(j, "num_layers", g.num_layers);
  read_field(j, "hidden_dim", g.hidden_dim);
  read_field(j, "num_classes", g.num_classes);
  read_field(j, "epsilon", g.epsilon);
  read_field(j, "learning_rate", g.learning_rate);
  read_field(j, "batch_size", g.batch_size);
  read_field(j, "max_epochs", g.max_epochs);
  read_field(j, "seed", g.seed);
  read_field(j, "subsample_training", g.subsample_training);
  read_field(j, "subsample_beta", g.subsample_beta);
  return g;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.at(0).size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != c) throw FormatError("ragged matrix in model file");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

json result_to_json(const ExperimentResult& r) {
  json j{{"setting", r.setting.empty() ? "default" : r.setting},
         {"trigger_size", r.trigger_size},
         {"avg_nodes", r.average_nodes},
         {"num_graphs", r.num_graphs},
         {"clean_accuracy", r.clean_accuracy},
         {"backdoor_accuracy", r.backdoor_accuracy},
         {"attack_success_rate", r.attack_success_rate},
         {"asr_baseline", r.asr.baseline},
         {"asr_train", r.asr.train},
         {"asr_test", r.asr.test},
         {"asr_both", r.asr.both},
         {"certified_trigger_size_hist", r.certified_trigger_sizes},
         {"certified_abstain", r.certified_abstain}};
  auto put = [&](const char* key, const std::optional<double>& v) { j[key] = v ? json(*v) : json(nullptr); };
  put("smoothed_clean_accuracy", r.smoothed_clean_accuracy);
  put("smoothed_backdoor_accuracy", r.smoothed_backdoor_accuracy);
  put("smoothed_attack_success_rate", r.smoothed_attack_success_rate);
  put("detection_success_rate", r.detection_success_rate);
  put("detection_jaccard", r.detection_jaccard);
  put("stripped_attack_success_rate", r.stripped_attack_success_rate);
  return j;
}

json config_to_json(const ExperimentConfig& c) {
  return {{"dataset", c.dataset_path},
          {"synthetic",
           {{"num_graphs", c.synthetic.num_graphs},
            {"num_classes", c.synthetic.num_classes},
            {"mean_nodes", c.synthetic.mean_nodes},
            {"densities", c.synthetic.densities}}},
          {"train_fraction", c.train_fraction},
          {"phi", c.phi},
          {"rho", c.rho},
          {"method", std::string(to_string(c.method))},
          {"sw_rewire_prob", c.sw_rewire_prob},
          {"gamma", c.gamma},
          {"target_label", c.target_label},
          {"strategy", std::string(to_string(c.strategy))},
          {"trigger_mode", std::string(to_string(c.trigger_mode))},
          {"gin", to_json(c.gin)},
          {"smoothing",
           {{"enabled", c.smoothing_enabled},
            {"train_with_subsampling", c.smoothing_train_with_subsampling},
            {"d", c.smoothing.d},
            {"beta", c.smoothing.beta},
            {"alpha", c.smoothing.alpha}}},
          {"defense_audit", c.defense_audit},
          {"seed", c.seed},
          {"output", c.output_path}};
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text, const ExperimentConfig& defaults) {
  ExperimentConfig c = defaults;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j, {"dataset", "synthetic", "train_fraction", "phi", "rho", "method", "sw_rewire_prob", "gamma",
                       "target_label", "strategy", "trigger_mode", "gin", "smoothing", "defense_audit", "seed",
                       "output"},
                   "");
    read_field(j, "dataset", c.dataset_path);
    if (j.contains("synthetic")) {
      const json& s = j.at("synthetic");
      reject_unknown(s, {"num_graphs", "num_classes", "mean_nodes", "densities"}, "synthetic.");
      read_field(s, "num_graphs", c.synthetic.num_graphs);
      read_field(s, "num_classes", c.synthetic.num_classes);
      read_field(s, "mean_nodes", c.synthetic.mean_nodes);
      read_field(s, "densities", c.synthetic.densities);
    }
    read_field(j, "train_fraction", c.train_fraction);
    read_field(j, "phi", c.phi);
    read_field(j, "rho", c.rho);
    if (j.contains("method")) c.method = parse_synthesis_method(j.at("method").get<std::string>());
    read_field(j, "sw_rewire_prob", c.sw_rewire_prob);
    read_field(j, "gamma", c.gamma);
    read_field(j, "target_label", c.target_label);
    if (j.contains("strategy")) c.strategy = parse_injection_strategy(j.at("strategy").get<std::string>());
    if (j.contains("trigger_mode")) c.trigger_mode = parse_trigger_mode(j.at("trigger_mode").get<std::string>());
    if (j.contains("gin")) c.gin = gin_from_json(j.at("gin"), c.gin);
    if (j.contains("smoothing")) {
      const json& s = j.at("smoothing");
      reject_unknown(s, {"enabled", "train_with_subsampling", "d", "beta", "alpha"}, "smoothing.");
      read_field(s, "enabled", c.smoothing_enabled);
      read_field(s, "train_with_subsampling", c.smoothing_train_with_subsampling);
      read_field(s, "d", c.smoothing.d);
      read_field(s, "beta", c.smoothing.beta);
      read_field(s, "alpha", c.smoothing.alpha);
    }
    read_field(j, "defense_audit", c.defense_audit);
    read_field(j, "seed", c.seed);
    read_field(j, "output", c.output_path);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::string config_to_json_text(const ExperimentConfig& cfg) { return config_to_json(cfg).dump(2); }

std::string sidecar_json_text(const ExperimentConfig& cfg, const std::vector<ExperimentResult>& rows) {
  json results = json::array();
  for (const auto& r : rows) results.push_back(result_to_json(r));
  json doc{{"config", config_to_json(cfg)},
           {"seed_derivation", "stage_seed = splitmix64(master_seed ^ fnv1a64(stage_name))"},
           {"results", std::move(results)}};
  return doc.dump(2);
}

std::string model_to_json_text(const GinModel& model) {
  json layers = json::array();
  for (const GinLayer& layer : model.params.layers) {
    layers.push_back({{"w1", matrix_to_json(layer.w1)},
                      {"b1", matrix_to_json(layer.b1)},
                      {"w2", matrix_to_json(layer.w2)},
                      {"b2", matrix_to_json(layer.b2)}});
  }
  json doc{{"config", to_json(model.config)},
           {"layers", std::move(layers)},
           {"w_out", matrix_to_json(model.params.w_out)},
           {"b_out", matrix_to_json(model.params.b_out)}};
  return doc.dump();
}

GinModel model_from_json_text(const std::string& text) {
  try {
    const json j = json::parse(text);
    GinModel model;
    model.config = gin_from_json(j.at("config"), GinConfig{});
    for (const json& layer : j.at("layers")) {
      model.params.layers.push_back({matrix_from_json(layer.at("w1")), matrix_from_json(layer.at("b1")),
                                     matrix_from_json(layer.at("w2")), matrix_from_json(layer.at("b2"))});
    }
    model.params.w_out = matrix_from_json(j.at("w_out"));
    model.params.b_out = matrix_from_json(j.at("b_out"));
    if (static_cast<int>(model.params.layers.size()) != model.config.num_layers) {
      throw FormatError("model layer count does not match its config");
    }
    return model;
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid model JSON: ") + e.what());
  }
}

}  // namespace gbd
