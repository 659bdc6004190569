// Command-line front end: trigger synthesis, poisoning, training, evaluation,
// certification, dense-subgraph detection and full experiment runs.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbd/dense_subgraph.hpp"
#include "gbd/errors.hpp"
#include "gbd/gin.hpp"
#include "gbd/graph_io.hpp"
#include "gbd/harness.hpp"
#include "gbd/poisoning.hpp"
#include "gbd/smoothing.hpp"
#include "gbd/trigger.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gbd::ConfigError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gbd::Error("cannot write " + path);
  out << text;
}

/// Options shared by `run` and `sweep`; each overrides the config file only
/// when given on the command line.
struct ExperimentFlags {
  std::string config_path;
  std::string dataset;
  std::string method;
  std::string strategy;
  std::string trigger_mode;
  std::string out;
  std::uint64_t seed = 0;
  double phi = 0, rho = 0, gamma = 0, beta = 0, alpha = 0, lr = 0;
  int target = 0, d = 0, epochs = 0, hidden = 0, layers = 0, batch = 0;
  bool smoothing = false;
  bool no_subsample_training = false;
  bool no_defense = false;

  std::vector<std::pair<CLI::Option*, std::function<void(gbd::ExperimentConfig&)>>> setters;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config with ExperimentConfig field names");
    add(app->add_option("--dataset", dataset, "dataset file (graph text format); default synthetic"),
        [this](auto& c) { c.dataset_path = dataset; });
    add(app->add_option("--phi", phi, "trigger size as a fraction of the average node count"),
        [this](auto& c) { c.phi = phi; });
    add(app->add_option("--rho", rho, "trigger density"), [this](auto& c) { c.rho = rho; });
    add(app->add_option("--method", method, "trigger synthesis method: ER, SW, PA"),
        [this](auto& c) { c.method = gbd::parse_synthesis_method(method); });
    add(app->add_option("--gamma", gamma, "poisoning intensity"), [this](auto& c) { c.gamma = gamma; });
    add(app->add_option("--target", target, "target label"), [this](auto& c) { c.target_label = target; });
    add(app->add_option("--strategy", strategy, "random, max_degree, min_degree, densely_connected"),
        [this](auto& c) { c.strategy = gbd::parse_injection_strategy(strategy); });
    add(app->add_option("--trigger-mode", trigger_mode, "fixed or random_per_graph"),
        [this](auto& c) { c.trigger_mode = gbd::parse_trigger_mode(trigger_mode); });
    add(app->add_option("--epochs", epochs, "training epochs"), [this](auto& c) { c.gin.max_epochs = epochs; });
    add(app->add_option("--lr", lr, "learning rate"), [this](auto& c) { c.gin.learning_rate = lr; });
    add(app->add_option("--hidden", hidden, "GIN hidden width"), [this](auto& c) { c.gin.hidden_dim = hidden; });
    add(app->add_option("--layers", layers, "GIN layers"), [this](auto& c) { c.gin.num_layers = layers; });
    add(app->add_option("--batch-size", batch, "minibatch size"), [this](auto& c) { c.gin.batch_size = batch; });
    add(app->add_option("--d", d, "number of subsampled graphs"), [this](auto& c) { c.smoothing.d = d; });
    add(app->add_option("--beta", beta, "subsampling ratio"), [this](auto& c) { c.smoothing.beta = beta; });
    add(app->add_option("--alpha", alpha, "certification failure probability"),
        [this](auto& c) { c.smoothing.alpha = alpha; });
    add(app->add_flag("--smoothing", smoothing, "evaluate smoothed classifiers and certify"),
        [](auto& c) { c.smoothing_enabled = true; });
    add(app->add_flag("--no-subsample-training", no_subsample_training,
                      "build smoothed classifiers from normally trained base models"),
        [](auto& c) { c.smoothing_train_with_subsampling = false; });
    add(app->add_flag("--no-defense", no_defense, "skip the dense-subgraph defense audit"),
        [](auto& c) { c.defense_audit = false; });
    add(app->add_option("--out", out, "CSV output path (JSON sidecar at <out>.json)"),
        [this](auto& c) { c.output_path = out; });
  }

  void add(CLI::Option* option, std::function<void(gbd::ExperimentConfig&)> setter) {
    setters.emplace_back(option, std::move(setter));
  }

  gbd::ExperimentConfig resolve(CLI::Option* seed_option) const {
    gbd::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = gbd::config_from_json_text(read_file(config_path));
    try {
      for (const auto& [option, setter] : setters) {
        if (option->count() > 0) setter(cfg);
      }
    } catch (const gbd::InvalidParameterError& e) {
      throw gbd::ConfigError(e.what());
    }
    if (seed_option->count() > 0) cfg.seed = seed;
    gbd::validate(cfg);
    return cfg;
  }
};

void emit_results(const gbd::ExperimentConfig& cfg, const std::vector<gbd::ExperimentResult>& rows) {
  std::ostringstream csv;
  gbd::write_csv(csv, rows);
  if (cfg.output_path.empty()) {
    std::cout << csv.str();
    return;
  }
  write_file(cfg.output_path, csv.str());
  write_file(cfg.output_path + ".json", gbd::sidecar_json_text(cfg, rows) + "\n");
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw gbd::ConfigError("bad sweep value '" + item + "'");
    }
  }
  if (values.empty()) throw gbd::ConfigError("sweep needs at least one value");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgraph backdoor attacks and certified defenses for graph classification"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize a trigger subgraph");
  int synth_size = 4;
  double synth_rho = 0.8;
  double synth_rewire = 0.8;
  std::string synth_method = "ER";
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("--size", synth_size, "trigger node count t")->required();
  synth->add_option("--rho", synth_rho, "trigger density");
  synth->add_option("--method", synth_method, "ER, SW or PA");
  synth->add_option("--rewire", synth_rewire, "SW rewiring probability");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--out", synth_out, "output file (default stdout)");

  // poison
  auto* poison_cmd = app.add_subcommand("poison", "split a dataset and build backdoored train/test sets");
  std::string poison_input;
  std::string poison_prefix = "poisoned";
  double poison_phi = 0.2;
  double poison_train_fraction = 2.0 / 3.0;
  gbd::PoisonConfig poison_cfg;
  std::string poison_method = "ER";
  std::string poison_strategy = "random";
  std::string poison_mode = "fixed";
  poison_cmd->add_option("--input", poison_input, "dataset file")->required();
  poison_cmd->add_option("--prefix", poison_prefix, "output path prefix");
  poison_cmd->add_option("--phi", poison_phi, "trigger size as a fraction of the average node count");
  poison_cmd->add_option("--rho", poison_cfg.trigger_spec.density, "trigger density");
  poison_cmd->add_option("--method", poison_method, "ER, SW or PA");
  poison_cmd->add_option("--gamma", poison_cfg.gamma, "poisoning intensity");
  poison_cmd->add_option("--target", poison_cfg.target_label, "target label");
  poison_cmd->add_option("--strategy", poison_strategy, "injection strategy");
  poison_cmd->add_option("--trigger-mode", poison_mode, "fixed or random_per_graph");
  poison_cmd->add_option("--train-fraction", poison_train_fraction, "training fraction");
  poison_cmd->add_option("--seed", poison_cfg.seed, "random seed");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a GIN classifier");
  std::string train_input;
  std::string train_out = "model.json";
  gbd::GinConfig train_cfg;
  std::uint64_t train_seed = 0;
  double train_beta = 0.1;
  train_cmd->add_option("--input", train_input, "training dataset file")->required();
  train_cmd->add_option("--out", train_out, "model output (JSON)");
  train_cmd->add_option("--epochs", train_cfg.max_epochs, "epochs");
  train_cmd->add_option("--lr", train_cfg.learning_rate, "learning rate");
  train_cmd->add_option("--hidden", train_cfg.hidden_dim, "hidden width");
  train_cmd->add_option("--layers", train_cfg.num_layers, "GIN layers");
  train_cmd->add_option("--batch-size", train_cfg.batch_size, "minibatch size");
  train_cmd->add_option("--seed", train_seed, "random seed");
  auto* train_beta_opt =
      train_cmd->add_option("--subsample-beta", train_beta, "train with subsampling at this ratio");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "accuracy and target rate of a model on a dataset");
  std::string eval_model;
  std::string eval_input;
  int eval_target = 1;
  eval_cmd->add_option("--model", eval_model, "model JSON")->required();
  eval_cmd->add_option("--input", eval_input, "dataset file")->required();
  eval_cmd->add_option("--target", eval_target, "target label for the attack success rate");

  // certify
  auto* certify_cmd = app.add_subcommand("certify", "smoothed prediction with certified radius per graph");
  std::string certify_model;
  std::string certify_input;
  std::string certify_out;
  gbd::SmoothingConfig certify_cfg;
  certify_cmd->add_option("--model", certify_model, "base model JSON")->required();
  certify_cmd->add_option("--input", certify_input, "dataset file")->required();
  certify_cmd->add_option("--d", certify_cfg.d, "number of subsampled graphs");
  certify_cmd->add_option("--beta", certify_cfg.beta, "subsampling ratio");
  certify_cmd->add_option("--alpha", certify_cfg.alpha, "failure probability");
  certify_cmd->add_option("--seed", certify_cfg.seed, "random seed");
  certify_cmd->add_option("--out", certify_out, "CSV output (default stdout)");

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "dense-subgraph detection per graph");
  std::string detect_input;
  std::string detect_strip_out;
  int detect_size = 0;
  detect_cmd->add_option("--input", detect_input, "dataset file")->required();
  detect_cmd->add_option("--size", detect_size, "dense subgraph size t")->required();
  detect_cmd->add_option("--strip-out", detect_strip_out, "write the dataset with detected edges removed");

  // run / sweep
  auto* run_cmd = app.add_subcommand("run", "full pipeline for one configuration");
  ExperimentFlags run_flags;
  run_flags.attach(run_cmd);
  auto* run_seed = run_cmd->add_option("--seed", run_flags.seed, "master seed")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "one pipeline run per parameter value");
  ExperimentFlags sweep_flags;
  sweep_flags.attach(sweep_cmd);
  auto* sweep_seed = sweep_cmd->add_option("--seed", sweep_flags.seed, "master seed");
  std::string sweep_param = "phi";
  std::string sweep_values = "0.1,0.2,0.3,0.4,0.5";
  sweep_cmd->add_option("--param", sweep_param, "phi, rho, gamma, beta or d");
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*synth) {
      gbd::TriggerSpec spec{synth_size, synth_rho, gbd::parse_synthesis_method(synth_method), synth_rewire, synth_seed};
      const gbd::Trigger trigger = gbd::synthesize(spec);
      gbd::LabeledDataset one{{{trigger.graph, 0, 0, {}, false}}, 2, gbd::Provenance::kClean};
      std::ostringstream text;
      text << "# trigger method=" << gbd::to_string(spec.method) << " t=" << spec.size << " rho=" << spec.density
           << " realized_density=" << std::setprecision(6) << trigger.realized_density << '\n';
      gbd::write_dataset(text, one);
      if (synth_out.empty()) {
        std::cout << text.str();
      } else {
        write_file(synth_out, text.str());
      }
    } else if (*poison_cmd) {
      const gbd::LabeledDataset data = gbd::read_dataset(std::filesystem::path(poison_input));
      poison_cfg.trigger_spec.method = gbd::parse_synthesis_method(poison_method);
      poison_cfg.strategy = gbd::parse_injection_strategy(poison_strategy);
      poison_cfg.trigger_mode = gbd::parse_trigger_mode(poison_mode);
      poison_cfg.trigger_spec.size = gbd::trigger_size_for(poison_phi, gbd::average_node_count(data));
      poison_cfg.trigger_spec.seed = gbd::stage_seed(poison_cfg.seed, "trigger");
      gbd::validate(poison_cfg, data.num_classes);

      gbd::Rng split_rng = gbd::make_rng(gbd::stage_seed(poison_cfg.seed, "split"));
      auto [train, test] = gbd::split(data, poison_train_fraction, split_rng);
      gbd::Rng train_rng = gbd::make_rng(gbd::stage_seed(poison_cfg.seed, "poison_train"));
      const gbd::BackdooredTrain backdoored = gbd::make_backdoored_train(train, poison_cfg, train_rng);
      gbd::Rng test_rng = gbd::make_rng(gbd::stage_seed(poison_cfg.seed, "poison_test"));
      const gbd::LabeledDataset backdoored_test =
          gbd::make_backdoored_test(test, backdoored.trigger, poison_cfg, test_rng);

      gbd::write_dataset(std::filesystem::path(poison_prefix + ".clean_train.txt"), train);
      gbd::write_dataset(std::filesystem::path(poison_prefix + ".clean_test.txt"), test);
      gbd::write_dataset(std::filesystem::path(poison_prefix + ".backdoored_train.txt"), backdoored.dataset);
      gbd::write_dataset(std::filesystem::path(poison_prefix + ".backdoored_test.txt"), backdoored_test);
      gbd::write_dataset(std::filesystem::path(poison_prefix + ".trigger.txt"),
                         gbd::LabeledDataset{{{backdoored.trigger.graph, poison_cfg.target_label,
                                               poison_cfg.target_label, {}, false}},
                                             std::max(2, poison_cfg.target_label + 1),
                                             gbd::Provenance::kClean});
      std::cout << "trigger_size=" << poison_cfg.trigger_spec.size << " poisoned=" << backdoored.poisoned.size()
                << " train=" << train.size() << " test=" << test.size()
                << " backdoored_test=" << backdoored_test.size() << '\n';
    } else if (*train_cmd) {
      const gbd::LabeledDataset data = gbd::read_dataset(std::filesystem::path(train_input));
      train_cfg.num_classes = data.num_classes;
      train_cfg.seed = gbd::stage_seed(train_seed, "init");
      train_cfg.subsample_training = train_beta_opt->count() > 0;
      train_cfg.subsample_beta = train_beta;
      gbd::validate(train_cfg);
      gbd::Rng rng = gbd::make_rng(gbd::stage_seed(train_seed, "train"));
      std::vector<double> losses;
      const gbd::GinModel model = gbd::train(gbd::init_model(train_cfg), data, train_cfg, rng, &losses);
      write_file(train_out, gbd::model_to_json_text(model) + "\n");
      std::cout << "final_loss=" << (losses.empty() ? 0.0 : losses.back()) << '\n';
    } else if (*eval_cmd) {
      const gbd::GinModel model = gbd::model_from_json_text(read_file(eval_model));
      const gbd::LabeledDataset data = gbd::read_dataset(std::filesystem::path(eval_input));
      const auto classifier = gbd::as_classifier(model);
      std::cout << "accuracy=" << std::fixed << std::setprecision(6) << gbd::accuracy(classifier, data)
                << " target_rate=" << gbd::target_rate(classifier, data, eval_target) << '\n';
    } else if (*certify_cmd) {
      gbd::validate(certify_cfg);
      const gbd::GinModel model = gbd::model_from_json_text(read_file(certify_model));
      const gbd::LabeledDataset data = gbd::read_dataset(std::filesystem::path(certify_input));
      const auto base = gbd::as_classifier(model);
      gbd::Rng rng = gbd::make_rng(certify_cfg.seed);
      std::ostringstream csv;
      csv << "index,label,predicted,d_l,p_lower,s,z,certified_radius,certified_trigger_size\n";
      for (std::size_t i = 0; i < data.size(); ++i) {
        const gbd::Certificate cert = gbd::certify(base, data.items[i].graph, certify_cfg, rng);
        csv << i << ',' << data.items[i].label << ',' << cert.predicted_label << ',' << cert.d_l << ','
            << std::fixed << std::setprecision(6) << cert.p_lower << ',' << cert.s << ',' << cert.z << ','
            << (cert.certified_radius ? std::to_string(*cert.certified_radius) : "abstain") << ','
            << (cert.certified_trigger_size ? std::to_string(*cert.certified_trigger_size) : "abstain") << '\n';
      }
      if (certify_out.empty()) {
        std::cout << csv.str();
      } else {
        write_file(certify_out, csv.str());
      }
    } else if (*detect_cmd) {
      gbd::LabeledDataset data = gbd::read_dataset(std::filesystem::path(detect_input));
      for (std::size_t i = 0; i < data.size(); ++i) {
        auto& g = data.items[i].graph;
        if (g.node_count() < detect_size) {
          std::cout << i << ": skipped (fewer than " << detect_size << " nodes)\n";
          continue;
        }
        const auto nodes = gbd::detect_dense_subgraph(g, detect_size);
        std::cout << i << ":";
        for (int v : nodes) std::cout << ' ' << v;
        std::cout << '\n';
        g = gbd::remove_edges_within(g, nodes);
      }
      if (!detect_strip_out.empty()) gbd::write_dataset(std::filesystem::path(detect_strip_out), data);
    } else if (*run_cmd) {
      const gbd::ExperimentConfig cfg = run_flags.resolve(run_seed);
      emit_results(cfg, {gbd::run_experiment(cfg)});
    } else if (*sweep_cmd) {
      const gbd::ExperimentConfig cfg = sweep_flags.resolve(sweep_seed);
      const auto values = parse_values(sweep_values);
      gbd::with_parameter(cfg, sweep_param, values.front());
      emit_results(cfg, gbd::run_sweep(cfg, sweep_param, values));
    }
  } catch (const gbd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const gbd::InvalidParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
