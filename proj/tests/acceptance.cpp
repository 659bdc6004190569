// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.
//
// usage: acceptance <path-to-gbd-cli> <scratch-dir>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bigint_oracles.hpp"
#include "gbd/errors.hpp"
#include "gbd/gin.hpp"
#include "gbd/harness.hpp"
#include "gbd/smoothing.hpp"
#include "gbd/trigger.hpp"
#include "tiny_oracles.hpp"

using namespace gbd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << x;
  return out.str();
}

Graph random_graph(int n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (bernoulli(rng, p)) edges.push_back({i, j});
  return Graph(n, edges);
}

// 1 -------------------------------------------------------------------------
Outcome certificate_soundness() {
  const auto start = Clock::now();
  long long checks = 0;
  long long violations = 0;
  long long certified = 0;
  for (int index = 0; index < 20; ++index) {
    const auto classifier = oracle::random_classifier(index, 2024);
    for (int n = 2; n <= 5; ++n) {
      const int s = static_cast<int>(pair_count(n));
      for (int z = 1; z <= 3 && z <= s; ++z) {
        const auto table = oracle::smoothed_table(classifier, n, z);
        const std::uint32_t size = 1u << s;
        for (std::uint32_t x = 0; x < size; ++x) {
          const auto r = certified_radius(static_cast<std::size_t>(s), static_cast<std::size_t>(z), table.p(x));
          if (!r) continue;
          ++certified;
          for (std::uint32_t delta = 0; delta < size; ++delta) {
            if (std::popcount(delta) > *r) continue;
            ++checks;
            violations += table.label[x ^ delta] != table.label[x];
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {violations == 0 && elapsed < 300.0,
          std::to_string(violations) + " violations, " + std::to_string(certified) + " certified inputs, " +
              std::to_string(checks) + " perturbations checked, " + fmt(elapsed, 1) + " s"};
}

// 2 -------------------------------------------------------------------------
Outcome radius_spot_values() {
  struct Spot {
    std::int64_t s, z;
    oracle::cpp_rational p;
    double p_double;
    std::optional<std::int64_t> expected;
  };
  const std::vector<Spot> spots{{10, 3, 1, 1.0, 1},
                                {10, 1, 1, 1.0, 4},
                                {10, 1, oracle::cpp_rational(3, 5), 0.6, 0},
                                {10, 1, oracle::cpp_rational(1, 2), 0.5, std::nullopt},
                                {10, 3, oracle::cpp_rational(1, 2), 0.5, std::nullopt}};
  bool ok = true;
  std::ostringstream detail;
  for (const Spot& spot : spots) {
    const auto exact = oracle::radius(spot.s, spot.z, spot.p);
    const auto got = certified_radius(static_cast<std::size_t>(spot.s), static_cast<std::size_t>(spot.z), spot.p_double);
    ok = ok && exact == spot.expected && got == spot.expected;
    detail << "(s=" << spot.s << ",z=" << spot.z << ",p=" << spot.p_double << ")->"
           << (got ? std::to_string(*got) : std::string("abstain")) << " ";
  }
  // Wider grid against the exact rational evaluation.
  int grid = 0;
  int mismatches = 0;
  for (std::int64_t s = 1; s <= 60; ++s) {
    for (std::int64_t z = 1; z <= s; ++z) {
      for (int k = 501; k <= 1000; k += 19) {
        const auto exact = oracle::radius(s, z, oracle::cpp_rational(k, 1000));
        const auto got = certified_radius(static_cast<std::size_t>(s), static_cast<std::size_t>(z), k / 1000.0);
        ++grid;
        mismatches += exact != got;
      }
    }
  }
  ok = ok && mismatches == 0;
  detail << "| grid s<=60: " << mismatches << "/" << grid << " mismatches";
  return {ok, detail.str()};
}

// 3 -------------------------------------------------------------------------
Outcome clopper_pearson_grid() {
  const double alpha = 0.001;
  double worst = 0.0;
  int cells = 0;
  for (int d : {10, 100}) {
    for (int dl = 1; dl <= d; ++dl) {
      const double p = clopper_pearson_lower(dl, d, alpha);
      const double tail = static_cast<double>(oracle::binomial_tail(d, dl, p));
      worst = std::max(worst, std::abs(tail - alpha));
      ++cells;
    }
  }
  const double closed = clopper_pearson_lower(100, 100, alpha);
  const bool ok = worst < 1e-6 && std::abs(closed - 0.933254) <= 1e-5;
  return {ok, std::to_string(cells) + " cells, max |tail - alpha| = " + std::to_string(worst) +
                  ", d_l=d=100 -> " + fmt(closed, 6)};
}

// 4 -------------------------------------------------------------------------
Outcome trigger_formulas() {
  bool ok = sw_k(6, 0.8) == 4 && pa_k(10, 0.4) == 3;
  bool pa_error = false;
  try {
    pa_k(4, 0.9);
  } catch (const DensityTooLargeError&) {
    pa_error = true;
  }
  ok = ok && pa_error;

  std::ostringstream detail;
  detail << "sw_k(6,0.8)=" << sw_k(6, 0.8) << " pa_k(10,0.4)=" << pa_k(10, 0.4)
         << " pa_k(4,0.9)=" << (pa_error ? "error" : "no error") << " | ER density:";
  Rng rng = make_rng(stage_seed(4, "er"));
  for (auto [t, rho] : std::vector<std::pair<int, double>>{{5, 0.2}, {10, 0.5}, {10, 0.8}}) {
    TriggerSpec spec;
    spec.size = t;
    spec.density = rho;
    double total = 0.0;
    for (int i = 0; i < 1000; ++i) total += synth_er(spec, rng).realized_density;
    const double mean = total / 1000.0;
    ok = ok && std::abs(mean - rho) <= 0.05;
    detail << " (" << t << "," << rho << ")=" << fmt(mean, 3);
  }
  int pa_cases = 0;
  int pa_bad = 0;
  Rng pa_rng = make_rng(stage_seed(4, "pa"));
  for (int t = 2; t <= 40; ++t) {
    for (int step = 1; step <= 20; ++step) {
      TriggerSpec spec;
      spec.size = t;
      spec.density = step / 20.0;
      spec.method = SynthesisMethod::kPreferentialAttachment;
      int k = 0;
      try {
        k = pa_k(t, spec.density);
      } catch (const DensityTooLargeError&) {
        continue;
      }
      for (int rep = 0; rep < 5; ++rep) {
        ++pa_cases;
        pa_bad += synth_pa(spec, pa_rng).graph.edge_count() != static_cast<std::size_t>(k * (t - k));
      }
    }
  }
  ok = ok && pa_bad == 0;
  detail << " | PA k(t-k): " << pa_bad << "/" << pa_cases << " mismatches";
  return {ok, detail.str()};
}

// 5 -------------------------------------------------------------------------
// Cross-entropy straight from forward(); matches loss() unless the 1e-12
// clamp binds, where loss() is flat but training still needs the signal.
double cross_entropy(const GinModel& model, const std::vector<LabeledGraph>& batch) {
  double total = 0.0;
  for (const auto& item : batch) total -= std::log(forward(model, item.graph)(item.label));
  return total / static_cast<double>(batch.size());
}

Outcome gradient_check() {
  Rng rng = make_rng(stage_seed(5, "graphs"));
  double worst = 0.0;
  std::size_t parameters = 0;
  for (int g = 0; g < 10; ++g) {
    GinConfig cfg;
    cfg.seed = stage_seed(5, "model") + static_cast<std::uint64_t>(g);
    GinModel model = init_model(cfg);
    const int n = 4 + static_cast<int>(uniform_index(rng, 9));
    const int label = static_cast<int>(uniform_index(rng, 2));
    const std::vector<LabeledGraph> batch{{random_graph(n, 0.2 + 0.5 * uniform01(rng), rng), label, label, {}, false}};
    const GinParameters analytic = gradient(model, batch);
    auto blocks = parameter_blocks(model.params);
    const auto grads = parameter_blocks(analytic);
    const double h = 1e-5;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (Eigen::Index k = 0; k < blocks[b]->size(); ++k) {
        double& w = blocks[b]->data()[k];
        const double saved = w;
        w = saved + h;
        const double up = cross_entropy(model, batch);
        w = saved - h;
        const double down = cross_entropy(model, batch);
        w = saved;
        const double numeric = (up - down) / (2 * h);
        const double exact = grads[b]->data()[k];
        // Denominator floor 1e-5: below it the comparison is absolute at 1e-9,
        // about ten times the rounding noise of the central difference.
        const double err = std::abs(numeric - exact) / std::max({std::abs(numeric), std::abs(exact), 1e-5});
        worst = std::max(worst, err);
        ++parameters;
      }
    }
  }
  return {worst < 1e-4, std::to_string(parameters) + " parameter checks over 10 graphs, max relative error " +
                            std::to_string(worst)};
}

// 6, 7, 8 -------------------------------------------------------------------
struct Mean {
  double sum = 0.0;
  int n = 0;
  void add(double x) {
    sum += x;
    ++n;
  }
  double value() const { return n ? sum / n : 0.0; }
};

const std::vector<std::uint64_t> kTrendSeeds{1, 2, 3, 4, 5};

ExperimentConfig trend_base() {
  ExperimentConfig cfg;  // defaults: 300-graph synthetic binary dataset
  cfg.defense_audit = false;
  return cfg;
}

struct TrendRuns {
  std::map<std::string, Mean> asr;
  Mean clean, backdoor, baseline, train_only, test_only, both;
  double seconds = 0.0;
};

TrendRuns run_trends() {
  TrendRuns runs;
  const auto start = Clock::now();
  const std::vector<std::pair<std::string, double>> settings{
      {"default", 0.0}, {"phi", 0.1}, {"phi", 0.3}, {"rho", 0.2}, {"rho", 0.5}, {"gamma", 0.02}, {"gamma", 0.10}};
  for (const auto& [name, value] : settings) {
    for (std::uint64_t seed : kTrendSeeds) {
      ExperimentConfig cfg = trend_base();
      cfg.seed = seed;
      if (name != "default") cfg = with_parameter(cfg, name, value);
      const ExperimentResult r = run_experiment(cfg);
      const std::string key = name == "default" ? "default" : name + "=" + fmt(value, 2);
      runs.asr[key].add(r.attack_success_rate);
      if (name == "default") {
        runs.clean.add(r.clean_accuracy);
        runs.backdoor.add(r.backdoor_accuracy);
        runs.baseline.add(r.asr.baseline);
        runs.train_only.add(r.asr.train);
        runs.test_only.add(r.asr.test);
        runs.both.add(r.asr.both);
      }
    }
  }
  runs.seconds = seconds_since(start);
  return runs;
}

Outcome attack_trends(const TrendRuns& runs) {
  auto a = [&](const std::string& key) { return runs.asr.at(key).value(); };
  const double def = a("default");
  const double phi1 = a("phi=0.10"), phi3 = a("phi=0.30");
  const double rho2 = a("rho=0.20"), rho5 = a("rho=0.50");
  const double g2 = a("gamma=0.02"), g10 = a("gamma=0.10");
  const bool phi_ok = phi1 <= def && def <= phi3;
  const bool rho_ok = rho2 <= rho5 && rho5 <= def;
  const bool gamma_ok = g2 <= def && def <= g10;
  const bool lift_ok = def >= runs.baseline.value() + 0.25;
  const bool acc_ok = std::abs(runs.backdoor.value() - runs.clean.value()) <= 0.10;
  const bool time_ok = runs.seconds < 600.0;
  std::ostringstream detail;
  detail << "ASR phi 0.1/0.2/0.3 = " << fmt(phi1, 3) << "/" << fmt(def, 3) << "/" << fmt(phi3, 3)
         << "; rho 0.2/0.5/0.8 = " << fmt(rho2, 3) << "/" << fmt(rho5, 3) << "/" << fmt(def, 3)
         << "; gamma 0.02/0.05/0.10 = " << fmt(g2, 3) << "/" << fmt(def, 3) << "/" << fmt(g10, 3)
         << "; baseline " << fmt(runs.baseline.value(), 3) << "; clean/backdoor acc " << fmt(runs.clean.value(), 3)
         << "/" << fmt(runs.backdoor.value(), 3) << "; " << fmt(runs.seconds, 1) << " s";
  return {phi_ok && rho_ok && gamma_ok && lift_ok && acc_ok && time_ok, detail.str()};
}

Outcome asr_ordering(const TrendRuns& runs) {
  const double both = runs.both.value();
  const double train = runs.train_only.value();
  const double test = runs.test_only.value();
  const double base = runs.baseline.value();
  const bool ok = both >= std::max(train, test) && std::max(train, test) >= base;
  return {ok, "Both " + fmt(both, 3) + " >= max(Train " + fmt(train, 3) + ", Test " + fmt(test, 3) +
                  ") >= Baseline " + fmt(base, 3)};
}

Outcome defense_trend() {
  const auto start = Clock::now();
  Mean unsmoothed_asr, smoothed_asr, acc_with, acc_without;
  for (std::uint64_t seed : kTrendSeeds) {
    ExperimentConfig cfg = trend_base();
    cfg.seed = seed;
    cfg.phi = 0.1;
    cfg.smoothing_enabled = true;
    cfg.smoothing_train_with_subsampling = true;
    const ExperimentResult with = run_experiment(cfg);
    unsmoothed_asr.add(with.attack_success_rate);
    smoothed_asr.add(*with.smoothed_attack_success_rate);
    acc_with.add(*with.smoothed_backdoor_accuracy);

    cfg.smoothing_train_with_subsampling = false;
    const ExperimentResult without = run_experiment(cfg);
    acc_without.add(*without.smoothed_backdoor_accuracy);
  }
  const bool asr_ok = smoothed_asr.value() <= unsmoothed_asr.value() - 0.15;
  const bool acc_ok = acc_with.value() >= acc_without.value() + 0.10;
  return {asr_ok && acc_ok, "phi=0.1 ASR unsmoothed " + fmt(unsmoothed_asr.value(), 3) + " vs smoothed " +
                                fmt(smoothed_asr.value(), 3) + "; smoothed backdoor acc with/without subsampled training " +
                                fmt(acc_with.value(), 3) + "/" + fmt(acc_without.value(), 3) + "; " +
                                fmt(seconds_since(start), 1) + " s"};
}

// 9 -------------------------------------------------------------------------
Outcome monte_carlo_consistency() {
  Rng rng = make_rng(stage_seed(9, "instances"));
  int argmax_mismatch = 0;
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const int n = 3 + static_cast<int>(uniform_index(rng, 4));  // 3..6 nodes
    const std::size_t s = pair_count(n);
    const std::size_t z = 1 + uniform_index(rng, 3);
    const auto classifier = oracle::random_classifier(instance, 909);
    const Graph g = random_graph(n, uniform01(rng), rng);
    const std::vector<double> exact = exact_smoothed_distribution(classifier, g, z, classifier.num_classes);
    int exact_label = 0;
    for (int j = 1; j < classifier.num_classes; ++j)
      if (exact[static_cast<std::size_t>(j)] > exact[static_cast<std::size_t>(exact_label)]) exact_label = j;

    SmoothingConfig cfg;
    cfg.d = 10000;
    cfg.beta = static_cast<double>(z) / static_cast<double>(s);
    cfg.seed = substream_seed(stage_seed(9, "sampler"), static_cast<std::uint64_t>(instance));
    Rng sampler = make_rng(cfg.seed);
    const Vote vote = smoothed_predict(classifier, g, cfg, sampler);
    argmax_mismatch += vote.label != exact_label;
    worst = std::max(worst, std::abs(vote.counts[static_cast<std::size_t>(exact_label)] / 10000.0 -
                                     exact[static_cast<std::size_t>(exact_label)]));
  }
  return {argmax_mismatch == 0 && worst <= 0.03,
          std::to_string(argmax_mismatch) + "/50 argmax mismatches, max |p_hat - p| = " + fmt(worst, 4)};
}

// 10 ------------------------------------------------------------------------
std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Outcome cli_determinism(const std::string& cli, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto config = dir / "determinism.json";
  {
    std::ofstream out(config);
    out << R"({"synthetic": {"num_graphs": 80, "mean_nodes": [20, 20], "densities": [0.05, 0.3]},)"
        << R"( "gin": {"max_epochs": 10}, "smoothing": {"enabled": true, "d": 20}, "defense_audit": true})";
  }
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    const auto csv = dir / ("determinism_" + std::to_string(i) + ".csv");
    std::filesystem::remove(csv);
    const std::string command =
        "\"" + cli + "\" run --seed 7 --config \"" + config.string() + "\" --out \"" + csv.string() + "\"";
    codes[i] = std::system(command.c_str());
  }
  const std::string a = slurp(dir / "determinism_0.csv");
  const std::string b = slurp(dir / "determinism_1.csv");
  const bool ok = codes[0] == 0 && codes[1] == 0 && !a.empty() && a == b;
  return {ok, "exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) + ", " +
                  std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <gbd-cli> <scratch-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::filesystem::path scratch = argv[2];

  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  criterion " << id << " " << name << ": " << outcome.detail
              << std::endl;
  };

  report(1, "certificate soundness", certificate_soundness);
  report(2, "certified radius spot values", radius_spot_values);
  report(3, "Clopper-Pearson bound", clopper_pearson_grid);
  report(4, "trigger formulas", trigger_formulas);
  report(5, "gradient correctness", gradient_check);

  std::optional<TrendRuns> trends;
  std::string trend_error;
  try {
    trends = run_trends();
  } catch (const std::exception& e) {
    trend_error = e.what();
  }
  report(6, "attack trends", [&] { return trends ? attack_trends(*trends) : Outcome{false, trend_error}; });
  report(7, "ASR variant ordering", [&] { return trends ? asr_ordering(*trends) : Outcome{false, trend_error}; });
  report(8, "defense trend", defense_trend);
  report(9, "Monte Carlo consistency", monte_carlo_consistency);
  report(10, "run determinism", [&] { return cli_determinism(cli, scratch / "acceptance_work"); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
