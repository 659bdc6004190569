#include "gbd/trigger.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <string>

#include "gbd/errors.hpp"

namespace gbd {

namespace {

constexpr int kErMaxAttempts = 1000;
// Absorbs representation error in products such as 5 * 0.8 before ceil().
constexpr double kCeilSlack = 1e-9;

int slack_ceil(double x) { return static_cast<int>(std::ceil(x - kCeilSlack)); }

Trigger make_trigger(Graph graph, const TriggerSpec& spec) {
  const double realized = density(graph);
  return {std::move(graph), spec, realized};
}

void check_method(const TriggerSpec& spec, SynthesisMethod expected) {
  if (spec.method != expected) {
    throw InvalidParameterError("trigger spec method is " + std::string(to_string(spec.method)) +
                                ", expected " + std::string(to_string(expected)));
  }
}

void check_common(const TriggerSpec& spec) {
  if (spec.size < 2) throw InvalidParameterError("trigger size must be at least 2");
  if (!(spec.density > 0.0 && spec.density <= 1.0)) {
    throw InvalidParameterError("trigger density must lie in (0, 1]");
  }
  if (!(spec.sw_rewire_prob >= 0.0 && spec.sw_rewire_prob <= 1.0)) {
    throw InvalidParameterError("rewire probability must lie in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(SynthesisMethod m) {
  switch (m) {
    case SynthesisMethod::kErdosRenyi: return "ER";
    case SynthesisMethod::kSmallWorld: return "SW";
    case SynthesisMethod::kPreferentialAttachment: return "PA";
  }
  return "?";
}

SynthesisMethod parse_synthesis_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "ER") return SynthesisMethod::kErdosRenyi;
  if (upper == "SW") return SynthesisMethod::kSmallWorld;
  if (upper == "PA") return SynthesisMethod::kPreferentialAttachment;
  throw InvalidParameterError("unknown synthesis method '" + std::string(name) + "'");
}

void validate(const TriggerSpec& spec) {
  check_common(spec);
  if (spec.method == SynthesisMethod::kSmallWorld && sw_k(spec.size, spec.density) < 1) {
    throw InvalidParameterError("SW lattice degree k is 0");
  }
  if (spec.method == SynthesisMethod::kPreferentialAttachment) {
    const int k = pa_k(spec.size, spec.density);
    if (k < 1 || spec.size <= k) {
      throw InvalidParameterError("PA needs 1 <= k < t (k = " + std::to_string(k) + ")");
    }
  }
}

int sw_k(int t, double rho) { return slack_ceil(static_cast<double>(t - 1) * rho); }

int pa_k(int t, double rho) {
  const double td = t;
  const double discriminant = td * td - 2.0 * td * (td - 1.0) * rho;
  if (discriminant < 0.0) {
    throw DensityTooLargeError("PA density " + std::to_string(rho) + " too large for t = " + std::to_string(t));
  }
  return slack_ceil((td - std::sqrt(discriminant)) / 2.0);
}

Trigger synth_er(const TriggerSpec& spec, Rng& rng) {
  check_method(spec, SynthesisMethod::kErdosRenyi);
  validate(spec);
  for (int attempt = 0; attempt < kErMaxAttempts; ++attempt) {
    std::vector<Edge> edges;
    for (int i = 0; i < spec.size; ++i) {
      for (int j = i + 1; j < spec.size; ++j) {
        if (bernoulli(rng, spec.density)) edges.push_back({i, j});
      }
    }
    if (!edges.empty()) return make_trigger(Graph(spec.size, std::move(edges)), spec);
  }
  throw SynthesisFailureError("ER produced no edge in " + std::to_string(kErMaxAttempts) + " attempts");
}

Trigger synth_sw(const TriggerSpec& spec, Rng& rng) {
  check_method(spec, SynthesisMethod::kSmallWorld);
  validate(spec);
  const int t = spec.size;
  const int k = sw_k(t, spec.density);

  std::vector<int> offsets;
  for (int d = 1; d <= k / 2; ++d) offsets.push_back(d);
  if (k % 2 == 1) offsets.push_back((k + 1) / 2);

  // Lattice edges in construction order; a set guards against the wrap-around
  // duplicates that appear when k approaches t.
  std::vector<Edge> lattice;
  std::set<Edge> present;
  for (int i = 0; i < t; ++i) {
    for (int d : offsets) {
      int j = (i + d) % t;
      if (j == i) continue;
      Edge e{std::min(i, j), std::max(i, j)};
      if (present.insert(e).second) lattice.push_back({i, j});
    }
  }

  for (const Edge& original : lattice) {
    if (!bernoulli(rng, spec.sw_rewire_prob)) continue;
    const int u = original.u;
    for (int attempt = 0; attempt < t; ++attempt) {
      const int w = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(t)));
      Edge candidate{std::min(u, w), std::max(u, w)};
      if (w == u || present.count(candidate) != 0) continue;
      present.erase(Edge{std::min(u, original.v), std::max(u, original.v)});
      present.insert(candidate);
      break;
    }
  }
  return make_trigger(Graph(t, std::vector<Edge>(present.begin(), present.end())), spec);
}

Trigger synth_pa(const TriggerSpec& spec, Rng& rng) {
  check_method(spec, SynthesisMethod::kPreferentialAttachment);
  validate(spec);
  const int t = spec.size;
  const int k = pa_k(t, spec.density);

  std::vector<int> degree(static_cast<std::size_t>(t), 0);
  std::vector<Edge> edges;
  for (int node = k; node < t; ++node) {
    std::vector<int> candidates(static_cast<std::size_t>(node));
    for (int i = 0; i < node; ++i) candidates[static_cast<std::size_t>(i)] = i;
    std::vector<int> chosen;
    for (int draw = 0; draw < k; ++draw) {
      long total = 0;
      for (int c : candidates) total += degree[static_cast<std::size_t>(c)];
      std::size_t pick = 0;
      if (total == 0) {
        pick = uniform_index(rng, candidates.size());
      } else {
        auto target = static_cast<long>(uniform_index(rng, static_cast<std::uint64_t>(total)));
        while (target >= degree[static_cast<std::size_t>(candidates[pick])]) {
          target -= degree[static_cast<std::size_t>(candidates[pick])];
          ++pick;
        }
      }
      chosen.push_back(candidates[pick]);
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    for (int c : chosen) {
      edges.push_back({c, node});
      ++degree[static_cast<std::size_t>(c)];
      ++degree[static_cast<std::size_t>(node)];
    }
  }
  return make_trigger(Graph(t, std::move(edges)), spec);
}

Trigger synthesize(const TriggerSpec& spec, Rng& rng) {
  switch (spec.method) {
    case SynthesisMethod::kErdosRenyi: return synth_er(spec, rng);
    case SynthesisMethod::kSmallWorld: return synth_sw(spec, rng);
    case SynthesisMethod::kPreferentialAttachment: return synth_pa(spec, rng);
  }
  throw InvalidParameterError("unknown synthesis method");
}

Trigger synthesize(const TriggerSpec& spec) {
  Rng rng = make_rng(spec.seed);
  return synthesize(spec, rng);
}

}  // namespace gbd
