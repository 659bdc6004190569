#include "gbd/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gbd/errors.hpp"

namespace gbd {

namespace {

constexpr double kMaxEnumeration = 1e6;
constexpr double kBisectionTolerance = 1e-12;
// Strict inequality margin in log space; a tie never certifies.
constexpr double kRadiusMargin = 1e-11;

void count_vote(std::vector<int>& counts, int label) {
  if (label < 0) throw InvalidParameterError("base classifier returned a negative label");
  if (static_cast<std::size_t>(label) >= counts.size()) counts.resize(static_cast<std::size_t>(label) + 1, 0);
  ++counts[static_cast<std::size_t>(label)];
}

Graph keep_entries(const Graph& g, const std::vector<bool>& kept) {
  std::vector<Edge> edges;
  const int n = g.node_count();
  for (const Edge& e : g.edges()) {
    if (kept[pair_index(e.u, e.v, n)]) edges.push_back(e);
  }
  return Graph(n, std::move(edges), g.feature_mode());
}

}  // namespace

void validate(const SmoothingConfig& cfg) {
  if (cfg.d < 1) throw InvalidParameterError("d must be at least 1");
  if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) throw InvalidParameterError("beta must lie in (0, 1]");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw InvalidParameterError("alpha must lie in (0, 1)");
}

std::size_t kept_entry_count(std::size_t s, double beta) {
  if (s == 0) return 0;
  const auto z = static_cast<std::size_t>(std::ceil(beta * static_cast<double>(s) - 1e-9));
  return std::clamp<std::size_t>(z, 1, s);
}

std::vector<std::size_t> sample_kept_entries(std::size_t s, std::size_t z, Rng& rng) {
  if (z > s) throw InvalidParameterError("cannot keep " + std::to_string(z) + " of " + std::to_string(s) + " entries");
  std::vector<std::size_t> pool(s);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < z; ++i) std::swap(pool[i], pool[i + uniform_index(rng, s - i)]);
  pool.resize(z);
  std::sort(pool.begin(), pool.end());
  return pool;
}

Graph subsample_graph(const Graph& g, std::size_t z, Rng& rng) {
  const std::size_t s = pair_count(g.node_count());
  if (z > s || (z == 0 && s > 0)) {
    throw InvalidParameterError("kept entry count " + std::to_string(z) + " outside [1, " + std::to_string(s) + "]");
  }
  if (s == 0) return g;
  std::vector<bool> kept(s, false);
  for (std::size_t idx : sample_kept_entries(s, z, rng)) kept[idx] = true;
  return keep_entries(g, kept);
}

Vote smoothed_predict(const BaseClassifier& base, const Graph& g, const SmoothingConfig& cfg, Rng& rng) {
  validate(cfg);
  const std::size_t z = kept_entry_count(pair_count(g.node_count()), cfg.beta);
  const std::uint64_t stream = rng();
  Vote vote;
  for (int i = 0; i < cfg.d; ++i) {
    Rng sub = make_rng(substream_seed(stream, static_cast<std::uint64_t>(i)));
    count_vote(vote.counts, base(subsample_graph(g, z, sub)));
  }
  vote.label = static_cast<int>(std::max_element(vote.counts.begin(), vote.counts.end()) - vote.counts.begin());
  vote.count = vote.counts[static_cast<std::size_t>(vote.label)];
  return vote;
}

double log_binomial(double n, double k) {
  if (k < 0.0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  // Modified Lentz evaluation of the continued fraction.
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double f = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double numerator = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + numerator * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + numerator / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    f *= d * c;

    numerator = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + numerator * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + numerator / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_front) * f / a;
}

double clopper_pearson_lower(int d_l, int d, double alpha) {
  if (d < 1 || d_l < 0 || d_l > d) throw InvalidParameterError("need 0 <= d_l <= d and d >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameterError("alpha must lie in (0, 1)");
  if (d_l == 0) return 0.0;
  if (d_l == d) return std::pow(alpha, 1.0 / d);
  const double a = d_l;
  const double b = d - d_l + 1;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > kBisectionTolerance) {
    const double mid = 0.5 * (lo + hi);
    (regularized_incomplete_beta(a, b, mid) < alpha ? lo : hi) = mid;
  }
  return lo;
}

std::optional<std::int64_t> certified_radius(std::size_t s, std::size_t z, double p_lower) {
  if (z < 1 || z > s) throw InvalidParameterError("certified_radius needs 1 <= z <= s");
  if (!(p_lower > 0.5)) return std::nullopt;
  const double threshold = std::log(1.5 - p_lower);
  // ln [C(s-R, z) / C(s, z)] = sum_{i<R} ln(1 - z / (s - i)), accumulated
  // one term per step.
  double log_ratio = 0.0;
  std::int64_t radius = 0;
  for (std::size_t r = 0; r + z < s; ++r) {
    const double next = log_ratio + std::log1p(-static_cast<double>(z) / static_cast<double>(s - r));
    if (!(next > threshold + kRadiusMargin)) break;
    log_ratio = next;
    ++radius;
  }
  return radius;
}

std::optional<int> certified_trigger_size(int n, std::size_t z, double p_lower) {
  if (n < 2) throw InvalidParameterError("certified_trigger_size needs at least 2 nodes");
  const auto radius = certified_radius(pair_count(n), z, p_lower);
  if (!radius) return std::nullopt;
  int t = 1;
  while (static_cast<std::int64_t>(t + 1) * t / 2 <= *radius) ++t;
  return t;
}

Certificate certify(const BaseClassifier& base, const Graph& g, const SmoothingConfig& cfg, Rng& rng) {
  const Vote vote = smoothed_predict(base, g, cfg, rng);
  Certificate cert;
  cert.predicted_label = vote.label;
  cert.d_l = vote.count;
  cert.p_lower = clopper_pearson_lower(vote.count, cfg.d, cfg.alpha);
  cert.s = pair_count(g.node_count());
  cert.z = kept_entry_count(cert.s, cfg.beta);
  if (cert.s > 0) {
    cert.certified_radius = certified_radius(cert.s, cert.z, cert.p_lower);
    cert.certified_trigger_size = certified_trigger_size(g.node_count(), cert.z, cert.p_lower);
  }
  return cert;
}

std::vector<double> exact_smoothed_distribution(const BaseClassifier& base, const Graph& g, std::size_t z,
                                                int num_classes) {
  const std::size_t s = pair_count(g.node_count());
  if (z < 1 || z > s) throw InvalidParameterError("exact distribution needs 1 <= z <= s");
  if (log_binomial(static_cast<double>(s), static_cast<double>(z)) > std::log(kMaxEnumeration) + 1e-9) {
    throw CapacityError("C(" + std::to_string(s) + ", " + std::to_string(z) + ") exceeds the enumeration limit");
  }

  std::vector<int> counts(static_cast<std::size_t>(std::max(num_classes, 1)), 0);
  std::vector<std::size_t> subset(z);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  std::vector<bool> kept(s, false);
  std::size_t total = 0;
  while (true) {
    std::fill(kept.begin(), kept.end(), false);
    for (std::size_t idx : subset) kept[idx] = true;
    count_vote(counts, base(keep_entries(g, kept)));
    ++total;

    std::size_t i = z;
    while (i > 0 && subset[i - 1] == s - z + (i - 1)) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < z; ++j) subset[j] = subset[j - 1] + 1;
  }
  std::vector<double> p(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) p[j] = static_cast<double>(counts[j]) / static_cast<double>(total);
  return p;
}

}  // namespace gbd
