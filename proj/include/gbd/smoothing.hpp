#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gbd/graph.hpp"
#include "gbd/rng.hpp"

namespace gbd {

struct SmoothingConfig {
  int d = 100;
  double beta = 0.10;
  double alpha = 0.001;
  std::uint64_t seed = 0;
};

void validate(const SmoothingConfig& cfg);

/// Any function from a graph to a label.
using BaseClassifier = std::function<int(const Graph&)>;

/// z = ceil(beta * s) clamped to [1, s]; 0 when s = 0.
std::size_t kept_entry_count(std::size_t s, double beta);

/// A uniformly random z-subset of [0, s), ascending.
std::vector<std::size_t> sample_kept_entries(std::size_t s, std::size_t z, Rng& rng);

/// Keeps z uniformly chosen structure-vector entries and zeroes the rest;
/// features are recomputed. Requires 1 <= z <= s (z = 0 is allowed only when
/// s = 0, i.e. for graphs with fewer than two nodes).
Graph subsample_graph(const Graph& g, std::size_t z, Rng& rng);

struct Vote {
  int label = 0;
  int count = 0;
  /// counts[j] = votes for label j.
  std::vector<int> counts;
};

/// Majority vote of the base classifier over cfg.d subsampled graphs with
/// z = kept_entry_count(s, cfg.beta). Ties go to the lowest label. The i-th
/// subsample uses substream i of a base seed drawn once from `rng`.
Vote smoothed_predict(const BaseClassifier& base, const Graph& g, const SmoothingConfig& cfg, Rng& rng);

/// ln C(n, k) via lgamma; -inf when k > n.
double log_binomial(double n, double k);

/// I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// alpha-quantile of Beta(d_l, d - d_l + 1), i.e. the one-sided
/// Clopper-Pearson lower bound. 0 when d_l = 0; alpha^(1/d) when d_l = d;
/// bisection on the incomplete beta otherwise.
double clopper_pearson_lower(int d_l, int d, double alpha);

/// Largest R >= 0 with C(s-R, z) > (1.5 - p_lower) C(s, z); nullopt (abstain)
/// when p_lower <= 0.5.
std::optional<std::int64_t> certified_radius(std::size_t s, std::size_t z, double p_lower);

/// Largest T with T(T-1)/2 <= certified_radius(n(n-1)/2, z, p_lower).
std::optional<int> certified_trigger_size(int n, std::size_t z, double p_lower);

struct Certificate {
  int predicted_label = 0;
  int d_l = 0;
  double p_lower = 0.0;
  std::optional<std::int64_t> certified_radius;
  std::optional<int> certified_trigger_size;
  std::size_t s = 0;
  std::size_t z = 0;

  bool abstained() const { return !certified_radius.has_value(); }
};

/// smoothed_predict followed by the Clopper-Pearson bound and both radii.
Certificate certify(const BaseClassifier& base, const Graph& g, const SmoothingConfig& cfg, Rng& rng);

/// Exact label distribution of the base classifier over all C(s, z) kept
/// subsets. Throws CapacityError when C(s, z) > 1e6.
std::vector<double> exact_smoothed_distribution(const BaseClassifier& base, const Graph& g, std::size_t z,
                                                int num_classes);

}  // namespace gbd
