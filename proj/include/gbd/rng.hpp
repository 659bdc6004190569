#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gbd {

/// The single random engine used throughout. Distributions below are
/// implemented by hand so that streams are identical across standard
/// libraries.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of a named pipeline stage: splitmix64(master ^ fnv1a64(name)).
std::uint64_t stage_seed(std::uint64_t master_seed, std::string_view stage_name);

/// Seed of the index-th independent substream of `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Uniform integer in [0, n). n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

bool bernoulli(Rng& rng, double p);

/// Poisson variate (Knuth's multiplication method; mean should stay below ~700).
int poisson(Rng& rng, double mean);

/// k distinct values from [0, n) in random order (partial Fisher-Yates).
std::vector<int> sample_without_replacement(int n, int k, Rng& rng);

template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace gbd
