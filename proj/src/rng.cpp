#include "gbd/rng.hpp"

#include <cmath>
#include <numeric>

namespace gbd {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stage_seed(std::uint64_t master_seed, std::string_view stage_name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stage_name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(master_seed ^ h);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) + index);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

int poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  int k = 0;
  double product = uniform01(rng);
  while (product > limit) {
    ++k;
    product *= uniform01(rng);
  }
  return k;
}

std::vector<int> sample_without_replacement(int n, int k, Rng& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    auto j = static_cast<std::size_t>(i) + uniform_index(rng, static_cast<std::uint64_t>(n - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

}  // namespace gbd
