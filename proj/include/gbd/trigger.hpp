#pragma once

#include <cstdint>
#include <string_view>

#include "gbd/graph.hpp"
#include "gbd/rng.hpp"

namespace gbd {

enum class SynthesisMethod { kErdosRenyi, kSmallWorld, kPreferentialAttachment };

std::string_view to_string(SynthesisMethod m);
/// Accepts "ER", "SW", "PA" (case-insensitive). Throws InvalidParameterError.
SynthesisMethod parse_synthesis_method(std::string_view name);

struct TriggerSpec {
  int size = 2;
  double density = 0.8;
  SynthesisMethod method = SynthesisMethod::kErdosRenyi;
  double sw_rewire_prob = 0.8;
  std::uint64_t seed = 0;
};

struct Trigger {
  Graph graph;
  TriggerSpec spec;
  double realized_density = 0.0;
};

/// Checks t >= 2, 0 < rho <= 1, rewire probability in [0, 1], and the
/// method-specific constraints on k.
void validate(const TriggerSpec& spec);

/// Nearest-neighbour count of the SW ring lattice: ceil((t-1) rho).
int sw_k(int t, double rho);

/// Per-node attachment count for PA: ceil((t - sqrt(t^2 - 2t(t-1)rho)) / 2).
/// Throws DensityTooLargeError when the discriminant is negative.
int pa_k(int t, double rho);

/// Independent edges with probability rho, resampled (up to 1000 times)
/// until at least one edge exists.
Trigger synth_er(const TriggerSpec& spec, Rng& rng);

/// Ring lattice with sw_k neighbours, every edge rewired with probability
/// sw_rewire_prob. For odd k the extra neighbour sits at offset ceil(k/2)
/// on the clockwise side.
Trigger synth_sw(const TriggerSpec& spec, Rng& rng);

/// Start from pa_k isolated nodes; each new node attaches to pa_k distinct
/// existing nodes sampled proportionally to degree (uniformly while the
/// remaining candidates all have degree 0).
Trigger synth_pa(const TriggerSpec& spec, Rng& rng);

/// Dispatches on spec.method.
Trigger synthesize(const TriggerSpec& spec, Rng& rng);

/// Uses a stream seeded from spec.seed.
Trigger synthesize(const TriggerSpec& spec);

}  // namespace gbd
