#include <doctest.h>

#include <cmath>
#include <queue>

#include "gbd/errors.hpp"
#include "gbd/trigger.hpp"

using namespace gbd;

namespace {

TriggerSpec spec_of(int t, double rho, SynthesisMethod m, double rewire = 0.8, std::uint64_t seed = 0) {
  TriggerSpec spec;
  spec.size = t;
  spec.density = rho;
  spec.method = m;
  spec.sw_rewire_prob = rewire;
  spec.seed = seed;
  return spec;
}

bool connected(const Graph& g) {
  std::vector<bool> seen(static_cast<std::size_t>(g.node_count()), false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : g.neighbors(v)) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == g.node_count();
}

}  // namespace

TEST_CASE("lattice and attachment parameters") {
  CHECK(sw_k(6, 0.8) == 4);
  CHECK(sw_k(10, 0.4) == 4);
  CHECK(sw_k(2, 1.0) == 1);
  CHECK(pa_k(10, 0.4) == 3);
  CHECK(pa_k(5, 0.4) == 1);
  CHECK_THROWS_AS(pa_k(4, 0.9), DensityTooLargeError);
  CHECK_THROWS_AS(pa_k(3, 1.0), DensityTooLargeError);

  // Independent evaluation of the closed forms.
  for (int t = 2; t <= 30; ++t) {
    for (int step = 1; step <= 20; ++step) {
      const double rho = step / 20.0;
      CHECK(sw_k(t, rho) == static_cast<int>(std::ceil((t - 1) * rho - 1e-9)));
      const double disc = double(t) * t - 2.0 * t * (t - 1) * rho;
      if (disc < 0) {
        CHECK_THROWS(pa_k(t, rho));
      } else {
        const int k = pa_k(t, rho);
        CHECK(k == static_cast<int>(std::ceil((t - std::sqrt(disc)) / 2 - 1e-9)));
        CHECK(k >= 1);
        CHECK(k < t);
      }
    }
  }
}

TEST_CASE("parse and print method names") {
  CHECK(parse_synthesis_method("er") == SynthesisMethod::kErdosRenyi);
  CHECK(parse_synthesis_method("SW") == SynthesisMethod::kSmallWorld);
  CHECK(parse_synthesis_method("Pa") == SynthesisMethod::kPreferentialAttachment);
  CHECK(to_string(SynthesisMethod::kPreferentialAttachment) == "PA");
  CHECK_THROWS_AS(parse_synthesis_method("xx"), InvalidParameterError);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(validate(spec_of(1, 0.5, SynthesisMethod::kErdosRenyi)), InvalidParameterError);
  CHECK_THROWS_AS(validate(spec_of(5, 0.0, SynthesisMethod::kErdosRenyi)), InvalidParameterError);
  CHECK_THROWS_AS(validate(spec_of(5, 1.2, SynthesisMethod::kErdosRenyi)), InvalidParameterError);
  CHECK_THROWS_AS(validate(spec_of(5, 0.5, SynthesisMethod::kSmallWorld, 1.5)), InvalidParameterError);
  CHECK_THROWS_AS(synthesize(spec_of(4, 0.9, SynthesisMethod::kPreferentialAttachment)), DensityTooLargeError);
  CHECK_NOTHROW(validate(spec_of(5, 0.5, SynthesisMethod::kSmallWorld, 0.0)));
}

TEST_CASE("Erdos-Renyi triggers") {
  const Trigger one = synthesize(spec_of(2, 1.0, SynthesisMethod::kErdosRenyi, 0.8, 1));
  CHECK(one.graph.node_count() == 2);
  CHECK(one.graph.edge_count() == 1);
  CHECK(one.realized_density == doctest::Approx(1.0));

  const Trigger full = synthesize(spec_of(7, 1.0, SynthesisMethod::kErdosRenyi, 0.8, 2));
  CHECK(full.graph.edge_count() == 21);

  // Mean edge count for t=5, rho=0.5 (conditioned on at least one edge).
  Rng rng = make_rng(5);
  double total = 0;
  const int samples = 4000;
  for (int i = 0; i < samples; ++i) total += static_cast<double>(synth_er(spec_of(5, 0.5, SynthesisMethod::kErdosRenyi), rng).graph.edge_count());
  const double p_empty = std::pow(0.5, 10);
  CHECK(total / samples == doctest::Approx(5.0 / (1 - p_empty)).epsilon(0.03));
}

TEST_CASE("small-world triggers") {
  // No rewiring: the ring lattice itself.
  const Trigger lattice = synthesize(spec_of(6, 0.8, SynthesisMethod::kSmallWorld, 0.0, 4));
  CHECK(lattice.graph.edge_count() == 12);
  for (int v = 0; v < 6; ++v) CHECK(lattice.graph.degree(v) == 4);
  CHECK(lattice.realized_density == doctest::Approx(0.8));

  const Trigger cycle = synthesize(spec_of(4, 0.6, SynthesisMethod::kSmallWorld, 0.0, 4));
  CHECK(sw_k(4, 0.6) == 2);
  CHECK(cycle.graph.edge_count() == 4);
  for (int v = 0; v < 4; ++v) CHECK(cycle.graph.degree(v) == 2);
  CHECK(cycle.graph.has_edge(0, 1));
  CHECK(cycle.graph.has_edge(0, 3));
  CHECK_FALSE(cycle.graph.has_edge(0, 2));

  // Odd k: floor(k/2) neighbours per side plus the clockwise one at ceil(k/2).
  for (int t = 4; t <= 12; ++t) {
    for (int k = 1; k < t; k += 2) {
      const double rho = static_cast<double>(k) / (t - 1);
      REQUIRE(sw_k(t, rho) == k);
      std::vector<Edge> expected;
      for (int i = 0; i < t; ++i) {
        for (int off = 1; off <= k / 2; ++off) expected.push_back({i, (i + off) % t});
        expected.push_back({i, (i + (k + 1) / 2) % t});
      }
      const Trigger odd = synthesize(spec_of(t, rho, SynthesisMethod::kSmallWorld, 0.0, 4));
      CHECK(odd.graph == Graph(t, expected));
    }
  }

  // Rewiring with even k keeps the edge count at t*k/2.
  Rng rng = make_rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Trigger rewired = synth_sw(spec_of(10, 4.0 / 9.0, SynthesisMethod::kSmallWorld, 0.8), rng);
    CHECK(rewired.graph.node_count() == 10);
    CHECK(rewired.graph.edge_count() == 20);
  }
}

TEST_CASE("preferential-attachment triggers") {
  const Trigger tree = synthesize(spec_of(3, 0.4, SynthesisMethod::kPreferentialAttachment, 0.8, 6));
  CHECK(tree.graph.edge_count() == 2);
  CHECK(connected(tree.graph));

  const Trigger ten = synthesize(spec_of(10, 0.4, SynthesisMethod::kPreferentialAttachment, 0.8, 6));
  CHECK(ten.graph.edge_count() == 21);
  CHECK(ten.realized_density == doctest::Approx(21.0 / 45.0));

  Rng rng = make_rng(9);
  for (int t = 2; t <= 20; ++t) {
    for (int step = 1; step <= 10; ++step) {
      const double rho = step / 10.0;
      int k = 0;
      try {
        k = pa_k(t, rho);
      } catch (const DensityTooLargeError&) {
        continue;
      }
      const Trigger trig = synth_pa(spec_of(t, rho, SynthesisMethod::kPreferentialAttachment), rng);
      CHECK(trig.graph.edge_count() == static_cast<std::size_t>(k * (t - k)));
      CHECK(connected(trig.graph));
    }
  }
}

TEST_CASE("triggers are deterministic and non-empty") {
  for (auto method : {SynthesisMethod::kErdosRenyi, SynthesisMethod::kSmallWorld,
                      SynthesisMethod::kPreferentialAttachment}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const TriggerSpec spec = spec_of(9, 0.3, method, 0.8, seed);
      const Trigger a = synthesize(spec);
      const Trigger b = synthesize(spec);
      CHECK(a.graph == b.graph);
      CHECK(a.graph.node_count() == 9);
      CHECK(a.graph.edge_count() >= 1);
      CHECK(a.realized_density == doctest::Approx(density(a.graph)));
    }
  }
  // Different seeds should not all collapse onto one graph.
  CHECK_FALSE(synthesize(spec_of(12, 0.5, SynthesisMethod::kErdosRenyi, 0.8, 1)).graph ==
              synthesize(spec_of(12, 0.5, SynthesisMethod::kErdosRenyi, 0.8, 2)).graph);
}
