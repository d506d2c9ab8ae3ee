// Copyright 2026 The ccsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <memory>
#include <random>

#include "ccsim/annealer.hpp"
#include "ccsim/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ccsim;

namespace {

Graph PathGraph(std::uint32_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, {}});
  return Graph(std::vector<NodeAttr>(n), e);
}

AnnealParams FastParams(std::uint64_t steps = 20000) {
  AnnealParams p;
  p.schedule = Schedule::Geometric(steps, 1.0, 1e-5);
  p.restarts = 3;
  p.trace_stride = 100;
  return p;
}

}  // namespace

TEST_CASE("geometric schedule") {
  const Schedule s = Schedule::Geometric(100000, 1.0, 1e-5);
  s.Check();
  double prev = s.TemperatureAt(0);
  CHECK(prev == 1.0);
  for (std::uint64_t step = 0; step < 100000; step += 50) {
    const double t = s.TemperatureAt(step);
    CHECK(t <= prev);
    prev = t;
  }
  CHECK(s.TemperatureAt(60000) == 1e-5);
  CHECK(s.TemperatureAt(59000) > 1e-5);
  CHECK(s.TemperatureAt(99999) == 1e-5);

  const Schedule zero = Schedule::Geometric(10000, 1.0, 0.0);
  zero.Check();
  CHECK(zero.TemperatureAt(9999) == 0.0);
  CHECK(zero.TemperatureAt(0) == 1.0);

  Schedule broken = s;
  broken.decay = 0.9999999;
  CHECK_THROWS_AS(broken.Check(), Error);
}

TEST_CASE("metropolis acceptance rule") {
  CHECK(MetropolisAccept(-1.0, 0.5, 0.999));
  CHECK(MetropolisAccept(-1.0, 0.0, 0.999));
  CHECK_FALSE(MetropolisAccept(1.0, 0.0, 0.0));
  CHECK(MetropolisAccept(0.0, 0.0, 0.9999999));
  CHECK(MetropolisAccept(0.0, 1e-9, 0.9999999));
  // Scripted uniforms around exp(-1) = 0.36788.
  CHECK(MetropolisAccept(1.0, 1.0, 0.3678));
  CHECK_FALSE(MetropolisAccept(1.0, 1.0, 0.3679));
  CHECK(MetropolisAccept(2.0, 4.0, 0.6065));
  CHECK_FALSE(MetropolisAccept(2.0, 4.0, 0.6066));
}

TEST_CASE("proposals") {
  const auto g = std::make_shared<const Graph>(BuildLattice(4, 4));
  const RoutingTable routes(g, 1);
  {
    const Configuration one = InitialPlacement(routes, GenerateTasks(*g, 1, 0.25, 1),
                                               PlacementStrategy::kRandom, 2);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) CHECK(ProposeMove(one, routes, rng).task == 0);
  }
  const Configuration c = InitialPlacement(routes, GenerateTasks(*g, 20, 0.25, 4),
                                           PlacementStrategy::kRandom, 5);
  Rng rng(6);
  int first_stage = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Move m = ProposeMove(c, routes, rng);
    REQUIRE(m.task < 20);
    const NodeId pred = c.predecessor(m.task, m.stage);
    const NodeId succ = c.successor(m.task, m.stage);
    CHECK(m.in_route.source() == pred);
    CHECK(m.in_route.target() == m.node);
    CHECK(m.out_route.source() == m.node);
    CHECK(m.out_route.target() == succ);
    CHECK(routes.pool(pred, m.node).Contains(m.in_route));
    CHECK(routes.pool(m.node, succ).Contains(m.out_route));
    first_stage += m.stage == 0;
  }
  CHECK(std::abs(first_stage - n / 2) < 200);
}

TEST_CASE("single task reaches the geodesic optimum") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = std::make_shared<const Graph>(
        oracle::RandomConnectedGraph(4 + trial % 7, 0.25, rng, false));
    const RoutingTable routes(g, 1);
    const auto specs = GenerateTasks(*g, 1, 0.25, rng());
    const AnnealResult r = Anneal(routes, specs, FastParams(), rng());
    const double geodesic = oracle::Length(
        *g, *oracle::Shortest(*g, oracle::AllSimplePaths(*g, specs[0].origin,
                                                         specs[0].destination))
                 .begin());
    const double want = specs[0].origin == specs[0].destination ? 0.5 : geodesic + 0.5;
    CHECK(r.best_energy == doctest::Approx(want).epsilon(1e-12));
    CHECK(oracle::ExhaustiveGroundState(*g, specs, 1) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("empty task set") {
  const auto g = std::make_shared<const Graph>(BuildLattice(3, 3));
  const RoutingTable routes(g, 1);
  const AnnealResult r = Anneal(routes, {}, FastParams(), 1);
  CHECK(r.best_energy == 0.0);
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].energy == 0.0);
  CHECK(r.best.task_count() == 0);
}

TEST_CASE("path graph with two tasks matches exhaustive search") {
  const auto g = std::make_shared<const Graph>(PathGraph(5));
  const RoutingTable routes(g, 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto specs = GenerateTasks(*g, 2, 0.75, seed);
    const double want = oracle::ExhaustiveGroundState(*g, specs, 1);
    const AnnealResult r = Anneal(routes, specs, FastParams(), seed + 100);
    CHECK(r.best_energy == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("trace and best-energy consistency") {
  const auto g = std::make_shared<const Graph>(BuildBarabasiAlbert(30, 2, 2));
  const RoutingTable routes(g, 1);
  const auto specs = GenerateTasks(*g, 60, 0.25, 3);
  AnnealParams p = FastParams(30000);
  p.schedule = Schedule::Geometric(30000, 1.0, 0.0);
  const AnnealResult r = Anneal(routes, specs, p, 4);
  REQUIRE(!r.trace.empty());
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].best_energy <= r.trace[i].energy + 1e-9);
    CHECK(r.best_energy <= r.trace[i].best_energy + 1e-9);
    if (i > 0) CHECK(r.trace[i].best_energy <= r.trace[i - 1].best_energy + 1e-12);
    if (i > 0) CHECK(r.trace[i].temperature <= r.trace[i - 1].temperature);
  }
  // Zero-temperature tail: the energy itself never goes up.
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    if (r.trace[i - 1].temperature == 0.0) {
      CHECK(r.trace[i].energy <= r.trace[i - 1].energy + 1e-9);
    }
  }
  const double recomputed = TotalEnergy(r.best);
  CHECK(std::fabs(recomputed - r.best_energy) <= 1e-6 * std::max(1.0, recomputed));
  CHECK(r.best.Check().empty());
  CHECK(r.restart_energies.size() == 3);
  CHECK(r.best_energy == doctest::Approx(r.restart_energies[r.restart]));
}

TEST_CASE("annealing is deterministic per seed") {
  const auto g = std::make_shared<const Graph>(BuildLattice(5, 5));
  const RoutingTable routes(g, 1);
  const auto specs = GenerateTasks(*g, 40, 0.25, 3);
  const AnnealResult a = Anneal(routes, specs, FastParams(), 9);
  const AnnealResult b = Anneal(routes, specs, FastParams(), 9);
  CHECK(a.best_energy == b.best_energy);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].energy == b.trace[i].energy);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    CHECK(a.best.placement(k).stage == b.best.placement(k).stage);
  }
}

TEST_CASE("annealing beats the random start") {
  const auto g = std::make_shared<const Graph>(BuildLattice(6, 6));
  const RoutingTable routes(g, 1);
  const auto specs = GenerateTasks(*g, 80, 0.25, 8);
  const double start =
      TotalEnergy(InitialPlacement(routes, specs, PlacementStrategy::kRandom, 1));
  const AnnealResult r = Anneal(routes, specs, FastParams(), 1);
  CHECK(r.best_energy < 0.7 * start);
}

TEST_CASE("fixed-temperature sampling") {
  const auto g = std::make_shared<const Graph>(BuildLattice(4, 4));
  const RoutingTable routes(g, 1);
  const auto specs = GenerateTasks(*g, 30, 0.25, 5);
  const AnnealResult r = Anneal(routes, specs, FastParams(40000), 6);

  SUBCASE("zero temperature stays at a local optimum") {
    // Descend to a state where no single move helps, then sample at t = 0.
    EnergyTracker t(r.best);
    Rng rng(1);
    SampleAtTemperature(t, 0.0, 50000, 0, routes, rng);
    const double floor = t.energy();
    const SampleStats s = SampleAtTemperature(t, 0.0, 20000, 0, routes, rng);
    CHECK(s.mean_energy <= floor + 1e-9);
    CHECK(t.energy() <= floor + 1e-9);
  }
  SUBCASE("very high temperature accepts almost everything") {
    EnergyTracker t(r.best);
    Rng rng(2);
    const SampleStats s = SampleAtTemperature(t, 1e9, 5000, 0, routes, rng);
    CHECK(s.acceptance_rate > 0.99);
  }
  SUBCASE("mean energy grows with temperature") {
    double prev = 0;
    for (double temp : {0.001, 0.05, 0.5, 5.0}) {
      EnergyTracker t(r.best);
      Rng rng(3);
      const SampleStats s = SampleAtTemperature(t, temp, 60000, 20000, routes, rng);
      const double se = std::sqrt(s.energy_variance / 200.0);  // ~200 effective samples
      CHECK(s.mean_energy >= prev - 3 * se);
      prev = s.mean_energy;
      CHECK(std::fabs(t.energy() - TotalEnergy(t.config())) <= 1e-6 * std::max(1.0, t.energy()));
    }
  }
}
