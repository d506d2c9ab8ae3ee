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


#include <memory>
#include <vector>

#include "ccsim/error.hpp"
#include "ccsim/latency.hpp"
#include "ccsim/workload.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ccsim;

TEST_CASE("aggregate cpu demand reaches capacity at 200 tasks") {
  const Graph g = BuildLattice(10, 10);
  const auto specs = GenerateTasks(g, 200, 0.25, 1);
  double demand = 0;
  for (const auto& s : specs) demand += s.workload[0] + s.workload[1];
  double capacity = 0;
  for (const auto& n : g.nodes()) capacity += n.cpu_capacity;
  CHECK(demand == 100.0);
  CHECK(capacity == 100.0);
  // One task fewer stays strictly below capacity.
  CHECK(demand - 0.5 < capacity);
}

TEST_CASE("task generation basics") {
  const Graph g = BuildBarabasiAlbert(30, 2, 4);
  const auto one = GenerateTasks(g, 1, 0.25, 9);
  REQUIRE(one.size() == 1);
  CHECK(one[0].origin < 30);
  CHECK(one[0].destination < 30);
  CHECK(one[0].workload[0] == 0.25);
  CHECK(one[0].workload[1] == 0.25);
  CHECK(one[0].flow == 1.0);

  const auto a = GenerateTasks(g, 50, 0.25, 12);
  const auto b = GenerateTasks(g, 50, 0.25, 12);
  for (std::size_t k = 0; k < 50; ++k) {
    CHECK(a[k].id == k);
    CHECK(a[k].origin == b[k].origin);
    CHECK(a[k].destination == b[k].destination);
  }
  // A larger draw with the same seed extends the smaller one.
  const auto c = GenerateTasks(g, 80, 0.25, 12);
  for (std::size_t k = 0; k < 50; ++k) CHECK(c[k].origin == a[k].origin);

  CHECK_THROWS_AS(GenerateTasks(g, 5, 0.0, 1), Error);
}

TEST_CASE("origins are uniform over nodes") {
  const Graph g = BuildLattice(10, 10);
  const std::size_t n = 10000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto specs = GenerateTasks(g, n, 0.25, seed);
    std::vector<double> counts(100, 0.0);
    std::vector<double> dest(100, 0.0);
    for (const auto& s : specs) {
      counts[s.origin] += 1;
      dest[s.destination] += 1;
    }
    const double expected = static_cast<double>(n) / 100.0;
    double chi2 = 0, chi2d = 0;
    for (int i = 0; i < 100; ++i) {
      chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
      chi2d += (dest[i] - expected) * (dest[i] - expected) / expected;
    }
    const double critical = oracle::ChiSquareQuantile(99, 2.326348);  // 1% level
    CHECK(critical == doctest::Approx(134.6).epsilon(0.002));
    CHECK(chi2 < critical);
    CHECK(chi2d < critical);
  }
}

TEST_CASE("shortest-path placement along a row") {
  const auto g = std::make_shared<const Graph>(BuildLattice(10, 10));
  const RoutingTable table(g, 1);
  TaskSpec spec;
  spec.origin = 0;
  spec.destination = 3;
  Rng rng(1);
  const TaskPlacement p = PlaceTask(table, spec, 1, 2, PlacementStrategy::kShortestPath, rng);
  CHECK(p.route[0].hops() + p.route[1].hops() + p.route[2].hops() == 3);
}

TEST_CASE("coincident stages give empty routes") {
  const auto g = std::make_shared<const Graph>(BuildLattice(3, 3));
  const RoutingTable table(g, 1);
  TaskSpec spec;
  spec.origin = spec.destination = 4;
  Rng rng(1);
  const TaskPlacement p = PlaceTask(table, spec, 4, 4, PlacementStrategy::kRandom, rng);
  for (const auto& r : p.route) CHECK(r.empty());
  const Configuration c(g, {spec}, {p});
  CHECK(c.Check().empty());
  const auto lat = ComputeLatencies(c);
  CHECK(lat.tasks[0].net == 0.0);
  CHECK(lat.tasks[0].cpu == 0.5);
}

TEST_CASE("initial placements are reproducible and valid") {
  const auto g = std::make_shared<const Graph>(BuildBarabasiAlbert(40, 2, 3));
  const RoutingTable table(g, 1);
  const auto specs = GenerateTasks(*g, 60, 0.25, 5);
  for (auto strategy : {PlacementStrategy::kRandom, PlacementStrategy::kShortestPath}) {
    const Configuration a = InitialPlacement(table, specs, strategy, 77);
    const Configuration b = InitialPlacement(table, specs, strategy, 77);
    CHECK(a.Check().empty());
    for (std::size_t k = 0; k < specs.size(); ++k) {
      CHECK(a.placement(k).stage == b.placement(k).stage);
      for (int r = 0; r < 3; ++r) CHECK(a.placement(k).route[r] == b.placement(k).route[r]);
      const auto& p = a.placement(k);
      CHECK(IsSimplePath(*g, p.route[0], specs[k].origin, p.stage[0]));
      CHECK(IsSimplePath(*g, p.route[1], p.stage[0], p.stage[1]));
      CHECK(IsSimplePath(*g, p.route[2], p.stage[1], specs[k].destination));
    }
  }
}

TEST_CASE("configuration check flags inconsistent placements") {
  const auto g = std::make_shared<const Graph>(BuildLattice(3, 3));
  TaskSpec spec;
  spec.origin = 0;
  spec.destination = 8;
  TaskPlacement p;
  p.stage = {1, 5};
  p.route[0] = PathFromNodes(*g, {0, 1});
  p.route[1] = PathFromNodes(*g, {1, 2, 5});
  p.route[2] = PathFromNodes(*g, {5, 8});
  CHECK(Configuration(g, {spec}, {p}).Check().empty());

  TaskPlacement bad = p;
  bad.route[2] = PathFromNodes(*g, {5, 4});
  CHECK_FALSE(Configuration(g, {spec}, {bad}).Check().empty());

  TaskPlacement loop = p;
  loop.route[1] = PathFromNodes(*g, {1, 2, 1, 2, 5});
  CHECK_FALSE(Configuration(g, {spec}, {loop}).Check().empty());

  TaskSpec zero = spec;
  zero.workload[0] = 0;
  CHECK_FALSE(Configuration(g, {zero}, {p}).Check().empty());
}

TEST_CASE("placement strategy names") {
  CHECK(ParsePlacementStrategy("random") == PlacementStrategy::kRandom);
  CHECK(ParsePlacementStrategy("shortest_path") == PlacementStrategy::kShortestPath);
  CHECK(std::string(PlacementStrategyName(PlacementStrategy::kShortestPath)) == "shortest_path");
  CHECK_THROWS_AS(ParsePlacementStrategy("nearest"), Error);
}
