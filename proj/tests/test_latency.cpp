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


#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "ccsim/annealer.hpp"
#include "ccsim/error.hpp"
#include "ccsim/latency.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ccsim;

namespace {

TaskPlacement Place(const Graph& g, NodeId s1, NodeId s2, std::vector<NodeId> r0,
                    std::vector<NodeId> r1, std::vector<NodeId> r2) {
  TaskPlacement p;
  p.stage = {s1, s2};
  p.route[0] = PathFromNodes(g, std::move(r0));
  p.route[1] = PathFromNodes(g, std::move(r1));
  p.route[2] = PathFromNodes(g, std::move(r2));
  return p;
}

TaskSpec Spec(NodeId o, NodeId d, std::uint32_t id = 0) {
  TaskSpec s;
  s.id = id;
  s.origin = o;
  s.destination = d;
  return s;
}

struct Instance {
  std::shared_ptr<const Graph> graph;
  std::unique_ptr<RoutingTable> routes;
  Configuration config;
};

Instance RandomInstance(std::mt19937_64& rng, std::uint32_t max_nodes, std::size_t max_tasks) {
  std::uniform_int_distribution<std::uint32_t> nd(2, max_nodes);
  std::uniform_int_distribution<std::size_t> td(1, max_tasks);
  Instance in;
  in.graph = std::make_shared<const Graph>(oracle::RandomConnectedGraph(nd(rng), 0.2, rng));
  in.routes = std::make_unique<RoutingTable>(in.graph, static_cast<int>(rng() % 3));
  auto specs = GenerateTasks(*in.graph, td(rng), 0.25, rng());
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (auto& s : specs) {
    s.workload = {w(rng), w(rng)};
    s.flow = w(rng);
  }
  in.config = InitialPlacement(*in.routes, specs, PlacementStrategy::kRandom, rng());
  return in;
}

}  // namespace

TEST_CASE("link and node demands") {
  const auto g = std::make_shared<const Graph>(BuildLattice(1, 4));
  {
    const Configuration empty(g, {}, {});
    const LoadState l = ComputeLoads(empty);
    for (double d : l.link_demand) CHECK(d == 0.0);
    for (double d : l.node_demand) CHECK(d == 0.0);
  }
  {
    const Configuration one(g, {Spec(0, 3)}, {Place(*g, 1, 2, {0, 1}, {1, 2}, {2, 3})});
    const LoadState l = ComputeLoads(one);
    for (double d : l.link_demand) CHECK(d == 1.0);
    CHECK(l.node_demand[1] == 0.25);
    CHECK(l.node_demand[2] == 0.25);
    CHECK(l.node_demand[0] == 0.0);
  }
  {
    const Configuration two(g, {Spec(0, 1), Spec(0, 1, 1)},
                            {Place(*g, 0, 0, {0}, {0}, {0, 1}), Place(*g, 1, 1, {0, 1}, {1}, {1})});
    const LoadState l = ComputeLoads(two);
    CHECK(l.link_demand[g->FindEdge(0, 1)] == 2.0);
    CHECK(l.link_demand[g->FindEdge(1, 2)] == 0.0);
  }
}

TEST_CASE("clamped ratios") {
  CHECK(ClampedRatio(0.5, 1.0) == 1.0);
  CHECK(ClampedRatio(2.0, 1.0) == 2.0);
  CHECK(ClampedRatio(1.0, 1.0) == 1.0);
  CHECK(ClampedRatio(0.0, 1.0) == 1.0);
  CHECK(ClampedRatio(6.0, 3.0) == 2.0);
}

TEST_CASE("node slowdown from stacked stages") {
  const auto g = std::make_shared<const Graph>(BuildLattice(1, 2));
  std::vector<TaskSpec> specs;
  std::vector<TaskPlacement> ps;
  for (std::uint32_t k = 0; k < 8; ++k) {
    specs.push_back(Spec(0, 1, k));
    ps.push_back(Place(*g, 0, 1, {0}, {0, 1}, {1}));  // stage 1 on node 0 only
  }
  const Configuration eight(g, specs, ps);
  const LoadState l = ComputeLoads(eight);
  CHECK(l.node_demand[0] == 2.0);
  CHECK(NodeSlowdown(*g, l, 0) == 2.0);

  const Configuration two(g, {specs[0], specs[1]}, {ps[0], ps[1]});
  CHECK(ComputeLoads(two).node_demand[0] == 0.5);
  CHECK(NodeSlowdown(*g, ComputeLoads(two), 0) == 1.0);

  const Configuration none(g, {}, {});
  CHECK(NodeSlowdown(*g, ComputeLoads(none), 0) == 1.0);
}

TEST_CASE("lone task latency") {
  const auto g = std::make_shared<const Graph>(BuildLattice(1, 4));
  const Configuration c(g, {Spec(0, 3)}, {Place(*g, 1, 2, {0, 1}, {1, 2}, {2, 3})});
  const auto b = ComputeLatencies(c);
  CHECK(b.tasks[0].net == 3.0);
  CHECK(b.tasks[0].cpu == 0.5);
  CHECK(b.tasks[0].total() == 3.5);
  CHECK(TotalEnergy(c) == 3.5);
  CHECK(TotalEnergy(Configuration(g, {}, {})) == 0.0);
}

TEST_CASE("coincident tasks sharing one link") {
  // Every task computes both stages on node 0 and ships the result over the
  // single link 0-1. Eight tasks: link demand 8, node demand 8 * 0.5 = 4.
  const auto g = std::make_shared<const Graph>(BuildLattice(1, 2));
  auto build = [&](std::uint32_t n) {
    std::vector<TaskSpec> specs;
    std::vector<TaskPlacement> ps;
    for (std::uint32_t k = 0; k < n; ++k) {
      specs.push_back(Spec(0, 1, k));
      ps.push_back(Place(*g, 0, 0, {0}, {0}, {0, 1}));
    }
    return Configuration(g, specs, ps);
  };
  const Configuration eight = build(8);
  const LoadState l = ComputeLoads(eight);
  CHECK(LinkSlowdown(*g, l, 0) == 8.0);
  CHECK(NodeSlowdown(*g, l, 0) == 4.0);
  const auto b = ComputeLatencies(eight);
  for (const auto& t : b.tasks) {
    CHECK(t.net == 8.0);
    CHECK(t.cpu == 2.0);
  }
  // Four such tasks bring the node to twice its capacity.
  const auto four = ComputeLatencies(build(4));
  CHECK(NodeSlowdown(*g, ComputeLoads(build(4)), 0) == 2.0);
  CHECK(four.tasks[0].cpu == 1.0);
  CHECK(four.tasks[0].net == 4.0);

  const auto r = oracle::RecountLatencies(*g, std::vector<TaskSpec>(eight.specs().begin(),
                                                                    eight.specs().end()),
                                          oracle::FromConfiguration(eight));
  CHECK(r.energy == doctest::Approx(b.energy()).epsilon(1e-12));
}

TEST_CASE("latencies match a brute-force recount") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance in = RandomInstance(rng, 12, 30);
    const auto& c = in.config;
    const std::vector<TaskSpec> specs(c.specs().begin(), c.specs().end());
    const auto want = oracle::RecountLatencies(c.graph(), specs, oracle::FromConfiguration(c));
    const LoadState l = ComputeLoads(c);
    for (std::size_t e = 0; e < c.graph().edge_count(); ++e) {
      CHECK(std::fabs(l.link_demand[e] - want.link_demand[e]) <= 1e-9);
    }
    for (std::size_t n = 0; n < c.graph().node_count(); ++n) {
      CHECK(std::fabs(l.node_demand[n] - want.node_demand[n]) <= 1e-9);
      CHECK(NodeSlowdown(c.graph(), l, static_cast<NodeId>(n)) >= 1.0);
    }
    for (EdgeId e = 0; e < c.graph().edge_count(); ++e) CHECK(LinkSlowdown(c.graph(), l, e) >= 1.0);
    const auto b = ComputeLatencies(c);
    double sum = 0;
    for (std::size_t k = 0; k < specs.size(); ++k) {
      CHECK(b.tasks[k].net == doctest::Approx(want.net[k]).epsilon(1e-12));
      CHECK(b.tasks[k].cpu == doctest::Approx(want.cpu[k]).epsilon(1e-12));
      CHECK(b.tasks[k].net >= 0);
      CHECK(b.tasks[k].cpu >= 0);
      sum += b.tasks[k].total();
    }
    CHECK(std::fabs(b.energy() - sum) <= 1e-9 * std::max(1.0, sum));
    CHECK(std::fabs(b.net + b.cpu - b.energy()) <= 1e-9 * std::max(1.0, sum));
  }
}

TEST_CASE("adding a task never speeds anything up") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = RandomInstance(rng, 10, 20);
    const auto& c = in.config;
    std::vector<TaskSpec> specs(c.specs().begin(), c.specs().end());
    std::vector<TaskPlacement> ps(c.placements().begin(), c.placements().end());
    const auto before = ComputeLatencies(c);
    const LoadState lb = ComputeLoads(c);

    const auto extra = InitialPlacement(*in.routes, GenerateTasks(c.graph(), 1, 0.4, rng()),
                                        PlacementStrategy::kRandom, rng());
    TaskSpec s = extra.spec(0);
    s.id = static_cast<std::uint32_t>(specs.size());
    specs.push_back(s);
    ps.push_back(extra.placement(0));
    const Configuration bigger(c.graph_ptr(), specs, ps);
    const auto after = ComputeLatencies(bigger);
    const LoadState la = ComputeLoads(bigger);
    for (EdgeId e = 0; e < c.graph().edge_count(); ++e) {
      CHECK(LinkSlowdown(c.graph(), la, e) >= LinkSlowdown(c.graph(), lb, e));
    }
    for (NodeId n = 0; n < c.graph().node_count(); ++n) {
      CHECK(NodeSlowdown(c.graph(), la, n) >= NodeSlowdown(c.graph(), lb, n));
    }
    for (std::size_t k = 0; k < before.tasks.size(); ++k) {
      CHECK(after.tasks[k].total() >= before.tasks[k].total() - 1e-12);
    }
    CHECK(after.energy() > before.energy());
  }
}

TEST_CASE("duplicating every task raises the energy") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance in = RandomInstance(rng, 10, 15);
    const auto& c = in.config;
    std::vector<TaskSpec> specs(c.specs().begin(), c.specs().end());
    std::vector<TaskPlacement> ps(c.placements().begin(), c.placements().end());
    const std::size_t n = specs.size();
    for (std::size_t k = 0; k < n; ++k) {
      specs.push_back(specs[k]);
      specs.back().id = static_cast<std::uint32_t>(n + k);
      ps.push_back(ps[k]);
    }
    CHECK(TotalEnergy(Configuration(c.graph_ptr(), specs, ps)) > TotalEnergy(c));
  }
}

TEST_CASE("energy is invariant under task relabeling") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance in = RandomInstance(rng, 10, 20);
    const auto& c = in.config;
    std::vector<std::size_t> order(c.task_count());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<TaskSpec> specs;
    std::vector<TaskPlacement> ps;
    for (std::size_t k : order) {
      specs.push_back(c.spec(k));
      ps.push_back(c.placement(k));
    }
    const double e0 = TotalEnergy(c);
    CHECK(TotalEnergy(Configuration(c.graph_ptr(), specs, ps)) ==
          doctest::Approx(e0).epsilon(1e-12));
  }
}

TEST_CASE("energy deltas") {
  const auto g = std::make_shared<const Graph>(BuildLattice(2, 3));
  const RoutingTable routes(g, 1);
  // Two tasks squeezed through link 0-1 (unit bandwidth, slowdown 2).
  const std::vector<TaskSpec> specs{Spec(0, 2, 0), Spec(0, 2, 1)};
  const std::vector<TaskPlacement> ps{Place(*g, 1, 2, {0, 1}, {1, 2}, {2}),
                                      Place(*g, 1, 2, {0, 1}, {1, 2}, {2})};
  const Configuration c(g, specs, ps);
  const LoadState l = ComputeLoads(c);

  Move same{0, 0, 1, ps[0].route[0], ps[0].route[1]};
  CHECK(ComputeEnergyDelta(c, l, same).total() == 0.0);

  // Move task 1's first stage to node 3, off the shared links.
  Move off{1, 0, 3, PathFromNodes(*g, {0, 3}), PathFromNodes(*g, {3, 4, 5, 2})};
  CHECK(ComputeEnergyDelta(c, l, off).total() < 0.0);

  Move bad{1, 0, 3, PathFromNodes(*g, {0, 1}), PathFromNodes(*g, {3, 4, 5, 2})};
  CHECK_THROWS_AS(CheckMove(c, bad), Error);
}

TEST_CASE("incremental deltas match full recomputation") {
  std::mt19937_64 rng(53);
  int moves = 0;
  while (moves < 10000) {
    Instance in = RandomInstance(rng, 25, 50);
    EnergyTracker tracker(in.config);
    Rng r(rng());
    for (int i = 0; i < 200; ++i, ++moves) {
      const Move m = ProposeMove(tracker.config(), *in.routes, r);
      const EnergyChange d = tracker.Delta(m);
      const EnergyChange d2 = ComputeEnergyDelta(tracker.config(), tracker.loads(), m);
      Configuration next = tracker.config();
      TaskPlacement p = next.placement(m.task);
      p.stage[m.stage] = m.node;
      p.route[m.stage] = m.in_route;
      p.route[m.stage + 1] = m.out_route;
      next.set_placement(m.task, p);
      const double before = TotalEnergy(tracker.config());
      const double full = TotalEnergy(next) - before;
      const double tol = 1e-6 * std::max(1.0, std::fabs(before));
      REQUIRE(std::fabs(d.total() - full) <= tol);
      REQUIRE(std::fabs(d2.total() - full) <= tol);
      if (r.Uniform() < 0.5) {
        tracker.Apply(m, d);
        REQUIRE(std::fabs(tracker.energy() - TotalEnergy(tracker.config())) <= tol);
      }
    }
    CHECK(tracker.Resync() <= 1e-6 * std::max(1.0, tracker.energy()));
  }
}
