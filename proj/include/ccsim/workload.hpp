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

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ccsim/routing.hpp"
#include "ccsim/topology.hpp"

namespace ccsim {

// origin -> stage 1 -> stage 2 -> destination. Immutable once generated.
struct TaskSpec {
  std::uint32_t id = 0;
  NodeId origin = 0;
  NodeId destination = 0;
  std::array<double, 2> workload{0.25, 0.25};  // work-units per compute stage
  double flow = 1.0;                           // flow-units on every route link
};

// Mutable allocation of one task: where the two compute stages run and the
// three routes joining origin, stages and destination.
struct TaskPlacement {
  std::array<NodeId, 2> stage{0, 0};
  std::array<Path, 3> route;
};

enum class PlacementStrategy { kRandom, kShortestPath };

PlacementStrategy ParsePlacementStrategy(const std::string& name);
const char* PlacementStrategyName(PlacementStrategy s);

class Configuration {
 public:
  Configuration() = default;
  Configuration(std::shared_ptr<const Graph> graph, std::vector<TaskSpec> specs,
                std::vector<TaskPlacement> placements);

  const Graph& graph() const { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }
  std::size_t task_count() const { return specs_.size(); }
  std::span<const TaskSpec> specs() const { return specs_; }
  const TaskSpec& spec(std::size_t k) const { return specs_[k]; }
  const TaskPlacement& placement(std::size_t k) const { return placements_[k]; }
  std::span<const TaskPlacement> placements() const { return placements_; }

  // Node feeding into / fed by compute stage s (0 or 1) of task k.
  NodeId predecessor(std::size_t k, int s) const {
    return s == 0 ? specs_[k].origin : placements_[k].stage[0];
  }
  NodeId successor(std::size_t k, int s) const {
    return s == 1 ? specs_[k].destination : placements_[k].stage[1];
  }

  void set_placement(std::size_t k, TaskPlacement p) { placements_[k] = std::move(p); }
  void set_placements(std::vector<TaskPlacement> p);

  // Empty when every placement is consistent with its spec and the graph.
  std::vector<std::string> Check() const;

 private:
  std::shared_ptr<const Graph> graph_;
  std::vector<TaskSpec> specs_;
  std::vector<TaskPlacement> placements_;
};

// Origins and destinations drawn independently and uniformly over all nodes
// (they may coincide); both stage workloads equal `stage_workload`; unit flow.
std::vector<TaskSpec> GenerateTasks(const Graph& graph, std::size_t count,
                                    double stage_workload, std::uint64_t seed);

// Routes a task through the given stage nodes, drawing each route from the
// pool (kRandom) or uniformly among shortest paths (kShortestPath).
TaskPlacement PlaceTask(const RoutingTable& routes, const TaskSpec& spec,
                        NodeId stage1, NodeId stage2, PlacementStrategy strategy,
                        Rng& rng, double length_bias = 0.0);

// Stage nodes uniform over all nodes, routes per `strategy`.
Configuration InitialPlacement(const RoutingTable& routes,
                               std::vector<TaskSpec> specs,
                               PlacementStrategy strategy, std::uint64_t seed,
                               double length_bias = 0.0);

}  // namespace ccsim
