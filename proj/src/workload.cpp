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

#include "ccsim/workload.hpp"

#include <utility>

#include "ccsim/error.hpp"
#include "ccsim/rng.hpp"

namespace ccsim {

PlacementStrategy ParsePlacementStrategy(const std::string& name) {
  if (name == "random") return PlacementStrategy::kRandom;
  if (name == "shortest-path" || name == "shortest_path") {
    return PlacementStrategy::kShortestPath;
  }
  Throw(ErrorKind::kParameter, "unknown placement strategy '" + name + "'");
}

const char* PlacementStrategyName(PlacementStrategy s) {
  return s == PlacementStrategy::kRandom ? "random" : "shortest_path";
}

Configuration::Configuration(std::shared_ptr<const Graph> graph,
                             std::vector<TaskSpec> specs,
                             std::vector<TaskPlacement> placements)
    : graph_(std::move(graph)),
      specs_(std::move(specs)),
      placements_(std::move(placements)) {
  if (!graph_) Throw(ErrorKind::kParameter, "configuration needs a graph");
  if (specs_.size() != placements_.size()) {
    Throw(ErrorKind::kParameter, "one placement per task required");
  }
}

void Configuration::set_placements(std::vector<TaskPlacement> p) {
  if (p.size() != specs_.size()) {
    Throw(ErrorKind::kParameter, "one placement per task required");
  }
  placements_ = std::move(p);
}

std::vector<std::string> Configuration::Check() const {
  std::vector<std::string> problems;
  const std::size_t m = graph_->node_count();
  for (std::size_t k = 0; k < specs_.size(); ++k) {
    const TaskSpec& s = specs_[k];
    const TaskPlacement& p = placements_[k];
    const std::string tag = "task " + std::to_string(k) + ": ";
    if (s.origin >= m || s.destination >= m || p.stage[0] >= m || p.stage[1] >= m) {
      problems.push_back(tag + "node id out of range");
      continue;
    }
    if (!(s.workload[0] > 0 && s.workload[1] > 0)) {
      problems.push_back(tag + "nonpositive workload");
    }
    if (!(s.flow > 0)) problems.push_back(tag + "nonpositive flow");
    const NodeId hops[4] = {s.origin, p.stage[0], p.stage[1], s.destination};
    for (int h = 0; h < 3; ++h) {
      if (!IsSimplePath(*graph_, p.route[h], hops[h], hops[h + 1])) {
        problems.push_back(tag + "route " + std::to_string(h) +
                           " is not a simple path between its stages");
      }
    }
  }
  return problems;
}

std::vector<TaskSpec> GenerateTasks(const Graph& graph, std::size_t count,
                                    double stage_workload, std::uint64_t seed) {
  if (graph.node_count() == 0) Throw(ErrorKind::kParameter, "empty graph");
  if (!(stage_workload > 0)) {
    Throw(ErrorKind::kParameter, "stage workload must be positive");
  }
  Rng rng(seed);
  std::vector<TaskSpec> specs(count);
  for (std::size_t k = 0; k < count; ++k) {
    specs[k].id = static_cast<std::uint32_t>(k);
    specs[k].origin = static_cast<NodeId>(rng.Below(graph.node_count()));
    specs[k].destination = static_cast<NodeId>(rng.Below(graph.node_count()));
    specs[k].workload = {stage_workload, stage_workload};
    specs[k].flow = 1.0;
  }
  return specs;
}

TaskPlacement PlaceTask(const RoutingTable& routes, const TaskSpec& spec,
                        NodeId stage1, NodeId stage2, PlacementStrategy strategy,
                        Rng& rng, double length_bias) {
  TaskPlacement p;
  p.stage = {stage1, stage2};
  const NodeId hops[4] = {spec.origin, stage1, stage2, spec.destination};
  for (int h = 0; h < 3; ++h) {
    const PathPool& pool = routes.pool(hops[h], hops[h + 1]);
    if (pool.components().empty()) {
      Throw(ErrorKind::kInternal, "unreachable stage pair");
    }
    if (strategy == PlacementStrategy::kShortestPath) {
      // The first component is the plain shortest-path DAG.
      PathPool shortest(&routes.graph(), hops[h], hops[h + 1], 0,
                        {pool.components().front()});
      p.route[h] = shortest.Sample(rng);
    } else {
      p.route[h] = pool.Sample(rng, length_bias);
    }
  }
  return p;
}

Configuration InitialPlacement(const RoutingTable& routes,
                               std::vector<TaskSpec> specs,
                               PlacementStrategy strategy, std::uint64_t seed,
                               double length_bias) {
  Rng rng(seed);
  const std::size_t m = routes.graph().node_count();
  std::vector<TaskPlacement> placements;
  placements.reserve(specs.size());
  for (const TaskSpec& s : specs) {
    const auto a = static_cast<NodeId>(rng.Below(m));
    const auto b = static_cast<NodeId>(rng.Below(m));
    placements.push_back(PlaceTask(routes, s, a, b, strategy, rng, length_bias));
  }
  return Configuration(routes.graph_ptr(), std::move(specs), std::move(placements));
}

}  // namespace ccsim
