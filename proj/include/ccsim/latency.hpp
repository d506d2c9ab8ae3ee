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

#include <cstdint>
#include <vector>

#include "ccsim/workload.hpp"

namespace ccsim {

// Aggregated demands over a Configuration. link_traversals counts route-link
// occurrences (a task crossing the same link in two of its routes counts
// twice) and is what scales the network energy; link_demand is the same sum
// weighted by each task's flow.
struct LoadState {
  std::vector<double> link_demand;
  std::vector<double> link_traversals;
  std::vector<double> node_demand;
};

LoadState ComputeLoads(const Configuration& config);

// max(1, demand / capacity): no speed-up below capacity, linear slowdown above.
inline double ClampedRatio(double demand, double capacity) {
  const double r = demand / capacity;
  return r > 1.0 ? r : 1.0;
}

double LinkSlowdown(const Graph& graph, const LoadState& loads, EdgeId e);
double NodeSlowdown(const Graph& graph, const LoadState& loads, NodeId n);

struct TaskLatency {
  double net = 0;
  double cpu = 0;
  double total() const { return net + cpu; }
};

TaskLatency ComputeTaskLatency(const Configuration& config,
                               const LoadState& loads, std::size_t k);

struct LatencyBreakdown {
  std::vector<TaskLatency> tasks;
  double net = 0;
  double cpu = 0;
  double energy() const { return net + cpu; }
};

LatencyBreakdown ComputeLatencies(const Configuration& config);

// Sum of all task latencies under freshly computed loads.
double TotalEnergy(const Configuration& config);

// Energy terms of one resource. Summed over all links and nodes they equal
// the sum of task latencies, which is what makes local deltas possible.
inline double LinkEnergy(const LinkAttr& a, double demand, double traversals) {
  return a.base_latency * ClampedRatio(demand, a.bandwidth) * traversals;
}
inline double NodeEnergy(const NodeAttr& a, double demand) {
  return ClampedRatio(demand, a.cpu_capacity) * demand / a.cpu_capacity;
}

// Remap compute stage `stage` (0 or 1) of task `task` to `node`, with new
// routes from the stage's predecessor and to its successor.
struct Move {
  std::uint32_t task = 0;
  int stage = 0;
  NodeId node = 0;
  Path in_route;
  Path out_route;
};

struct EnergyChange {
  double net = 0;
  double cpu = 0;
  double total() const { return net + cpu; }
};

// Throws kParameter if the move does not fit the configuration.
void CheckMove(const Configuration& config, const Move& move);

// Energy change the move would cause, touching only resources whose demand
// changes. Uses a scratch map; see EnergyTracker for the hot-path version.
EnergyChange ComputeEnergyDelta(const Configuration& config,
                                const LoadState& loads, const Move& move);

// Owns a Configuration plus its LoadState and energy, kept in sync across
// applied moves.
class EnergyTracker {
 public:
  explicit EnergyTracker(Configuration config);

  const Configuration& config() const { return config_; }
  const LoadState& loads() const { return loads_; }
  double energy() const { return net_ + cpu_; }
  double net_energy() const { return net_; }
  double cpu_energy() const { return cpu_; }

  EnergyChange Delta(const Move& move);
  void Apply(const Move& move, const EnergyChange& change);

  // Rebuilds loads and energy from scratch and returns the absolute drift of
  // the tracked energy against the recomputed one.
  double Resync();

  // Replaces every placement (e.g. restoring a snapshot) and resyncs.
  void Reset(std::vector<TaskPlacement> placements);

 private:
  void Stage(const Path& path, double flow, double sign);

  Configuration config_;
  LoadState loads_;
  double net_ = 0;
  double cpu_ = 0;
  // Pending per-link changes for the move being evaluated.
  std::vector<double> pending_demand_;
  std::vector<double> pending_traversals_;
  std::vector<char> pending_mark_;
  std::vector<EdgeId> pending_edges_;
};

}  // namespace ccsim
