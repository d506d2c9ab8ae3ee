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

#include "ccsim/latency.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "ccsim/error.hpp"

namespace ccsim {

LoadState ComputeLoads(const Configuration& config) {
  const Graph& g = config.graph();
  LoadState s;
  s.link_demand.assign(g.edge_count(), 0.0);
  s.link_traversals.assign(g.edge_count(), 0.0);
  s.node_demand.assign(g.node_count(), 0.0);
  for (std::size_t k = 0; k < config.task_count(); ++k) {
    const TaskSpec& spec = config.spec(k);
    const TaskPlacement& p = config.placement(k);
    for (const Path& route : p.route) {
      for (EdgeId e : route.edges) {
        s.link_demand[e] += spec.flow;
        s.link_traversals[e] += 1.0;
      }
    }
    s.node_demand[p.stage[0]] += spec.workload[0];
    s.node_demand[p.stage[1]] += spec.workload[1];
  }
  return s;
}

double LinkSlowdown(const Graph& graph, const LoadState& loads, EdgeId e) {
  return ClampedRatio(loads.link_demand[e], graph.edge(e).attr.bandwidth);
}

double NodeSlowdown(const Graph& graph, const LoadState& loads, NodeId n) {
  return ClampedRatio(loads.node_demand[n], graph.node(n).cpu_capacity);
}

TaskLatency ComputeTaskLatency(const Configuration& config,
                               const LoadState& loads, std::size_t k) {
  const Graph& g = config.graph();
  const TaskSpec& spec = config.spec(k);
  const TaskPlacement& p = config.placement(k);
  TaskLatency l;
  for (const Path& route : p.route) {
    for (EdgeId e : route.edges) {
      l.net += g.edge(e).attr.base_latency * LinkSlowdown(g, loads, e);
    }
  }
  for (int s = 0; s < 2; ++s) {
    const NodeId n = p.stage[s];
    l.cpu += NodeSlowdown(g, loads, n) * spec.workload[s] / g.node(n).cpu_capacity;
  }
  return l;
}

LatencyBreakdown ComputeLatencies(const Configuration& config) {
  const LoadState loads = ComputeLoads(config);
  LatencyBreakdown b;
  b.tasks.reserve(config.task_count());
  for (std::size_t k = 0; k < config.task_count(); ++k) {
    b.tasks.push_back(ComputeTaskLatency(config, loads, k));
    b.net += b.tasks.back().net;
    b.cpu += b.tasks.back().cpu;
  }
  return b;
}

double TotalEnergy(const Configuration& config) {
  return ComputeLatencies(config).energy();
}

void CheckMove(const Configuration& config, const Move& move) {
  if (move.task >= config.task_count()) {
    Throw(ErrorKind::kParameter, "move targets a nonexistent task");
  }
  if (move.stage != 0 && move.stage != 1) {
    Throw(ErrorKind::kParameter, "move stage must be 0 or 1");
  }
  const Graph& g = config.graph();
  if (move.node >= g.node_count()) {
    Throw(ErrorKind::kParameter, "move node out of range");
  }
  const NodeId pred = config.predecessor(move.task, move.stage);
  const NodeId succ = config.successor(move.task, move.stage);
  if (!IsSimplePath(g, move.in_route, pred, move.node) ||
      !IsSimplePath(g, move.out_route, move.node, succ)) {
    Throw(ErrorKind::kParameter, "move routes do not join the stage neighbours");
  }
}

EnergyChange ComputeEnergyDelta(const Configuration& config,
                                const LoadState& loads, const Move& move) {
  CheckMove(config, move);
  const Graph& g = config.graph();
  const TaskSpec& spec = config.spec(move.task);
  const TaskPlacement& cur = config.placement(move.task);

  std::map<EdgeId, std::pair<double, double>> links;  // demand, traversals
  auto stage = [&](const Path& p, double sign) {
    for (EdgeId e : p.edges) {
      links[e].first += sign * spec.flow;
      links[e].second += sign;
    }
  };
  stage(cur.route[move.stage], -1.0);
  stage(cur.route[move.stage + 1], -1.0);
  stage(move.in_route, 1.0);
  stage(move.out_route, 1.0);

  EnergyChange d;
  for (const auto& [e, change] : links) {
    if (change.first == 0.0 && change.second == 0.0) continue;
    const LinkAttr& a = g.edge(e).attr;
    const double dem = loads.link_demand[e], trav = loads.link_traversals[e];
    d.net += LinkEnergy(a, dem + change.first, trav + change.second) -
             LinkEnergy(a, dem, trav);
  }
  const NodeId from = cur.stage[move.stage];
  if (from != move.node) {
    const double w = spec.workload[move.stage];
    const NodeAttr& af = g.node(from);
    const NodeAttr& at = g.node(move.node);
    const double df = loads.node_demand[from], dt = loads.node_demand[move.node];
    d.cpu += NodeEnergy(af, df - w) - NodeEnergy(af, df);
    d.cpu += NodeEnergy(at, dt + w) - NodeEnergy(at, dt);
  }
  return d;
}

EnergyTracker::EnergyTracker(Configuration config) : config_(std::move(config)) {
  const std::size_t e = config_.graph().edge_count();
  pending_demand_.assign(e, 0.0);
  pending_traversals_.assign(e, 0.0);
  pending_mark_.assign(e, 0);
  Resync();
}

double EnergyTracker::Resync() {
  const double before = energy();
  loads_ = ComputeLoads(config_);
  const Graph& g = config_.graph();
  // Summed per resource, in the same form the deltas use.
  net_ = 0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    net_ += LinkEnergy(g.edge(e).attr, loads_.link_demand[e],
                       loads_.link_traversals[e]);
  }
  cpu_ = 0;
  for (NodeId n = 0; n < g.node_count(); ++n) {
    cpu_ += NodeEnergy(g.node(n), loads_.node_demand[n]);
  }
  return std::abs(before - energy());
}

void EnergyTracker::Reset(std::vector<TaskPlacement> placements) {
  config_.set_placements(std::move(placements));
  Resync();
}

void EnergyTracker::Stage(const Path& path, double flow, double sign) {
  for (EdgeId e : path.edges) {
    if (!pending_mark_[e]) {
      pending_mark_[e] = 1;
      pending_edges_.push_back(e);
    }
    pending_demand_[e] += sign * flow;
    pending_traversals_[e] += sign;
  }
}

EnergyChange EnergyTracker::Delta(const Move& move) {
  const Graph& g = config_.graph();
  const TaskSpec& spec = config_.spec(move.task);
  const TaskPlacement& cur = config_.placement(move.task);

  pending_edges_.clear();
  Stage(cur.route[move.stage], spec.flow, -1.0);
  Stage(cur.route[move.stage + 1], spec.flow, -1.0);
  Stage(move.in_route, spec.flow, 1.0);
  Stage(move.out_route, spec.flow, 1.0);

  EnergyChange d;
  for (EdgeId e : pending_edges_) {
    const double dd = pending_demand_[e], dt = pending_traversals_[e];
    pending_demand_[e] = 0;
    pending_traversals_[e] = 0;
    pending_mark_[e] = 0;
    if (dd == 0.0 && dt == 0.0) continue;
    const LinkAttr& a = g.edge(e).attr;
    const double dem = loads_.link_demand[e], trav = loads_.link_traversals[e];
    d.net += LinkEnergy(a, dem + dd, trav + dt) - LinkEnergy(a, dem, trav);
  }
  const NodeId from = cur.stage[move.stage];
  if (from != move.node) {
    const double w = spec.workload[move.stage];
    const NodeAttr& af = g.node(from);
    const NodeAttr& at = g.node(move.node);
    const double df = loads_.node_demand[from], dt = loads_.node_demand[move.node];
    d.cpu += NodeEnergy(af, df - w) - NodeEnergy(af, df);
    d.cpu += NodeEnergy(at, dt + w) - NodeEnergy(at, dt);
  }
  return d;
}

void EnergyTracker::Apply(const Move& move, const EnergyChange& change) {
  const TaskSpec& spec = config_.spec(move.task);
  TaskPlacement p = config_.placement(move.task);
  for (int h : {move.stage, move.stage + 1}) {
    for (EdgeId e : p.route[h].edges) {
      loads_.link_demand[e] -= spec.flow;
      loads_.link_traversals[e] -= 1.0;
    }
  }
  for (const Path* r : {&move.in_route, &move.out_route}) {
    for (EdgeId e : r->edges) {
      loads_.link_demand[e] += spec.flow;
      loads_.link_traversals[e] += 1.0;
    }
  }
  loads_.node_demand[p.stage[move.stage]] -= spec.workload[move.stage];
  loads_.node_demand[move.node] += spec.workload[move.stage];
  p.stage[move.stage] = move.node;
  p.route[move.stage] = move.in_route;
  p.route[move.stage + 1] = move.out_route;
  config_.set_placement(move.task, std::move(p));
  net_ += change.net;
  cpu_ += change.cpu;
}

}  // namespace ccsim
