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
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "ccsim/rng.hpp"
#include "ccsim/topology.hpp"

namespace ccsim {

// A walk through the graph stored both as node and edge sequences. A path
// with a single node and no edges is the "empty" route used when two
// consecutive task stages sit on the same node.
struct Path {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;

  static Path Trivial(NodeId at) { return Path{{at}, {}}; }

  NodeId source() const { return nodes.front(); }
  NodeId target() const { return nodes.back(); }
  std::size_t hops() const { return edges.size(); }
  bool empty() const { return edges.empty(); }

  friend bool operator==(const Path& a, const Path& b) {
    return a.nodes == b.nodes;
  }
  friend bool operator<(const Path& a, const Path& b) {
    return a.nodes < b.nodes;
  }
};

// Sum of base latencies along the path.
double PathLength(const Graph& graph, const Path& path);

// True when `path` runs from u to v over existing links, its edge ids agree
// with its node sequence, and no node repeats.
bool IsSimplePath(const Graph& graph, const Path& path, NodeId u, NodeId v);

// Builds a Path from a node sequence, resolving edge ids. Throws kParameter
// if two consecutive nodes are not adjacent.
Path PathFromNodes(const Graph& graph, std::vector<NodeId> nodes);

// Shortest-path structure towards one target in the graph with `excluded`
// nodes deleted. dist is the minimum total base latency to the target
// (infinity when unreachable or excluded), count the number of distinct
// shortest paths and min_hops the fewest links among them.
struct ShortestPathDag {
  NodeId target = 0;
  std::vector<NodeId> excluded;
  std::vector<double> dist;
  std::vector<double> count;
  std::vector<std::uint32_t> min_hops;

  bool reachable(NodeId n) const;
  // True when the link n->w lies on a shortest path from n to the target.
  bool OnDag(const Graph& graph, NodeId n, const Neighbor& w) const;
};

ShortestPathDag ComputeDagTo(const Graph& graph, NodeId target,
                             std::span<const NodeId> excluded = {});

// Tolerant equality for accumulated path lengths.
bool SameLength(double a, double b);

// The "spindle" of candidate routes between an ordered node pair: every
// shortest path, plus the shortest paths that appear once up to
// `avoid_count` interior nodes of the original shortest paths are deleted.
//
// The pool is held implicitly as a union of shortest-path DAGs, one per
// deleted subset that actually lengthens the route (a subset that leaves some
// original shortest path intact adds nothing new). Sampling walks one DAG
// and rejects by multiplicity, so every member of the union is drawn with
// probability proportional to exp(-length_bias * hops).
class PathPool {
 public:
  struct Component {
    std::vector<NodeId> excluded;
    std::shared_ptr<const ShortestPathDag> dag;
    double length = 0;        // route length shared by all paths here
    double count = 0;         // number of paths in this DAG
    std::uint32_t min_hops = 0;
  };

  PathPool() = default;
  PathPool(const Graph* graph, NodeId source, NodeId target, int avoid_count,
           std::vector<Component> components);

  NodeId source() const { return source_; }
  NodeId target() const { return target_; }
  int avoid_count() const { return avoid_count_; }
  const std::vector<Component>& components() const { return components_; }

  // Membership under the pool definition.
  bool Contains(const Path& path) const;

  // All distinct member paths, sorted. Throws kRange above `limit`.
  std::vector<Path> Enumerate(std::size_t limit = 1'000'000) const;

  // Sum of per-DAG path counts; equals the pool size when DAGs are disjoint.
  double CountUpperBound() const;

  Path Sample(Rng& rng, double length_bias = 0.0) const;

 private:
  Path WalkComponent(const Component& c, Rng& rng) const;
  std::size_t Multiplicity(const Path& path, double length) const;

  const Graph* graph_ = nullptr;
  NodeId source_ = 0;
  NodeId target_ = 0;
  int avoid_count_ = 0;
  std::vector<Component> components_;
  std::vector<double> cumulative_counts_;
};

inline constexpr int kMaxAvoidCount = 2;

// Every minimum-length route u -> v (one trivial path when u == v).
std::vector<Path> EnumerateShortestPaths(const Graph& graph, NodeId u, NodeId v);

// Standalone construction for one pair. The graph must outlive the pool.
PathPool BuildSpindlePool(const Graph& graph, NodeId u, NodeId v,
                          int avoid_count);

// Draws from `pool` (convenience wrapper over PathPool::Sample).
Path SamplePath(const PathPool& pool, Rng& rng, double length_bias = 0.0);

// Pools for every ordered pair, built eagerly so that concurrent readers
// never race with construction.
class RoutingTable {
 public:
  RoutingTable(std::shared_ptr<const Graph> graph, int avoid_count);

  const Graph& graph() const { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }
  int avoid_count() const { return avoid_count_; }

  const PathPool& pool(NodeId u, NodeId v) const {
    return pools_[static_cast<std::size_t>(u) * graph_->node_count() + v];
  }
  double distance(NodeId u, NodeId v) const { return to_[v]->dist[u]; }

  struct Stats {
    std::size_t pairs = 0;
    std::size_t components = 0;
    std::size_t max_components = 0;
    double mean_count_upper_bound = 0;
  };
  Stats stats() const;

 private:
  std::shared_ptr<const Graph> graph_;
  int avoid_count_;
  std::vector<std::shared_ptr<const ShortestPathDag>> to_;
  std::vector<PathPool> pools_;
};

}  // namespace ccsim
