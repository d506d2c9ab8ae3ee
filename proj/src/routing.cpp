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

#include "ccsim/routing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <utility>

#include "ccsim/error.hpp"

namespace ccsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using DagPtr = std::shared_ptr<const ShortestPathDag>;
using DagLookup = std::function<DagPtr(NodeId target)>;

// (excluded set, target) -> DAG, shared across pairs with a common target.
using ExcludedCache = std::map<std::pair<std::vector<NodeId>, NodeId>, DagPtr>;

bool Contains(std::span<const NodeId> set, NodeId n) {
  return std::find(set.begin(), set.end(), n) != set.end();
}

std::vector<PathPool::Component> BuildComponents(const Graph& graph, NodeId u,
                                                 NodeId v, int avoid_count,
                                                 const DagLookup& to,
                                                 ExcludedCache& cache) {
  if (avoid_count < 0 || avoid_count > kMaxAvoidCount) {
    Throw(ErrorKind::kParameter, "avoid_count must be in [0, 2]");
  }
  std::vector<PathPool::Component> out;
  const DagPtr to_v = to(v);
  if (!to_v->reachable(u)) return out;
  out.push_back({{}, to_v, to_v->dist[u], to_v->count[u], to_v->min_hops[u]});
  if (u == v || avoid_count == 0) return out;

  const DagPtr to_u = to(u);
  const double d0 = to_v->dist[u];
  const double total = to_v->count[u];
  std::vector<NodeId> interior;
  std::vector<double> through;
  for (NodeId x = 0; x < graph.node_count(); ++x) {
    if (x == u || x == v || !to_v->reachable(x)) continue;
    if (SameLength(to_u->dist[x] + to_v->dist[x], d0)) {
      interior.push_back(x);
      through.push_back(to_u->count[x] * to_v->count[x]);
    }
  }

  const double tol = total * 1e-12;
  std::vector<std::vector<NodeId>> cuts;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (through[i] >= total - tol) cuts.push_back({interior[i]});
  }
  if (avoid_count >= 2) {
    for (std::size_t i = 0; i < interior.size(); ++i) {
      const NodeId x = interior[i];
      const DagPtr to_x = to(x);
      for (std::size_t j = i + 1; j < interior.size(); ++j) {
        const NodeId y = interior[j];
        // Paths through both x and y, in whichever order lies on a geodesic.
        double both = 0;
        if (SameLength(to_u->dist[x] + to_x->dist[y] + to_v->dist[y], d0)) {
          both = to_u->count[x] * to_x->count[y] * to_v->count[y];
        } else if (SameLength(to_u->dist[y] + to_x->dist[y] + to_v->dist[x], d0)) {
          both = to_u->count[y] * to_x->count[y] * to_v->count[x];
        }
        const double avoiding = total - through[i] - through[j] + both;
        if (avoiding <= tol) cuts.push_back({x, y});
      }
    }
  }

  for (std::vector<NodeId>& cut : cuts) {
    std::sort(cut.begin(), cut.end());
    auto key = std::make_pair(cut, v);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache
               .emplace(std::move(key),
                        std::make_shared<const ShortestPathDag>(
                            ComputeDagTo(graph, v, cut)))
               .first;
    }
    const DagPtr& dag = it->second;
    if (!dag->reachable(u)) continue;  // the deletion disconnects the pair
    out.push_back({cut, dag, dag->dist[u], dag->count[u], dag->min_hops[u]});
  }
  return out;
}

}  // namespace

bool SameLength(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

double PathLength(const Graph& graph, const Path& path) {
  double len = 0;
  for (EdgeId e : path.edges) len += graph.edge(e).attr.base_latency;
  return len;
}

bool IsSimplePath(const Graph& graph, const Path& path, NodeId u, NodeId v) {
  if (path.nodes.empty() || path.nodes.front() != u || path.nodes.back() != v) {
    return false;
  }
  if (path.edges.size() + 1 != path.nodes.size()) return false;
  for (std::size_t i = 0; i < path.edges.size(); ++i) {
    if (path.edges[i] >= graph.edge_count()) return false;
    const Edge& e = graph.edge(path.edges[i]);
    const NodeId a = path.nodes[i], b = path.nodes[i + 1];
    if (!((e.u == a && e.v == b) || (e.u == b && e.v == a))) return false;
  }
  std::vector<NodeId> sorted = path.nodes;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

Path PathFromNodes(const Graph& graph, std::vector<NodeId> nodes) {
  if (nodes.empty()) Throw(ErrorKind::kParameter, "path needs at least one node");
  Path p;
  p.edges.reserve(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const std::int64_t e = graph.FindEdge(nodes[i], nodes[i + 1]);
    if (e < 0) {
      Throw(ErrorKind::kParameter, "nodes " + std::to_string(nodes[i]) + " and " +
                                       std::to_string(nodes[i + 1]) +
                                       " are not adjacent");
    }
    p.edges.push_back(static_cast<EdgeId>(e));
  }
  p.nodes = std::move(nodes);
  return p;
}

bool ShortestPathDag::reachable(NodeId n) const { return dist[n] < kInf; }

bool ShortestPathDag::OnDag(const Graph& graph, NodeId n,
                            const Neighbor& w) const {
  if (!reachable(w.node) || !reachable(n)) return false;
  return SameLength(dist[n], graph.edge(w.edge).attr.base_latency + dist[w.node]);
}

ShortestPathDag ComputeDagTo(const Graph& graph, NodeId target,
                             std::span<const NodeId> excluded) {
  const std::size_t n = graph.node_count();
  ShortestPathDag dag;
  dag.target = target;
  dag.excluded.assign(excluded.begin(), excluded.end());
  dag.dist.assign(n, kInf);
  dag.count.assign(n, 0.0);
  dag.min_hops.assign(n, std::numeric_limits<std::uint32_t>::max());
  if (target >= n) Throw(ErrorKind::kParameter, "target out of range");
  if (Contains(excluded, target)) return dag;

  std::vector<char> blocked(n, 0);
  for (NodeId x : excluded) blocked[x] = 1;

  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<NodeId> order;
  order.reserve(n);
  std::vector<char> done(n, 0);
  dag.dist[target] = 0;
  heap.push({0.0, target});
  while (!heap.empty()) {
    const auto [d, cur] = heap.top();
    heap.pop();
    if (done[cur]) continue;
    done[cur] = 1;
    order.push_back(cur);
    for (const Neighbor& nb : graph.neighbors(cur)) {
      if (blocked[nb.node] || done[nb.node]) continue;
      const double nd = d + graph.edge(nb.edge).attr.base_latency;
      if (nd < dag.dist[nb.node]) {
        dag.dist[nb.node] = nd;
        heap.push({nd, nb.node});
      }
    }
  }

  // Settled order is nondecreasing in distance, so every DAG successor of a
  // node is finished before the node itself.
  dag.count[target] = 1;
  dag.min_hops[target] = 0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const NodeId cur = order[i];
    double count = 0;
    std::uint32_t hops = std::numeric_limits<std::uint32_t>::max();
    for (const Neighbor& nb : graph.neighbors(cur)) {
      if (dag.OnDag(graph, cur, nb)) {
        count += dag.count[nb.node];
        hops = std::min(hops, dag.min_hops[nb.node] + 1);
      }
    }
    dag.count[cur] = count;
    dag.min_hops[cur] = hops;
  }
  return dag;
}

PathPool::PathPool(const Graph* graph, NodeId source, NodeId target,
                   int avoid_count, std::vector<Component> components)
    : graph_(graph),
      source_(source),
      target_(target),
      avoid_count_(avoid_count),
      components_(std::move(components)) {
  double acc = 0;
  for (const Component& c : components_) {
    acc += c.count;
    cumulative_counts_.push_back(acc);
  }
}

bool PathPool::Contains(const Path& path) const {
  if (!IsSimplePath(*graph_, path, source_, target_)) return false;
  return Multiplicity(path, PathLength(*graph_, path)) > 0;
}

std::size_t PathPool::Multiplicity(const Path& path, double length) const {
  std::size_t mult = 0;
  for (const Component& c : components_) {
    if (!SameLength(c.length, length)) continue;
    bool avoids = true;
    for (NodeId x : c.excluded) {
      if (std::find(path.nodes.begin(), path.nodes.end(), x) != path.nodes.end()) {
        avoids = false;
        break;
      }
    }
    if (avoids) ++mult;
  }
  return mult;
}

double PathPool::CountUpperBound() const {
  return cumulative_counts_.empty() ? 0.0 : cumulative_counts_.back();
}

std::vector<Path> PathPool::Enumerate(std::size_t limit) const {
  std::set<std::vector<NodeId>> found;
  std::vector<NodeId> stack;
  for (const Component& c : components_) {
    const ShortestPathDag& dag = *c.dag;
    std::function<void(NodeId)> dfs = [&](NodeId cur) {
      stack.push_back(cur);
      if (cur == target_) {
        found.insert(stack);
        if (found.size() > limit) {
          Throw(ErrorKind::kRange, "path pool larger than enumeration limit");
        }
      } else {
        for (const Neighbor& nb : graph_->neighbors(cur)) {
          if (dag.OnDag(*graph_, cur, nb)) dfs(nb.node);
        }
      }
      stack.pop_back();
    };
    dfs(source_);
  }
  std::vector<Path> out;
  out.reserve(found.size());
  for (const auto& nodes : found) out.push_back(PathFromNodes(*graph_, nodes));
  return out;
}

Path PathPool::WalkComponent(const Component& c, Rng& rng) const {
  const ShortestPathDag& dag = *c.dag;
  Path p;
  p.nodes.reserve(c.min_hops + 4);
  p.edges.reserve(c.min_hops + 4);
  NodeId cur = source_;
  p.nodes.push_back(cur);
  while (cur != target_) {
    const double r = rng.Uniform() * dag.count[cur];
    double acc = 0;
    const Neighbor* pick = nullptr;
    for (const Neighbor& nb : graph_->neighbors(cur)) {
      if (!dag.OnDag(*graph_, cur, nb)) continue;
      pick = &nb;
      acc += dag.count[nb.node];
      if (r < acc) break;
    }
    if (pick == nullptr) Throw(ErrorKind::kInternal, "broken shortest-path DAG");
    p.edges.push_back(pick->edge);
    p.nodes.push_back(pick->node);
    cur = pick->node;
  }
  return p;
}

Path PathPool::Sample(Rng& rng, double length_bias) const {
  if (components_.empty()) {
    Throw(ErrorKind::kInternal, "empty path pool (disconnected endpoints)");
  }
  if (components_.size() == 1) {
    // Within one DAG only the hop count can vary (non-uniform latencies).
    while (true) {
      Path p = WalkComponent(components_[0], rng);
      if (length_bias == 0.0 ||
          rng.Uniform() <
              std::exp(-length_bias *
                       (double(p.hops()) - components_[0].min_hops))) {
        return p;
      }
    }
  }

  std::vector<double> weights;
  const std::vector<double>* cumulative = &cumulative_counts_;
  if (length_bias != 0.0) {
    double acc = 0;
    for (const Component& c : components_) {
      acc += c.count * std::exp(-length_bias * c.min_hops);
      weights.push_back(acc);
    }
    cumulative = &weights;
  }
  while (true) {
    const double r = rng.Uniform() * cumulative->back();
    const std::size_t idx = std::min<std::size_t>(
        std::upper_bound(cumulative->begin(), cumulative->end(), r) -
            cumulative->begin(),
        components_.size() - 1);
    const Component& c = components_[idx];
    Path p = WalkComponent(c, rng);
    const std::size_t mult = Multiplicity(p, c.length);
    double accept = 1.0 / static_cast<double>(mult);
    if (length_bias != 0.0) {
      accept *= std::exp(-length_bias * (double(p.hops()) - c.min_hops));
    }
    if (accept >= 1.0 || rng.Uniform() < accept) return p;
  }
}

Path SamplePath(const PathPool& pool, Rng& rng, double length_bias) {
  return pool.Sample(rng, length_bias);
}

std::vector<Path> EnumerateShortestPaths(const Graph& graph, NodeId u, NodeId v) {
  return BuildSpindlePool(graph, u, v, 0).Enumerate();
}

PathPool BuildSpindlePool(const Graph& graph, NodeId u, NodeId v,
                          int avoid_count) {
  if (u >= graph.node_count() || v >= graph.node_count()) {
    Throw(ErrorKind::kParameter, "pool endpoint out of range");
  }
  std::map<NodeId, DagPtr> plain;
  DagLookup to = [&](NodeId t) {
    auto it = plain.find(t);
    if (it == plain.end()) {
      it = plain
               .emplace(t, std::make_shared<const ShortestPathDag>(
                               ComputeDagTo(graph, t)))
               .first;
    }
    return it->second;
  };
  ExcludedCache cache;
  return PathPool(&graph, u, v, avoid_count,
                  BuildComponents(graph, u, v, avoid_count, to, cache));
}

RoutingTable::RoutingTable(std::shared_ptr<const Graph> graph, int avoid_count)
    : graph_(std::move(graph)), avoid_count_(avoid_count) {
  const std::size_t n = graph_->node_count();
  to_.reserve(n);
  for (NodeId t = 0; t < n; ++t) {
    to_.push_back(std::make_shared<const ShortestPathDag>(ComputeDagTo(*graph_, t)));
  }
  DagLookup to = [this](NodeId t) { return to_[t]; };
  ExcludedCache cache;
  pools_.reserve(n * n);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      pools_.emplace_back(graph_.get(), u, v, avoid_count_,
                          BuildComponents(*graph_, u, v, avoid_count_, to, cache));
    }
  }
}

RoutingTable::Stats RoutingTable::stats() const {
  Stats s;
  s.pairs = pools_.size();
  double sum = 0;
  for (const PathPool& p : pools_) {
    s.components += p.components().size();
    s.max_components = std::max(s.max_components, p.components().size());
    sum += p.CountUpperBound();
  }
  if (s.pairs) s.mean_count_upper_bound = sum / static_cast<double>(s.pairs);
  return s;
}

}  // namespace ccsim
