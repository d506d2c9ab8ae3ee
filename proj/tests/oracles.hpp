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

// Brute-force reference implementations used to check the library. They
// share no code with it beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "ccsim/topology.hpp"
#include "ccsim/workload.hpp"

namespace oracle {

using ccsim::Graph;
using ccsim::NodeId;
using NodeList = std::vector<NodeId>;

inline bool Adjacent(const Graph& g, NodeId a, NodeId b) {
  for (const auto& e : g.edges()) {
    if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) return true;
  }
  return false;
}

inline double LinkLatency(const Graph& g, NodeId a, NodeId b) {
  for (const auto& e : g.edges()) {
    if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) return e.attr.base_latency;
  }
  return std::numeric_limits<double>::infinity();
}

inline std::size_t LinkIndex(const Graph& g, NodeId a, NodeId b) {
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto& e = g.edge(static_cast<ccsim::EdgeId>(i));
    if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) return i;
  }
  return g.edge_count();
}

inline double Length(const Graph& g, const NodeList& p) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) s += LinkLatency(g, p[i], p[i + 1]);
  return s;
}

// Every simple path from u to v, by depth-first search over an adjacency
// matrix, skipping `banned` nodes.
inline std::vector<NodeList> AllSimplePaths(const Graph& g, NodeId u, NodeId v,
                                            const std::set<NodeId>& banned = {}) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (const auto& e : g.edges()) adj[e.u][e.v] = adj[e.v][e.u] = 1;
  std::vector<NodeList> out;
  if (banned.count(u) || banned.count(v)) return out;
  NodeList stack{u};
  std::vector<char> on(n, 0);
  on[u] = 1;
  std::function<void(NodeId)> dfs = [&](NodeId x) {
    if (x == v) {
      out.push_back(stack);
      return;
    }
    for (NodeId y = 0; y < n; ++y) {
      if (!adj[x][y] || on[y] || banned.count(y)) continue;
      on[y] = 1;
      stack.push_back(y);
      dfs(y);
      stack.pop_back();
      on[y] = 0;
    }
  };
  dfs(u);
  return out;
}

inline bool Close(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline std::set<NodeList> Shortest(const Graph& g, const std::vector<NodeList>& paths) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : paths) best = std::min(best, Length(g, p));
  std::set<NodeList> out;
  for (const auto& p : paths) {
    if (Close(Length(g, p), best)) out.insert(p);
  }
  return out;
}

// Candidate-route pool by its literal definition: all shortest paths, plus
// the shortest paths of every graph obtained by deleting a subset of at most
// k interior nodes of the original shortest paths.
inline std::set<NodeList> SpindleByDefinition(const Graph& g, NodeId u, NodeId v, int k) {
  if (u == v) return {NodeList{u}};
  const std::set<NodeList> sp = Shortest(g, AllSimplePaths(g, u, v));
  std::set<NodeList> pool = sp;
  std::set<NodeId> interior;
  for (const auto& p : sp) interior.insert(p.begin() + 1, p.end() - 1);
  const NodeList cand(interior.begin(), interior.end());
  std::function<void(std::size_t, std::set<NodeId>&)> rec = [&](std::size_t from,
                                                                 std::set<NodeId>& del) {
    if (!del.empty()) {
      const auto paths = AllSimplePaths(g, u, v, del);
      if (!paths.empty()) {
        for (const auto& p : Shortest(g, paths)) pool.insert(p);
      }
    }
    if (static_cast<int>(del.size()) == k) return;
    for (std::size_t i = from; i < cand.size(); ++i) {
      del.insert(cand[i]);
      rec(i + 1, del);
      del.erase(cand[i]);
    }
  };
  std::set<NodeId> del;
  rec(0, del);
  return pool;
}

// A task's allocation as three node lists.
struct Allocation {
  NodeId s1 = 0, s2 = 0;
  NodeList r0, r1, r2;
};

struct Recount {
  std::vector<double> link_demand;
  std::vector<double> node_demand;
  std::vector<double> net;
  std::vector<double> cpu;
  double energy = 0;
};

// Latencies from first principles: demands summed over every traversal and
// stage, clamped ratios, per-task sums.
inline Recount RecountLatencies(const Graph& g, const std::vector<ccsim::TaskSpec>& specs,
                                const std::vector<Allocation>& alloc) {
  Recount r;
  r.link_demand.assign(g.edge_count(), 0.0);
  r.node_demand.assign(g.node_count(), 0.0);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    for (const NodeList* p : {&alloc[k].r0, &alloc[k].r1, &alloc[k].r2}) {
      for (std::size_t i = 0; i + 1 < p->size(); ++i) {
        r.link_demand[LinkIndex(g, (*p)[i], (*p)[i + 1])] += specs[k].flow;
      }
    }
    r.node_demand[alloc[k].s1] += specs[k].workload[0];
    r.node_demand[alloc[k].s2] += specs[k].workload[1];
  }
  auto slow = [](double demand, double cap) { return std::max(1.0, demand / cap); };
  for (std::size_t k = 0; k < specs.size(); ++k) {
    double net = 0;
    for (const NodeList* p : {&alloc[k].r0, &alloc[k].r1, &alloc[k].r2}) {
      for (std::size_t i = 0; i + 1 < p->size(); ++i) {
        const std::size_t e = LinkIndex(g, (*p)[i], (*p)[i + 1]);
        const auto& a = g.edge(static_cast<ccsim::EdgeId>(e)).attr;
        net += a.base_latency * slow(r.link_demand[e], a.bandwidth);
      }
    }
    double cpu = 0;
    const NodeId st[2] = {alloc[k].s1, alloc[k].s2};
    for (int s = 0; s < 2; ++s) {
      const double q = g.node(st[s]).cpu_capacity;
      cpu += slow(r.node_demand[st[s]], q) * specs[k].workload[s] / q;
    }
    r.net.push_back(net);
    r.cpu.push_back(cpu);
    r.energy += net + cpu;
  }
  return r;
}

inline Allocation FromPlacement(const ccsim::TaskPlacement& p) {
  return {p.stage[0], p.stage[1], p.route[0].nodes, p.route[1].nodes, p.route[2].nodes};
}

inline std::vector<Allocation> FromConfiguration(const ccsim::Configuration& c) {
  std::vector<Allocation> out;
  for (const auto& p : c.placements()) out.push_back(FromPlacement(p));
  return out;
}

// Every allocation of one task: stage nodes times pool routes.
inline std::vector<Allocation> TaskOptions(const Graph& g, const ccsim::TaskSpec& spec, int k) {
  std::vector<Allocation> out;
  for (NodeId a = 0; a < g.node_count(); ++a) {
    for (NodeId b = 0; b < g.node_count(); ++b) {
      const auto p0 = SpindleByDefinition(g, spec.origin, a, k);
      const auto p1 = SpindleByDefinition(g, a, b, k);
      const auto p2 = SpindleByDefinition(g, b, spec.destination, k);
      for (const auto& x : p0) {
        for (const auto& y : p1) {
          for (const auto& z : p2) out.push_back({a, b, x, y, z});
        }
      }
    }
  }
  return out;
}

inline double SearchSpaceSize(const Graph& g, const std::vector<ccsim::TaskSpec>& specs, int k) {
  double states = 1;
  for (const auto& s : specs) states *= static_cast<double>(TaskOptions(g, s, k).size());
  return states;
}

// Minimum energy over the full joint search space.
inline double ExhaustiveGroundState(const Graph& g, const std::vector<ccsim::TaskSpec>& specs,
                                    int k) {
  std::vector<std::vector<Allocation>> options;
  for (const auto& s : specs) options.push_back(TaskOptions(g, s, k));
  std::vector<Allocation> current(specs.size());
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == specs.size()) {
      best = std::min(best, RecountLatencies(g, specs, current).energy);
      return;
    }
    for (const auto& a : options[i]) {
      current[i] = a;
      rec(i + 1);
    }
  };
  rec(0);
  return specs.empty() ? 0.0 : best;
}

// Connected graph on n nodes: random spanning tree plus extra links, with
// attributes drawn from small discrete sets.
inline Graph RandomConnectedGraph(std::uint32_t n, double extra_prob, std::mt19937_64& rng,
                                  bool random_attrs = true) {
  std::uniform_real_distribution<double> u(0, 1);
  auto pick = [&](std::initializer_list<double> xs) {
    return *(xs.begin() + static_cast<std::size_t>(u(rng) * static_cast<double>(xs.size())));
  };
  std::vector<ccsim::NodeAttr> nodes(n);
  for (auto& a : nodes) a.cpu_capacity = random_attrs ? pick({0.5, 1.0, 2.0}) : 1.0;
  std::vector<ccsim::Edge> edges;
  std::set<std::pair<NodeId, NodeId>> have;
  auto add = [&](NodeId a, NodeId b) {
    if (a == b || have.count({std::min(a, b), std::max(a, b)})) return;
    have.insert({std::min(a, b), std::max(a, b)});
    ccsim::LinkAttr la;
    if (random_attrs) {
      la.base_latency = pick({1.0, 1.0, 2.0});
      la.bandwidth = pick({0.5, 1.0, 2.0});
    }
    edges.push_back({a, b, la});
  };
  for (NodeId i = 1; i < n; ++i) {
    add(i, static_cast<NodeId>(u(rng) * i));
  }
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      if (u(rng) < extra_prob) add(a, b);
    }
  }
  return Graph(std::move(nodes), std::move(edges));
}

// Wilson-Hilferty approximation of the chi-square quantile for `dof`
// degrees of freedom at standard normal quantile z.
inline double ChiSquareQuantile(double dof, double z) {
  const double c = 2.0 / (9.0 * dof);
  return dof * std::pow(1.0 - c + z * std::sqrt(c), 3.0);
}

}  // namespace oracle
