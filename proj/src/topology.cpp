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

#include "ccsim/topology.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

#include "ccsim/error.hpp"
#include "ccsim/rng.hpp"

namespace ccsim {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kRange: return "range";
    case ErrorKind::kData: return "data";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kInternal: return "internal";
  }
  return "unknown";
}

Graph::Graph(std::vector<NodeAttr> nodes, std::vector<Edge> edges,
             GeneratorInfo generator)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      generator_(std::move(generator)) {
  const std::size_t n = nodes_.size();
  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : edges_) {
    if (e.u >= n || e.v >= n) {
      Throw(ErrorKind::kData, "edge endpoint out of node range");
    }
    ++degree[e.u];
    if (e.v != e.u) ++degree[e.v];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    adjacency_[fill[e.u]++] = {e.v, id};
    if (e.v != e.u) adjacency_[fill[e.v]++] = {e.u, id};
  }
}

std::int64_t Graph::FindEdge(NodeId a, NodeId b) const {
  if (a >= nodes_.size() || b >= nodes_.size()) return -1;
  for (const Neighbor& nb : neighbors(a)) {
    if (nb.node == b) return nb.edge;
  }
  return -1;
}

Graph BuildLattice(std::uint32_t rows, std::uint32_t cols,
                   const UniformAttrs& attrs) {
  if (rows == 0 || cols == 0) {
    Throw(ErrorKind::kParameter, "lattice needs rows >= 1 and cols >= 1");
  }
  std::vector<NodeAttr> nodes(static_cast<std::size_t>(rows) * cols, attrs.node);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(rows) * (cols - 1) +
                static_cast<std::size_t>(cols) * (rows - 1));
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      const NodeId id = r * cols + c;
      if (c + 1 < cols) edges.push_back({id, id + 1, attrs.link});
      if (r + 1 < rows) edges.push_back({id, id + cols, attrs.link});
    }
  }
  return Graph(std::move(nodes), std::move(edges),
               {"lattice", {{"rows", rows}, {"cols", cols}}});
}

Graph BuildBarabasiAlbert(std::uint32_t node_count, std::uint32_t m,
                          std::uint64_t seed, const UniformAttrs& attrs) {
  if (m < 1 || m >= node_count) {
    std::ostringstream msg;
    msg << "Barabasi-Albert needs 1 <= m < M (got M=" << node_count
        << ", m=" << m << ")";
    Throw(ErrorKind::kParameter, msg.str());
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  // Each endpoint occurrence is one entry, so a uniform pick is degree-biased.
  std::vector<NodeId> endpoints;
  for (NodeId a = 0; a < m; ++a) {
    for (NodeId b = a + 1; b < m; ++b) {
      edges.push_back({a, b, attrs.link});
      endpoints.push_back(a);
      endpoints.push_back(b);
    }
  }
  std::vector<NodeId> targets;
  for (NodeId fresh = m; fresh < node_count; ++fresh) {
    targets.clear();
    while (targets.size() < m) {
      const NodeId pick =
          endpoints.empty()
              ? static_cast<NodeId>(rng.Below(fresh))
              : endpoints[rng.Below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), pick) == targets.end()) {
        targets.push_back(pick);
      }
    }
    for (NodeId t : targets) {
      edges.push_back({t, fresh, attrs.link});
      endpoints.push_back(t);
      endpoints.push_back(fresh);
    }
  }
  std::vector<NodeAttr> nodes(node_count, attrs.node);
  return Graph(std::move(nodes), std::move(edges),
               {"barabasi_albert", {{"nodes", node_count}, {"m", m}, {"seed", seed}}});
}

GraphDiagnostics Validate(const Graph& graph) {
  GraphDiagnostics d;
  const std::size_t n = graph.node_count();
  d.node_count = n;
  d.edge_count = graph.edge_count();
  if (n == 0) {
    d.errors.push_back("graph has no nodes");
    return d;
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  for (const Edge& e : graph.edges()) {
    std::ostringstream where;
    where << " on link " << e.u << "-" << e.v;
    if (e.u == e.v) d.errors.push_back("self-loop" + where.str());
    if (!seen.insert(std::minmax(e.u, e.v)).second) {
      d.errors.push_back("parallel edge" + where.str());
    }
    if (!(e.attr.bandwidth > 0)) {
      d.errors.push_back("nonpositive bandwidth" + where.str());
    }
    if (!(e.attr.base_latency > 0)) {
      d.errors.push_back("nonpositive base latency" + where.str());
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    if (!(graph.node(i).cpu_capacity > 0)) {
      d.errors.push_back("nonpositive cpu capacity on node " + std::to_string(i));
    }
  }

  d.min_degree = graph.degree(0);
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t deg = graph.degree(i);
    d.min_degree = std::min(d.min_degree, deg);
    d.max_degree = std::max(d.max_degree, deg);
    ++d.degree_histogram[deg];
  }

  std::vector<char> reached(n, 0);
  std::vector<NodeId> stack{0};
  reached[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const NodeId cur = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : graph.neighbors(cur)) {
      if (!reached[nb.node]) {
        reached[nb.node] = 1;
        ++count;
        stack.push_back(nb.node);
      }
    }
  }
  d.connected = count == n;
  if (!d.connected) d.errors.push_back("graph is not connected");
  return d;
}

void RequireValid(const Graph& graph) {
  const GraphDiagnostics d = Validate(graph);
  if (d.ok()) return;
  std::string msg = "invalid graph:";
  for (const std::string& e : d.errors) msg += " " + e + ";";
  Throw(ErrorKind::kData, msg);
}

}  // namespace ccsim
