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
#include <span>
#include <string>
#include <vector>

namespace ccsim {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct NodeAttr {
  double cpu_capacity = 1.0;  // work-units per unit time
};

struct LinkAttr {
  double base_latency = 1.0;  // time units per traversal at nominal speed
  double bandwidth = 1.0;     // flow-units per unit time
};

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  LinkAttr attr;
};

// How a graph was produced; carried along for provenance in every artifact.
struct GeneratorInfo {
  std::string type;  // "lattice", "barabasi_albert" or "custom"
  std::map<std::string, std::uint64_t> params;
};

struct Neighbor {
  NodeId node;
  EdgeId edge;
};

// Undirected graph with per-node compute capacity and per-link latency and
// bandwidth. Immutable after construction. The constructor does not reject
// bad attributes or topology; run Validate() for that.
class Graph {
 public:
  Graph() = default;
  Graph(std::vector<NodeAttr> nodes, std::vector<Edge> edges,
        GeneratorInfo generator = {"custom", {}});

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const NodeAttr& node(NodeId n) const { return nodes_[n]; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const NodeAttr> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const Neighbor> neighbors(NodeId n) const {
    return {adjacency_.data() + offsets_[n], offsets_[n + 1] - offsets_[n]};
  }
  std::size_t degree(NodeId n) const { return offsets_[n + 1] - offsets_[n]; }

  // Edge id joining a and b, or -1 when they are not adjacent.
  std::int64_t FindEdge(NodeId a, NodeId b) const;

  const GeneratorInfo& generator() const { return generator_; }

 private:
  std::vector<NodeAttr> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  GeneratorInfo generator_;
};

// Uniform attributes applied to every node and link of a generated graph.
struct UniformAttrs {
  NodeAttr node;
  LinkAttr link;
};

// rows x cols grid without wraparound. Node (r, c) has id r * cols + c.
Graph BuildLattice(std::uint32_t rows, std::uint32_t cols,
                   const UniformAttrs& attrs = {});

// Preferential attachment: the first m nodes form a complete graph, then
// every further node attaches to m distinct existing nodes chosen with
// probability proportional to their degree (uniformly while all degrees are
// zero, which only happens for m = 1). Edge count is m(m-1)/2 + m(M-m).
Graph BuildBarabasiAlbert(std::uint32_t nodes, std::uint32_t m,
                          std::uint64_t seed, const UniformAttrs& attrs = {});

struct GraphDiagnostics {
  bool connected = false;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;
  std::map<std::size_t, std::size_t> degree_histogram;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

GraphDiagnostics Validate(const Graph& graph);

// Throws ErrorKind::kData listing every diagnostic error.
void RequireValid(const Graph& graph);

}  // namespace ccsim
