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

#include "ccsim/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ccsim/error.hpp"

namespace ccsim::io {
namespace {

// Shortest round-trip representation.
std::string Num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0;
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

void CheckFormat(const Json& doc, const char* format) {
  if (!doc.is_object()) Throw(ErrorKind::kData, std::string(format) + ": not an object");
  if (doc.contains("format") && doc["format"] != format) {
    Throw(ErrorKind::kData, "expected a " + std::string(format) + " document, got " +
                                doc["format"].dump());
  }
}

Json Grid(const std::vector<std::vector<double>>& g) {
  Json out = Json::array();
  for (const auto& row : g) {
    Json r = Json::array();
    for (double v : row) r.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<double>> GridFrom(const Json& j) {
  std::vector<std::vector<double>> g;
  for (const auto& row : j) {
    std::vector<double> r;
    for (const auto& v : row) r.push_back(v.is_null() ? std::nan("") : v.get<double>());
    g.push_back(std::move(r));
  }
  return g;
}

}  // namespace

const Json& Require(const Json& doc, const std::string& key,
                    const std::string& context) {
  if (!doc.is_object() || !doc.contains(key)) {
    Throw(ErrorKind::kData, context + ": missing field '" + key + "'",
          context.empty() ? key : context + "." + key);
  }
  return doc[key];
}

Json ToJson(const Graph& graph) {
  Json nodes = Json::array();
  for (NodeId i = 0; i < graph.node_count(); ++i) {
    nodes.push_back({{"id", i}, {"cpu_capacity", graph.node(i).cpu_capacity}});
  }
  Json edges = Json::array();
  for (const Edge& e : graph.edges()) {
    edges.push_back({{"u", e.u},
                     {"v", e.v},
                     {"base_latency", e.attr.base_latency},
                     {"bandwidth", e.attr.bandwidth}});
  }
  Json params = Json::object();
  for (const auto& [k, v] : graph.generator().params) params[k] = v;
  return {{"format", "ccsim.graph"},
          {"version", kFormatVersion},
          {"generator", {{"type", graph.generator().type}, {"params", params}}},
          {"nodes", nodes},
          {"edges", edges}};
}

Graph GraphFromJson(const Json& doc) {
  CheckFormat(doc, "ccsim.graph");
  try {
    const Json& jn = Require(doc, "nodes", "graph");
    std::vector<NodeAttr> nodes(jn.size());
    for (const Json& n : jn) {
      const auto id = n.at("id").get<std::size_t>();
      if (id >= nodes.size()) Throw(ErrorKind::kData, "graph: node id out of range");
      nodes[id].cpu_capacity = n.at("cpu_capacity").get<double>();
    }
    std::vector<Edge> edges;
    for (const Json& e : Require(doc, "edges", "graph")) {
      edges.push_back({e.at("u").get<NodeId>(), e.at("v").get<NodeId>(),
                       {e.at("base_latency").get<double>(), e.at("bandwidth").get<double>()}});
    }
    GeneratorInfo gen{"custom", {}};
    if (doc.contains("generator")) {
      gen.type = doc["generator"].value("type", "custom");
      if (doc["generator"].contains("params")) {
        for (const auto& [k, v] : doc["generator"]["params"].items()) {
          gen.params[k] = v.get<std::uint64_t>();
        }
      }
    }
    return Graph(std::move(nodes), std::move(edges), std::move(gen));
  } catch (const Json::exception& e) {
    Throw(ErrorKind::kData, std::string("graph: ") + e.what());
  }
}

Json ToJson(const TaskSpec& spec, const TaskPlacement& p) {
  Json routes = Json::array();
  for (const Path& r : p.route) routes.push_back(r.nodes);
  return {{"id", spec.id},
          {"origin", spec.origin},
          {"destination", spec.destination},
          {"workload", {spec.workload[0], spec.workload[1]}},
          {"flow", spec.flow},
          {"stages", {p.stage[0], p.stage[1]}},
          {"routes", routes}};
}

Json ToJson(const Configuration& config) {
  Json tasks = Json::array();
  for (std::size_t k = 0; k < config.task_count(); ++k) {
    tasks.push_back(ToJson(config.spec(k), config.placement(k)));
  }
  return {{"format", "ccsim.configuration"},
          {"version", kFormatVersion},
          {"graph", ToJson(config.graph())},
          {"tasks", tasks}};
}

Configuration ConfigurationFromJson(const Json& doc) {
  CheckFormat(doc, "ccsim.configuration");
  auto graph = std::make_shared<const Graph>(GraphFromJson(Require(doc, "graph", "configuration")));
  std::vector<TaskSpec> specs;
  std::vector<TaskPlacement> placements;
  try {
    for (const Json& t : Require(doc, "tasks", "configuration")) {
      TaskSpec s;
      s.id = t.at("id").get<std::uint32_t>();
      s.origin = t.at("origin").get<NodeId>();
      s.destination = t.at("destination").get<NodeId>();
      s.workload = {t.at("workload").at(0).get<double>(), t.at("workload").at(1).get<double>()};
      s.flow = t.at("flow").get<double>();
      TaskPlacement p;
      p.stage = {t.at("stages").at(0).get<NodeId>(), t.at("stages").at(1).get<NodeId>()};
      for (int h = 0; h < 3; ++h) {
        p.route[h] = PathFromNodes(*graph, t.at("routes").at(h).get<std::vector<NodeId>>());
      }
      specs.push_back(s);
      placements.push_back(std::move(p));
    }
  } catch (const Json::exception& e) {
    Throw(ErrorKind::kData, std::string("configuration: ") + e.what());
  }
  Configuration config(graph, std::move(specs), std::move(placements));
  const auto problems = config.Check();
  if (!problems.empty()) Throw(ErrorKind::kData, "configuration: " + problems.front());
  return config;
}

Json ToJson(const LatencyHistogram& h) {
  return {{"origin", h.origin},   {"width", h.width},
          {"counts", h.counts},   {"total", h.total},
          {"load", h.load},       {"temperature", h.temperature},
          {"replica_seeds", h.replica_seeds}};
}

LatencyHistogram HistogramFromJson(const Json& doc) {
  try {
    LatencyHistogram h;
    h.origin = doc.at("origin").get<double>();
    h.width = doc.at("width").get<double>();
    h.counts = doc.at("counts").get<std::vector<double>>();
    h.total = doc.at("total").get<double>();
    h.load = doc.value("load", 0.0);
    h.temperature = doc.value("temperature", 0.0);
    if (doc.contains("replica_seeds")) {
      h.replica_seeds = doc["replica_seeds"].get<std::vector<std::uint64_t>>();
    }
    if (!(h.width > 0)) Throw(ErrorKind::kData, "histogram: nonpositive bin width");
    return h;
  } catch (const Json::exception& e) {
    Throw(ErrorKind::kData, std::string("histogram: ") + e.what());
  }
}

Json ToJson(const ImpulseResult& r) {
  return {{"format", "ccsim.impulse"},
          {"version", kFormatVersion},
          {"load", r.load},
          {"temperature", r.temperature},
          {"mean_latency", r.mean_latency},
          {"mean_net", r.mean_net},
          {"mean_cpu", r.mean_cpu},
          {"max_latency", r.max_latency},
          {"mean_energy", r.mean_energy},
          {"acceptance_rate", r.acceptance_rate},
          {"replica_mean_latency", r.replica_mean_latency},
          {"mean_latency_stderr", r.mean_latency_stderr},
          {"replica_seeds", r.replica_seeds},
          {"histogram", ToJson(r.histogram)}};
}

ImpulseResult ImpulseFromJson(const Json& doc) {
  CheckFormat(doc, "ccsim.impulse");
  try {
    ImpulseResult r;
    r.load = doc.at("load").get<std::size_t>();
    r.temperature = doc.at("temperature").get<double>();
    r.mean_latency = doc.at("mean_latency").get<double>();
    r.mean_net = doc.at("mean_net").get<double>();
    r.mean_cpu = doc.at("mean_cpu").get<double>();
    r.max_latency = doc.at("max_latency").get<double>();
    r.mean_energy = doc.at("mean_energy").get<double>();
    r.acceptance_rate = doc.at("acceptance_rate").get<double>();
    r.replica_mean_latency = doc.at("replica_mean_latency").get<std::vector<double>>();
    r.mean_latency_stderr = doc.at("mean_latency_stderr").get<double>();
    r.replica_seeds = doc.at("replica_seeds").get<std::vector<std::uint64_t>>();
    r.histogram = HistogramFromJson(doc.at("histogram"));
    return r;
  } catch (const Json::exception& e) {
    Throw(ErrorKind::kData, std::string("impulse: ") + e.what());
  }
}

Json ToJson(const ResponseSurface& s) {
  Json hs = Json::array();
  for (const auto& h : s.histograms) hs.push_back(ToJson(h));
  return {{"format", "ccsim.response_surface"},
          {"version", kFormatVersion},
          {"temperature", s.temperature},
          {"loads", s.loads},
          {"histograms", hs},
          {"notices", s.notices}};
}

ResponseSurface SurfaceFromJson(const Json& doc) {
  CheckFormat(doc, "ccsim.response_surface");
  std::vector<LatencyHistogram> hs;
  for (const Json& h : Require(doc, "histograms", "response_surface")) {
    hs.push_back(HistogramFromJson(h));
  }
  ResponseSurface s = MakeSurface(std::move(hs), doc.value("temperature", 0.0));
  if (doc.contains("notices")) {
    auto prior = doc["notices"].get<std::vector<std::string>>();
    s.notices.insert(s.notices.begin(), prior.begin(), prior.end());
  }
  return s;
}

Json ToJson(const SummarySurface& s) {
  return {{"format", "ccsim.summary_surface"},
          {"version", kFormatVersion},
          {"loads", s.loads},
          {"temperatures", s.temperatures},
          {"mean_latency", Grid(s.mean_latency)},
          {"max_latency", Grid(s.max_latency)},
          {"mean_net", Grid(s.mean_net)},
          {"mean_cpu", Grid(s.mean_cpu)},
          {"mean_energy", Grid(s.mean_energy)}};
}

SummarySurface SummaryFromJson(const Json& doc) {
  CheckFormat(doc, "ccsim.summary_surface");
  try {
    SummarySurface s;
    s.loads = doc.at("loads").get<std::vector<std::size_t>>();
    s.temperatures = doc.at("temperatures").get<std::vector<double>>();
    s.mean_latency = GridFrom(doc.at("mean_latency"));
    s.max_latency = GridFrom(doc.at("max_latency"));
    s.mean_net = GridFrom(doc.at("mean_net"));
    s.mean_cpu = GridFrom(doc.at("mean_cpu"));
    s.mean_energy = GridFrom(doc.at("mean_energy"));
    return s;
  } catch (const Json::exception& e) {
    Throw(ErrorKind::kData, std::string("summary: ") + e.what());
  }
}

Json ToJson(const EvolutionTrace& t) {
  return {{"format", "ccsim.evolution_trace"},
          {"version", kFormatVersion},
          {"lambda", t.lambda},
          {"nodes", t.nodes},
          {"horizon", t.horizon},
          {"diverged", t.diverged},
          {"below_grid_scaled", t.below_grid_scaled},
          {"active", t.active},
          {"created", t.created},
          {"completed", t.completed}};
}

EvolutionTrace TraceFromJson(const Json& doc) {
  CheckFormat(doc, "ccsim.evolution_trace");
  try {
    EvolutionTrace t;
    t.lambda = doc.at("lambda").get<double>();
    t.nodes = doc.at("nodes").get<std::size_t>();
    t.horizon = doc.at("horizon").get<std::size_t>();
    t.diverged = doc.at("diverged").get<bool>();
    t.below_grid_scaled = doc.value("below_grid_scaled", false);
    t.active = doc.at("active").get<std::vector<double>>();
    t.created = doc.at("created").get<std::vector<double>>();
    t.completed = doc.at("completed").get<std::vector<double>>();
    return t;
  } catch (const Json::exception& e) {
    Throw(ErrorKind::kData, std::string("trace: ") + e.what());
  }
}

Json ToJson(const LittlesLawTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"lambda", r.lambda},
                    {"created_rate", r.created_rate},
                    {"completed_rate", r.completed_rate},
                    {"tail_slope", r.tail_slope},
                    {"steady", r.steady},
                    {"diverged", r.diverged}});
  }
  return {{"format", "ccsim.littles_law"},
          {"version", kFormatVersion},
          {"nodes", t.nodes},
          {"horizon", t.horizon},
          {"lambda_c", t.lambda_c ? Json(*t.lambda_c) : Json(nullptr)},
          {"rows", rows}};
}

LittlesLawTable LittlesLawFromJson(const Json& doc) {
  CheckFormat(doc, "ccsim.littles_law");
  const std::string ctx = "littles_law";
  LittlesLawTable t;
  t.nodes = Require(doc, "nodes", ctx).get<std::size_t>();
  t.horizon = Require(doc, "horizon", ctx).get<std::size_t>();
  const Json& lc = Require(doc, "lambda_c", ctx);
  if (!lc.is_null()) t.lambda_c = lc.get<double>();
  for (const auto& r : Require(doc, "rows", ctx)) {
    LittlesLawRow row;
    row.lambda = Require(r, "lambda", ctx + ".rows").get<double>();
    row.created_rate = Require(r, "created_rate", ctx + ".rows").get<double>();
    row.completed_rate = Require(r, "completed_rate", ctx + ".rows").get<double>();
    row.tail_slope = Require(r, "tail_slope", ctx + ".rows").get<double>();
    row.steady = Require(r, "steady", ctx + ".rows").get<bool>();
    row.diverged = Require(r, "diverged", ctx + ".rows").get<bool>();
    t.rows.push_back(row);
  }
  return t;
}

Json ToJson(const std::vector<TracePoint>& trace) {
  Json out = Json::array();
  for (const auto& p : trace) {
    out.push_back({{"step", p.step},
                   {"temperature", p.temperature},
                   {"energy", p.energy},
                   {"best_energy", p.best_energy},
                   {"acceptance_rate", p.acceptance_rate}});
  }
  return out;
}

std::vector<TracePoint> TracePointsFromJson(const Json& doc) {
  if (!doc.is_array()) Throw(ErrorKind::kData, "trace: expected an array", "trace");
  std::vector<TracePoint> out;
  for (const auto& p : doc) {
    TracePoint t;
    t.step = Require(p, "step", "trace").get<std::uint64_t>();
    t.temperature = Require(p, "temperature", "trace").get<double>();
    t.energy = Require(p, "energy", "trace").get<double>();
    t.best_energy = Require(p, "best_energy", "trace").get<double>();
    t.acceptance_rate = Require(p, "acceptance_rate", "trace").get<double>();
    out.push_back(t);
  }
  return out;
}

Json ToJson(const GraphDiagnostics& d) {
  Json hist = Json::object();
  for (const auto& [deg, n] : d.degree_histogram) hist[std::to_string(deg)] = n;
  return {{"connected", d.connected},   {"node_count", d.node_count},
          {"edge_count", d.edge_count}, {"min_degree", d.min_degree},
          {"max_degree", d.max_degree}, {"degree_histogram", hist},
          {"errors", d.errors}};
}

std::string TraceCsv(const std::vector<TracePoint>& trace) {
  std::ostringstream os;
  os << "step,temperature,energy,best_energy,acceptance_rate\n";
  for (const auto& p : trace) {
    os << p.step << ',' << Num(p.temperature) << ',' << Num(p.energy) << ','
       << Num(p.best_energy) << ',' << Num(p.acceptance_rate) << '\n';
  }
  return os.str();
}

std::string LatencyCsv(const Configuration& config) {
  const LatencyBreakdown b = ComputeLatencies(config);
  std::ostringstream os;
  os << "task,l_net,l_cpu,l_total\n";
  for (std::size_t k = 0; k < b.tasks.size(); ++k) {
    os << config.spec(k).id << ',' << Num(b.tasks[k].net) << ','
       << Num(b.tasks[k].cpu) << ',' << Num(b.tasks[k].total()) << '\n';
  }
  return os.str();
}

std::string SummaryCsv(const SummarySurface& s) {
  std::ostringstream os;
  os << "load,temperature,mean_latency,max_latency,mean_net,mean_cpu,mean_energy\n";
  for (std::size_t t = 0; t < s.temperatures.size(); ++t) {
    for (std::size_t l = 0; l < s.loads.size(); ++l) {
      os << s.loads[l] << ',' << Num(s.temperatures[t]) << ','
         << Num(s.mean_latency[t][l]) << ',' << Num(s.max_latency[t][l]) << ','
         << Num(s.mean_net[t][l]) << ',' << Num(s.mean_cpu[t][l]) << ','
         << Num(s.mean_energy[t][l]) << '\n';
    }
  }
  return os.str();
}

std::string SurfaceCsv(const ResponseSurface& s) {
  std::ostringstream os;
  os << "load,latency,count\n";
  for (std::size_t i = 0; i < s.histograms.size(); ++i) {
    const auto& h = s.histograms[i];
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      os << Num(s.loads[i]) << ',' << Num(h.center(b)) << ',' << Num(h.counts[b]) << '\n';
    }
  }
  return os.str();
}

std::string EvolutionCsv(const std::vector<EvolutionTrace>& traces) {
  std::ostringstream os;
  os << "lambda,step,active,created,completed\n";
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.active.size(); ++i) {
      os << Num(t.lambda) << ',' << i << ',' << Num(t.active[i]) << ',';
      if (i < t.created.size()) os << Num(t.created[i]) << ',' << Num(t.completed[i]);
      else os << ',';
      os << '\n';
    }
  }
  return os.str();
}

std::string LittlesLawCsv(const LittlesLawTable& t) {
  std::ostringstream os;
  os << "lambda,balance_rate,created_rate,completed_rate,tail_slope,steady,diverged\n";
  for (const auto& r : t.rows) {
    os << Num(r.lambda) << ',' << Num(r.lambda * static_cast<double>(t.nodes)) << ','
       << Num(r.created_rate) << ',' << Num(r.completed_rate) << ','
       << Num(r.tail_slope) << ',' << (r.steady ? 1 : 0) << ','
       << (r.diverged ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace ccsim::io
