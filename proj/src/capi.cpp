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


#include "ccsim/ccsim.h"

#include <cstdlib>
#include <cstring>
#include <initializer_list>
#include <memory>
#include <new>
#include <string>
#include <utility>

#include "ccsim/annealer.hpp"
#include "ccsim/error.hpp"
#include "ccsim/experiment.hpp"
#include "ccsim/latency.hpp"
#include "ccsim/routing.hpp"
#include "ccsim/serialize.hpp"
#include "ccsim/topology.hpp"

struct ccsim_graph {
  std::shared_ptr<const ccsim::Graph> graph;
};

struct ccsim_routes {
  std::shared_ptr<const ccsim::RoutingTable> table;
};

struct ccsim_config {
  ccsim::Configuration config;
};

namespace {

using ccsim::ErrorKind;
using Json = nlohmann::json;

struct LastError {
  std::string message;
  std::string field;
  std::string json;
};

thread_local LastError last_error;

ccsim_status StatusOf(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameter: return CCSIM_ERR_PARAMETER;
    case ErrorKind::kRange: return CCSIM_ERR_RANGE;
    case ErrorKind::kData: return CCSIM_ERR_DATA;
    case ErrorKind::kConfig: return CCSIM_ERR_CONFIG;
    case ErrorKind::kIo: return CCSIM_ERR_IO;
    case ErrorKind::kInternal: return CCSIM_ERR_INTERNAL;
  }
  return CCSIM_ERR_INTERNAL;
}

ccsim_status Fail(ccsim_status status, std::string message, std::string field = {}) {
  last_error.message = std::move(message);
  last_error.field = std::move(field);
  Json j = {{"status", ccsim_status_name(status)},
            {"code", static_cast<int>(status)},
            {"message", last_error.message},
            {"field", last_error.field}};
  last_error.json = j.dump();
  return status;
}

void Clear() {
  last_error.message.clear();
  last_error.field.clear();
  last_error.json.clear();
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
ccsim_status Guard(Fn&& fn) {
  try {
    Clear();
    fn();
    return CCSIM_OK;
  } catch (const ccsim::Error& e) {
    return Fail(StatusOf(e.kind()), e.what(), e.field());
  } catch (const Json::exception& e) {
    return Fail(CCSIM_ERR_DATA, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(CCSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(CCSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(CCSIM_ERR_INTERNAL, "unknown exception");
  }
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ccsim_status NullCheck(std::initializer_list<std::pair<const void*, const char*>> args) {
  for (const auto& [p, name] : args) {
    if (p == nullptr) return Fail(CCSIM_ERR_NULL, std::string(name) + " is NULL");
  }
  return CCSIM_OK;
}

ccsim::UniformAttrs Attrs(double cpu, double base, double bw) {
  ccsim::UniformAttrs a;
  a.node.cpu_capacity = cpu;
  a.link.base_latency = base;
  a.link.bandwidth = bw;
  return a;
}

ccsim::RunOptions Options(const ccsim_run_options* o) {
  ccsim::RunOptions r;
  if (o == nullptr) return r;
  if (o->has_seed) r.seed = o->seed;
  if (o->output_dir != nullptr) r.output_dir = o->output_dir;
  r.workers = o->workers;
  r.overwrite = o->overwrite != 0;
  r.export_csv = o->export_csv != 0;
  if (o->progress != nullptr) {
    ccsim_progress_fn fn = o->progress;
    void* user = o->progress_user;
    r.progress = [fn, user](const std::string& msg) { fn(msg.c_str(), user); };
  }
  return r;
}

Json ParseText(const char* text, const char* what, ErrorKind kind = ErrorKind::kData) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ccsim::Error(kind, std::string(what) + ": " + e.what());
  }
}

}  // namespace

extern "C" {

const char* ccsim_version(void) { return "0.1.0"; }

const char* ccsim_status_name(ccsim_status status) {
  switch (status) {
    case CCSIM_OK: return "ok";
    case CCSIM_ERR_PARAMETER: return "parameter";
    case CCSIM_ERR_RANGE: return "range";
    case CCSIM_ERR_DATA: return "data";
    case CCSIM_ERR_CONFIG: return "config";
    case CCSIM_ERR_IO: return "io";
    case CCSIM_ERR_INTERNAL: return "internal";
    case CCSIM_ERR_NULL: return "null";
  }
  return "unknown";
}

const char* ccsim_last_error(void) { return last_error.message.c_str(); }
const char* ccsim_last_error_field(void) { return last_error.field.c_str(); }
const char* ccsim_last_error_json(void) { return last_error.json.c_str(); }

void ccsim_string_free(char* s) { std::free(s); }

ccsim_status ccsim_graph_lattice(uint32_t rows, uint32_t cols, double cpu_capacity,
                                 double base_latency, double bandwidth,
                                 ccsim_graph** out) {
  if (auto s = NullCheck({{out, "out"}})) return s;
  return Guard([&] {
    auto g = std::make_shared<const ccsim::Graph>(
        ccsim::BuildLattice(rows, cols, Attrs(cpu_capacity, base_latency, bandwidth)));
    *out = new ccsim_graph{std::move(g)};
  });
}

ccsim_status ccsim_graph_barabasi_albert(uint32_t nodes, uint32_t m, uint64_t seed,
                                         double cpu_capacity, double base_latency,
                                         double bandwidth, ccsim_graph** out) {
  if (auto s = NullCheck({{out, "out"}})) return s;
  return Guard([&] {
    auto g = std::make_shared<const ccsim::Graph>(ccsim::BuildBarabasiAlbert(
        nodes, m, seed, Attrs(cpu_capacity, base_latency, bandwidth)));
    *out = new ccsim_graph{std::move(g)};
  });
}

ccsim_status ccsim_graph_from_json(const char* json, ccsim_graph** out) {
  if (auto s = NullCheck({{json, "json"}, {out, "out"}})) return s;
  return Guard([&] {
    auto g = std::make_shared<const ccsim::Graph>(
        ccsim::io::GraphFromJson(ParseText(json, "graph")));
    *out = new ccsim_graph{std::move(g)};
  });
}

ccsim_status ccsim_graph_to_json(const ccsim_graph* graph, char** out) {
  if (auto s = NullCheck({{graph, "graph"}, {out, "out"}})) return s;
  return Guard([&] { *out = Dup(ccsim::io::ToJson(*graph->graph).dump()); });
}

ccsim_status ccsim_graph_node_count(const ccsim_graph* graph, size_t* out) {
  if (auto s = NullCheck({{graph, "graph"}, {out, "out"}})) return s;
  *out = graph->graph->node_count();
  return CCSIM_OK;
}

ccsim_status ccsim_graph_edge_count(const ccsim_graph* graph, size_t* out) {
  if (auto s = NullCheck({{graph, "graph"}, {out, "out"}})) return s;
  *out = graph->graph->edge_count();
  return CCSIM_OK;
}

ccsim_status ccsim_graph_validate(const ccsim_graph* graph, int* valid,
                                  char** diagnostics_json) {
  if (auto s = NullCheck({{graph, "graph"}})) return s;
  return Guard([&] {
    const ccsim::GraphDiagnostics d = ccsim::Validate(*graph->graph);
    if (valid != nullptr) *valid = d.errors.empty() ? 1 : 0;
    if (diagnostics_json != nullptr) *diagnostics_json = Dup(ccsim::io::ToJson(d).dump());
  });
}

void ccsim_graph_free(ccsim_graph* graph) { delete graph; }

ccsim_status ccsim_routes_create(const ccsim_graph* graph, int avoid_count,
                                 ccsim_routes** out) {
  if (auto s = NullCheck({{graph, "graph"}, {out, "out"}})) return s;
  return Guard([&] {
    ccsim::RequireValid(*graph->graph);
    auto t = std::make_shared<const ccsim::RoutingTable>(graph->graph, avoid_count);
    *out = new ccsim_routes{std::move(t)};
  });
}

ccsim_status ccsim_routes_distance(const ccsim_routes* routes, uint32_t u, uint32_t v,
                                   double* out) {
  if (auto s = NullCheck({{routes, "routes"}, {out, "out"}})) return s;
  return Guard([&] {
    const std::size_t n = routes->table->graph().node_count();
    if (u >= n || v >= n) throw ccsim::Error(ErrorKind::kRange, "node id out of range");
    *out = routes->table->distance(u, v);
  });
}

ccsim_status ccsim_routes_pool_json(const ccsim_routes* routes, uint32_t u, uint32_t v,
                                    size_t limit, char** out) {
  if (auto s = NullCheck({{routes, "routes"}, {out, "out"}})) return s;
  return Guard([&] {
    const std::size_t n = routes->table->graph().node_count();
    if (u >= n || v >= n) throw ccsim::Error(ErrorKind::kRange, "node id out of range");
    Json arr = Json::array();
    for (const ccsim::Path& p : routes->table->pool(u, v).Enumerate(limit)) {
      arr.push_back(p.nodes);
    }
    *out = Dup(arr.dump());
  });
}

void ccsim_routes_free(ccsim_routes* routes) { delete routes; }

ccsim_status ccsim_config_from_json(const char* json, ccsim_config** out) {
  if (auto s = NullCheck({{json, "json"}, {out, "out"}})) return s;
  return Guard([&] {
    *out = new ccsim_config{
        ccsim::io::ConfigurationFromJson(ParseText(json, "configuration"))};
  });
}

ccsim_status ccsim_config_to_json(const ccsim_config* config, char** out) {
  if (auto s = NullCheck({{config, "config"}, {out, "out"}})) return s;
  return Guard([&] { *out = Dup(ccsim::io::ToJson(config->config).dump()); });
}

ccsim_status ccsim_config_task_count(const ccsim_config* config, size_t* out) {
  if (auto s = NullCheck({{config, "config"}, {out, "out"}})) return s;
  *out = config->config.task_count();
  return CCSIM_OK;
}

ccsim_status ccsim_config_energy(const ccsim_config* config, double* total, double* net,
                                 double* cpu) {
  if (auto s = NullCheck({{config, "config"}})) return s;
  return Guard([&] {
    const ccsim::LatencyBreakdown b = ccsim::ComputeLatencies(config->config);
    if (total != nullptr) *total = b.energy();
    if (net != nullptr) *net = b.net;
    if (cpu != nullptr) *cpu = b.cpu;
  });
}

ccsim_status ccsim_config_task_latency(const ccsim_config* config, size_t task,
                                       double* net, double* cpu) {
  if (auto s = NullCheck({{config, "config"}})) return s;
  return Guard([&] {
    if (task >= config->config.task_count()) {
      throw ccsim::Error(ErrorKind::kRange, "task index out of range");
    }
    const ccsim::LoadState loads = ccsim::ComputeLoads(config->config);
    const ccsim::TaskLatency l = ccsim::ComputeTaskLatency(config->config, loads, task);
    if (net != nullptr) *net = l.net;
    if (cpu != nullptr) *cpu = l.cpu;
  });
}

void ccsim_config_free(ccsim_config* config) { delete config; }

ccsim_status ccsim_anneal(const ccsim_routes* routes, size_t tasks, double stage_workload,
                          const char* params_json, uint64_t seed, ccsim_config** best,
                          double* best_energy) {
  if (auto s = NullCheck({{routes, "routes"}, {best, "best"}})) return s;
  return Guard([&] {
    Json doc = {{"seed", 0}, {"topology", {{"type", "lattice"}}}};
    if (params_json != nullptr) {
      doc["annealer"] = ParseText(params_json, "annealer params", ErrorKind::kConfig);
    }
    const ccsim::ExperimentConfig c = ccsim::ParseConfig(doc);
    if (!(stage_workload > 0)) {
      throw ccsim::Error(ErrorKind::kParameter, "stage_workload must be positive");
    }
    ccsim::AnnealParams ap;
    ap.schedule = ccsim::Schedule::Geometric(c.total_steps, c.t_start, c.t_min,
                                             c.steps_per_temperature, c.cooling_fraction);
    ap.restarts = c.restarts;
    ap.length_bias = c.length_bias;
    ap.initial = c.initial;
    ap.trace_stride = c.trace_stride;
    ap.per_task_temperature = c.per_task_temperature;
    const auto specs = ccsim::GenerateTasks(routes->table->graph(), tasks, stage_workload,
                                            ccsim::DeriveSeed(seed, {ccsim::kStreamTasks}));
    ccsim::AnnealResult r = ccsim::Anneal(*routes->table, specs, ap,
                                          ccsim::DeriveSeed(seed, {ccsim::kStreamAnneal}));
    if (best_energy != nullptr) *best_energy = r.best_energy;
    *best = new ccsim_config{std::move(r.best)};
  });
}

void ccsim_run_options_init(ccsim_run_options* options) {
  if (options == nullptr) return;
  *options = ccsim_run_options{};
}

ccsim_status ccsim_resolve_config(const char* config_json, const ccsim_run_options* options,
                                  char** resolved_json) {
  if (auto s = NullCheck({{config_json, "config_json"}, {resolved_json, "resolved_json"}})) {
    return s;
  }
  return Guard([&] {
    const ccsim::ExperimentConfig c = ccsim::Resolve(
        ccsim::ParseConfig(ParseText(config_json, "config", ErrorKind::kConfig)),
        Options(options));
    *resolved_json = Dup(ccsim::ToJson(c).dump(2));
  });
}

ccsim_status ccsim_run_command(const char* command, const char* config_json,
                               const ccsim_run_options* options, char** report_json) {
  if (auto s = NullCheck({{command, "command"}, {config_json, "config_json"}})) return s;
  return Guard([&] {
    const ccsim::ExperimentConfig c =
        ccsim::ParseConfig(ParseText(config_json, "config", ErrorKind::kConfig));
    const Json report = ccsim::RunCommand(command, c, Options(options));
    if (report_json != nullptr) *report_json = Dup(report.dump(2));
  });
}

}  // extern "C"
