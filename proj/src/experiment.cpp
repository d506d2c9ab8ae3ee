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


#include "ccsim/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "ccsim/error.hpp"
#include "ccsim/rng.hpp"
#include "ccsim/serialize.hpp"

namespace ccsim {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

constexpr char kSeedRule[] =
    "replica r: DeriveSeed(seed, {r}); tasks: DeriveSeed(replica, {2}); "
    "anneal: DeriveSeed(replica, {4, load}); sampling: DeriveSeed(replica, {5, "
    "load}); Barabasi-Albert realization: DeriveSeed(seed, {1, r}); "
    "evolution at lambda index i: DeriveSeed(seed, {6, i})";

// Reads one object of the config, tracking which keys were consumed so that
// unknown keys can be reported.
class Section {
 public:
  Section(const Json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) Fail("", "expected an object");
  }

  bool Has(const std::string& key) const { return doc_.contains(key); }
  void Touch(const std::string& key) { seen_.insert(key); }

  double Number(const std::string& key, double def, double lo, double hi) {
    if (!Take(key)) return def;
    const Json& v = doc_[key];
    if (!v.is_number()) Fail(key, "expected a number");
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) Fail(key, "value " + v.dump() + " out of range");
    return x;
  }

  std::uint64_t Unsigned(const std::string& key, std::uint64_t def,
                         std::uint64_t lo = 0,
                         std::uint64_t hi = std::numeric_limits<std::uint64_t>::max()) {
    if (!Take(key)) return def;
    return AsUnsigned(doc_[key], key, lo, hi);
  }

  bool Bool(const std::string& key, bool def) {
    if (!Take(key)) return def;
    if (!doc_[key].is_boolean()) Fail(key, "expected true or false");
    return doc_[key].get<bool>();
  }

  std::string String(const std::string& key, const std::string& def) {
    if (!Take(key)) return def;
    if (!doc_[key].is_string()) Fail(key, "expected a string");
    return doc_[key].get<std::string>();
  }

  std::vector<double> Numbers(const std::string& key, std::vector<double> def,
                              double lo, double hi) {
    if (!Take(key)) return def;
    const Json& v = doc_[key];
    if (!v.is_array()) Fail(key, "expected an array of numbers");
    if (v.empty()) Fail(key, "grid must be nonempty");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string f = key + "[" + std::to_string(i) + "]";
      if (!v[i].is_number()) Fail(f, "expected a number");
      const double x = v[i].get<double>();
      if (!(x >= lo && x <= hi)) Fail(f, "value " + v[i].dump() + " out of range");
      out.push_back(x);
    }
    return out;
  }

  std::vector<std::size_t> Sizes(const std::string& key, std::vector<std::size_t> def,
                                 std::uint64_t lo) {
    if (!Take(key)) return def;
    const Json& v = doc_[key];
    if (!v.is_array()) Fail(key, "expected an array of integers");
    if (v.empty()) Fail(key, "grid must be nonempty");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(AsUnsigned(v[i], key + "[" + std::to_string(i) + "]", lo,
                               std::numeric_limits<std::uint32_t>::max()));
    }
    return out;
  }

  std::vector<std::string> Strings(const std::string& key) {
    if (!Take(key)) return {};
    const Json& v = doc_[key];
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array()) Fail(key, "expected a path or an array of paths");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) Fail(key + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  void Finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.count(key)) Fail(key, "unknown field");
    }
  }

  [[noreturn]] void Fail(const std::string& key, const std::string& what) const {
    const std::string field = Join(key);
    Throw(ErrorKind::kConfig, (field.empty() ? std::string("config") : field) + ": " + what,
          field);
  }

  std::string Join(const std::string& key) const {
    if (path_.empty()) return key;
    if (key.empty()) return path_;
    if (key[0] == '[') return path_ + key;
    return path_ + "." + key;
  }

 private:
  bool Take(const std::string& key) {
    seen_.insert(key);
    return doc_.contains(key) && !doc_[key].is_null();
  }

  std::uint64_t AsUnsigned(const Json& v, const std::string& key, std::uint64_t lo,
                           std::uint64_t hi) const {
    if (!v.is_number_integer()) {
      if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0 && d == static_cast<double>(static_cast<std::uint64_t>(d)) &&
            d < 1.8e19) {
          const auto u = static_cast<std::uint64_t>(d);
          if (u < lo || u > hi) Fail(key, "value " + v.dump() + " out of range");
          return u;
        }
      }
      Fail(key, "expected a nonnegative integer");
    }
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u < lo || u > hi) Fail(key, "value " + v.dump() + " out of range");
      return u;
    }
    const auto s = v.get<std::int64_t>();
    if (s < 0) Fail(key, "expected a nonnegative integer");
    const auto u = static_cast<std::uint64_t>(s);
    if (u < lo || u > hi) Fail(key, "value " + v.dump() + " out of range");
    return u;
  }

  const Json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<std::size_t> DefaultLoads() {
  std::vector<std::size_t> out;
  for (std::size_t n = 25; n <= 400; n += 25) out.push_back(n);
  return out;
}

std::vector<double> DefaultLambdas() {
  std::vector<double> out;
  for (int i = 1; i <= 15; ++i) out.push_back(2.0 * i / 100.0);
  return out;
}

Schedule MakeSchedule(const ExperimentConfig& c, double target) {
  return Schedule::Geometric(c.total_steps, c.t_start, target,
                             c.steps_per_temperature, c.cooling_fraction);
}

void CheckSchedule(const ExperimentConfig& c, double target, const std::string& field) {
  try {
    MakeSchedule(c, target).Check();
  } catch (const Error& e) {
    Throw(ErrorKind::kConfig, field + ": " + e.what(), field);
  }
}

std::string FormatNumber(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

// ---- artifact files ------------------------------------------------------

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Throw(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json ReadJson(const fs::path& path) {
  const std::string text = ReadFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    Throw(ErrorKind::kData, path.string() + ": " + e.what());
  }
}

class Writer {
 public:
  Writer(fs::path root, bool overwrite) : root_(std::move(root)), overwrite_(overwrite) {}

  void Write(const std::string& name, const std::string& content) {
    const fs::path path = root_ / name;
    std::string status = "written";
    std::error_code ec;
    if (fs::exists(path, ec)) {
      if (ReadFile(path) == content) {
        Record(path, "unchanged");
        return;
      }
      if (!overwrite_) {
        Throw(ErrorKind::kIo, "refusing to replace existing artifact " + path.string() +
                                  " (pass the overwrite flag)");
      }
      status = "overwritten";
    }
    fs::create_directories(path.parent_path(), ec);
    if (ec) Throw(ErrorKind::kIo, "cannot create " + path.parent_path().string() + ": " + ec.message());
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) Throw(ErrorKind::kIo, "cannot write " + tmp.string());
      out << content;
      out.flush();
      if (!out) Throw(ErrorKind::kIo, "write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) Throw(ErrorKind::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
    Record(path, status);
  }

  void WriteJson(const std::string& name, const Json& doc) { Write(name, doc.dump(1) + "\n"); }

  const fs::path& root() const { return root_; }
  Json artifacts() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return artifacts_;
  }

 private:
  void Record(const fs::path& path, const std::string& status) {
    std::lock_guard<std::mutex> lock(mutex_);
    artifacts_.push_back({{"path", path.string()}, {"status", status}});
  }

  fs::path root_;
  bool overwrite_;
  mutable std::mutex mutex_;
  Json artifacts_ = Json::array();
};

// Modelling choices that the results depend on but that are not fixed by the
// experiment description itself; carried in every artifact.
Json Assumptions(const ExperimentConfig& c) {
  Json a = Json::array();
  a.push_back("uniform link attributes: base_latency " +
              FormatNumber(c.topology.attrs.link.base_latency) + ", bandwidth " +
              FormatNumber(c.topology.attrs.link.bandwidth) + "; cpu_capacity " +
              FormatNumber(c.topology.attrs.node.cpu_capacity));
  a.push_back("candidate routes: union of shortest-path DAGs with up to " +
              std::to_string(c.avoid_count) +
              " interior node(s) deleted, sampled uniformly over distinct paths");
  a.push_back(c.per_task_temperature
                  ? "Metropolis temperature applies per task (effective t times task count)"
                  : "Metropolis temperature applies to the total energy");
  a.push_back("below the smallest simulated load, completions scale linearly from it");
  return a;
}

Json Envelope(const char* format, const ExperimentConfig& c) {
  return {{"format", format},
          {"version", io::kFormatVersion},
          {"seed", c.seed},
          {"seed_derivation", kSeedRule},
          {"assumptions", Assumptions(c)},
          {"config", ToJson(c)}};
}

void Merge(Json& into, const Json& from) {
  for (const auto& [k, v] : from.items()) {
    if (k != "format" && k != "version") into[k] = v;
  }
}

void Report(const RunOptions& o, const std::string& msg) {
  if (o.progress) o.progress(msg);
}

ImpulseParams MakeImpulseParams(const ExperimentConfig& c) {
  ImpulseParams p;
  p.replicas = c.replicas;
  p.stage_workload = c.stage_workload;
  p.bin_width = c.bin_width;
  p.length_bias = c.length_bias;
  p.total_steps = c.total_steps;
  p.t_start = c.t_start;
  p.steps_per_temperature = c.steps_per_temperature;
  p.cooling_fraction = c.cooling_fraction;
  p.restarts = c.restarts;
  p.per_task_temperature = c.per_task_temperature;
  p.sample_steps = c.sample_steps;
  p.burn_in = c.burn_in;
  return p;
}

// The part of the configuration that determines a single sweep cell.
Json CellKey(const ExperimentConfig& c) {
  Json j = ToJson(c);
  j["tasks"].erase("count");
  j["tasks"].erase("loads");
  j["annealer"].erase("t_min");
  j["annealer"].erase("temperatures");
  j["annealer"].erase("trace_stride");
  j["annealer"].erase("initial");
  for (const char* k : {"lambdas", "horizon", "tail_fraction", "steady_threshold", "surfaces"}) {
    j["response"].erase(k);
  }
  j.erase("output_dir");
  return j;
}

std::string CellName(std::size_t load, double t) {
  return "cells/cell_n" + std::to_string(load) + "_t" + FormatNumber(t) + ".json";
}

std::string SurfaceName(double t) { return "surface_t" + FormatNumber(t) + ".json"; }

void ExportAnneal(Writer& w, const Json& doc) {
  w.Write("anneal_trace.csv", io::TraceCsv(io::TracePointsFromJson(io::Require(doc, "trace", ""))));
  w.Write("anneal_latencies.csv",
          io::LatencyCsv(io::ConfigurationFromJson(io::Require(doc, "configuration", ""))));
}

void ExportEvolution(Writer& w, const Json& doc) {
  std::vector<EvolutionTrace> traces;
  for (const Json& t : io::Require(doc, "traces", "")) traces.push_back(io::TraceFromJson(t));
  w.Write("evolution.csv", io::EvolutionCsv(traces));
  w.Write("littles_law.csv", io::LittlesLawCsv(io::LittlesLawFromJson(doc)));
}

std::string CsvName(const std::string& json_name) {
  return json_name.substr(0, json_name.size() - 5) + ".csv";
}

}  // namespace

ExperimentConfig ParseConfig(const Json& doc) {
  Section root(doc, "");
  ExperimentConfig c;
  if (!root.Has("topology")) root.Fail("topology", "missing required section");

  {
    Section s(doc["topology"], "topology");
    if (!s.Has("type")) s.Fail("type", "missing required field");
    const std::string type = s.String("type", "");
    if (type == "lattice") {
      c.topology.kind = TopologySpec::Kind::kLattice;
    } else if (type == "barabasi_albert" || type == "ba") {
      c.topology.kind = TopologySpec::Kind::kBarabasiAlbert;
    } else {
      s.Fail("type", "unknown topology type '" + type + "' (lattice, barabasi_albert)");
    }
    c.topology.rows = static_cast<std::uint32_t>(s.Unsigned("rows", 10, 1, 4096));
    c.topology.cols = static_cast<std::uint32_t>(s.Unsigned("cols", 10, 1, 4096));
    c.topology.nodes = static_cast<std::uint32_t>(s.Unsigned("nodes", 100, 2, 1u << 20));
    c.topology.m = static_cast<std::uint32_t>(s.Unsigned("m", 2, 1, 1u << 20));
    if (c.topology.kind == TopologySpec::Kind::kBarabasiAlbert &&
        c.topology.m >= c.topology.nodes) {
      s.Fail("m", "must be smaller than nodes");
    }
    const double inf = std::numeric_limits<double>::max();
    c.topology.attrs.node.cpu_capacity = s.Number("cpu_capacity", 1.0, 1e-300, inf);
    c.topology.attrs.link.base_latency = s.Number("base_latency", 1.0, 1e-300, inf);
    c.topology.attrs.link.bandwidth = s.Number("bandwidth", 3.0, 1e-300, inf);
    c.avoid_count = static_cast<int>(s.Unsigned("avoid_count", 1, 0, kMaxAvoidCount));
    s.Finish();
  }

  const Json empty = Json::object();
  {
    Section s(root.Has("tasks") ? doc["tasks"] : empty, "tasks");
    c.task_count = s.Unsigned("count", 100, 0, 1u << 24);
    c.loads = s.Sizes("loads", DefaultLoads(), 1);
    c.stage_workload = s.Number("stage_workload", 0.25, 1e-300,
                                std::numeric_limits<double>::max());
    s.Finish();
  }
  {
    Section s(root.Has("annealer") ? doc["annealer"] : empty, "annealer");
    c.total_steps = s.Unsigned("total_steps", 100'000, 1);
    c.t_start = s.Number("t_start", 1.0, 1e-300, std::numeric_limits<double>::max());
    c.t_min = s.Number("t_min", 1e-5, 0, c.t_start);
    c.steps_per_temperature = s.Unsigned("steps_per_temperature", 100, 1);
    c.cooling_fraction = s.Number("cooling_fraction", 0.6, 1e-9, 1.0);
    c.restarts = static_cast<int>(s.Unsigned("restarts", 3, 1, 1'000'000));
    c.length_bias = s.Number("length_bias", 0.0, 0.0, 1e6);
    const std::string initial = s.String("initial", "random");
    try {
      c.initial = ParsePlacementStrategy(initial);
    } catch (const Error&) {
      s.Fail("initial", "unknown strategy '" + initial + "' (random, shortest_path)");
    }
    c.trace_stride = s.Unsigned("trace_stride", 1000, 1);
    c.per_task_temperature = s.Bool("per_task_temperature", true);
    c.temperatures = s.Numbers("temperatures", {1e-5}, 0.0, c.t_start);
    s.Finish();
    CheckSchedule(c, c.t_min, "annealer.t_min");
    for (std::size_t i = 0; i < c.temperatures.size(); ++i) {
      CheckSchedule(c, c.temperatures[i], "annealer.temperatures[" + std::to_string(i) + "]");
    }
  }
  {
    Section s(root.Has("response") ? doc["response"] : empty, "response");
    c.replicas = s.Unsigned("replicas", 10, 1, 1'000'000);
    c.bin_width = s.Number("bin_width", 1.0, 1e-9, 1e9);
    c.sample_steps = s.Unsigned("sample_steps", 20'000);
    c.burn_in = s.Unsigned("burn_in", 0);
    c.lambdas = s.Numbers("lambdas", DefaultLambdas(), 0.0, 1.0);
    c.horizon = s.Unsigned("horizon", 500, 1, 100'000'000);
    c.tail_fraction = s.Number("tail_fraction", 0.25, 1e-9, 1.0);
    c.steady_threshold = s.Number("steady_threshold", 0.05, 0.0, 1e9);
    c.surfaces = s.Strings("surfaces");
    s.Finish();
  }

  if (root.Has("seed") && !doc["seed"].is_null()) {
    c.seed = root.Unsigned("seed", 0);
  } else {
    root.Unsigned("seed", 0);
    std::random_device rd;
    c.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  c.output_dir = root.String("output_dir", c.output_dir);
  if (c.output_dir.empty()) root.Fail("output_dir", "must not be empty");
  for (const char* k : {"topology", "tasks", "annealer", "response"}) root.Touch(k);
  root.Finish();
  return c;
}

Json ToJson(const ExperimentConfig& c) {
  const bool lattice = c.topology.kind == TopologySpec::Kind::kLattice;
  Json topology = {{"type", lattice ? "lattice" : "barabasi_albert"},
                   {"cpu_capacity", c.topology.attrs.node.cpu_capacity},
                   {"base_latency", c.topology.attrs.link.base_latency},
                   {"bandwidth", c.topology.attrs.link.bandwidth},
                   {"avoid_count", c.avoid_count}};
  if (lattice) {
    topology["rows"] = c.topology.rows;
    topology["cols"] = c.topology.cols;
  } else {
    topology["nodes"] = c.topology.nodes;
    topology["m"] = c.topology.m;
  }
  return {{"seed", c.seed},
          {"output_dir", c.output_dir},
          {"topology", topology},
          {"tasks",
           {{"count", c.task_count},
            {"loads", c.loads},
            {"stage_workload", c.stage_workload}}},
          {"annealer",
           {{"total_steps", c.total_steps},
            {"t_start", c.t_start},
            {"t_min", c.t_min},
            {"steps_per_temperature", c.steps_per_temperature},
            {"cooling_fraction", c.cooling_fraction},
            {"restarts", c.restarts},
            {"length_bias", c.length_bias},
            {"initial", PlacementStrategyName(c.initial)},
            {"trace_stride", c.trace_stride},
            {"per_task_temperature", c.per_task_temperature},
            {"temperatures", c.temperatures}}},
          {"response",
           {{"replicas", c.replicas},
            {"bin_width", c.bin_width},
            {"sample_steps", c.sample_steps},
            {"burn_in", c.burn_in},
            {"lambdas", c.lambdas},
            {"horizon", c.horizon},
            {"tail_fraction", c.tail_fraction},
            {"steady_threshold", c.steady_threshold},
            {"surfaces", c.surfaces}}}};
}

ExperimentConfig Resolve(ExperimentConfig config, const RunOptions& options) {
  if (options.seed) config.seed = *options.seed;
  if (options.output_dir) {
    if (options.output_dir->empty()) {
      Throw(ErrorKind::kConfig, "output_dir: must not be empty", "output_dir");
    }
    config.output_dir = *options.output_dir;
  }
  return config;
}

Json CmdAnneal(const ExperimentConfig& c, const RunOptions& o) {
  Writer w(c.output_dir, o.overwrite);
  TopologyEnsemble ensemble(c.topology, c.seed, c.avoid_count);
  const auto table = ensemble.Get(0);
  const auto specs = GenerateTasks(table->graph(), c.task_count, c.stage_workload,
                                   DeriveSeed(c.seed, {kStreamTasks}));
  AnnealParams ap;
  ap.schedule = MakeSchedule(c, c.t_min);
  ap.restarts = c.restarts;
  ap.length_bias = c.length_bias;
  ap.initial = c.initial;
  ap.trace_stride = c.trace_stride;
  ap.per_task_temperature = c.per_task_temperature;
  Report(o, "anneal: " + std::to_string(c.task_count) + " tasks on " +
                std::to_string(table->graph().node_count()) + " nodes");
  const AnnealResult r = Anneal(*table, specs, ap, DeriveSeed(c.seed, {kStreamAnneal}));
  const LatencyBreakdown b = ComputeLatencies(r.best);

  Json doc = Envelope("ccsim.anneal_run", c);
  doc["seed_derivation"] =
      "tasks: DeriveSeed(seed, {2}); anneal: DeriveSeed(seed, {4}), restart r "
      "placement DeriveSeed(., {3, r}) and moves DeriveSeed(., {4, r}); "
      "Barabasi-Albert realization: DeriveSeed(seed, {1, 0})";
  doc["topology_seed"] = ensemble.RealizationSeed(0);
  doc["decay"] = ap.schedule.decay;
  doc["best_energy"] = r.best_energy;
  doc["best_net_energy"] = b.net;
  doc["best_cpu_energy"] = b.cpu;
  doc["restart"] = r.restart;
  doc["restart_energies"] = r.restart_energies;
  doc["trace"] = io::ToJson(r.trace);
  doc["configuration"] = io::ToJson(r.best);
  w.WriteJson("anneal.json", doc);
  if (o.export_csv) ExportAnneal(w, doc);
  return {{"command", "anneal"},
          {"seed", c.seed},
          {"best_energy", r.best_energy},
          {"artifacts", w.artifacts()}};
}

Json CmdSweep(const ExperimentConfig& c, const RunOptions& o) {
  Writer w(c.output_dir, o.overwrite);
  TopologyEnsemble ensemble(c.topology, c.seed, c.avoid_count);
  const Json key = CellKey(c);
  std::mutex mutex;
  std::string write_error;
  std::size_t reused = 0;

  SweepHooks hooks;
  hooks.lookup = [&](std::size_t load, double t) -> std::optional<ImpulseResult> {
    const fs::path path = w.root() / CellName(load, t);
    std::error_code ec;
    if (!fs::exists(path, ec)) return std::nullopt;
    const Json doc = ReadJson(path);
    if (!doc.contains("cell_key") || doc["cell_key"] != key) {
      if (o.overwrite) return std::nullopt;
      Throw(ErrorKind::kData, "existing cell " + path.string() +
                                  " was produced by a different configuration");
    }
    std::lock_guard<std::mutex> lock(mutex);
    ++reused;
    return io::ImpulseFromJson(io::Require(doc, "result", "cell"));
  };
  hooks.completed = [&](const SweepCell& cell, std::size_t done, std::size_t total) {
    const std::size_t load = c.loads[cell.load_index];
    const double t = c.temperatures[cell.temperature_index];
    std::string msg = "cell " + std::to_string(done) + "/" + std::to_string(total) +
                      " load=" + std::to_string(load) + " t=" + FormatNumber(t);
    if (cell.result) {
      Json doc = Envelope("ccsim.sweep_cell", c);
      doc["cell_key"] = key;
      doc["load"] = load;
      doc["temperature"] = t;
      doc["result"] = io::ToJson(*cell.result);
      try {
        w.WriteJson(CellName(load, t), doc);
      } catch (const std::exception& e) {
        if (write_error.empty()) write_error = e.what();
      }
      msg += " mean_latency=" + FormatNumber(cell.result->mean_latency);
    } else {
      msg += " failed: " + cell.error;
    }
    Report(o, msg);
  };

  // Lookups may throw on incompatible cells; surface that before any work.
  for (std::size_t load : c.loads) {
    for (double t : c.temperatures) hooks.lookup(load, t);
  }
  reused = 0;

  const SweepResult r = Sweep(ensemble, c.loads, c.temperatures, MakeImpulseParams(c),
                              c.seed, o.workers, hooks);
  if (!write_error.empty()) Throw(ErrorKind::kIo, write_error);
  std::size_t failed = 0;
  std::string first;
  for (const SweepCell& cell : r.cells) {
    if (!cell.result) {
      if (failed++ == 0) first = cell.error;
    }
  }
  if (failed > 0) {
    Throw(ErrorKind::kInternal, std::to_string(failed) +
                                    " sweep cell(s) failed; rerun to retry. First error: " +
                                    first);
  }

  Json summary = Envelope("ccsim.summary_surface", c);
  Merge(summary, io::ToJson(r.summary));
  w.WriteJson("summary.json", summary);
  if (o.export_csv) w.Write("summary.csv", io::SummaryCsv(r.summary));
  Json surfaces = Json::array();
  for (const ResponseSurface& s : r.surfaces) {
    Json doc = Envelope("ccsim.response_surface", c);
    doc["nodes"] = c.topology.node_count();
    Merge(doc, io::ToJson(s));
    const std::string name = SurfaceName(s.temperature);
    w.WriteJson(name, doc);
    if (o.export_csv) w.Write(CsvName(name), io::SurfaceCsv(s));
    surfaces.push_back((w.root() / name).string());
  }
  return {{"command", "sweep"},
          {"seed", c.seed},
          {"cells", r.cells.size()},
          {"cells_reused", reused},
          {"surfaces", surfaces},
          {"artifacts", w.artifacts()}};
}

Json CmdEvolve(const ExperimentConfig& c, const RunOptions& o) {
  Writer w(c.output_dir, o.overwrite);
  std::vector<std::string> paths = c.surfaces;
  if (paths.empty()) {
    const double t0 = *std::min_element(c.temperatures.begin(), c.temperatures.end());
    paths.push_back((w.root() / SurfaceName(t0)).string());
  }
  const std::size_t nodes = c.topology.node_count();
  std::vector<LatencyHistogram> hs;
  std::vector<std::string> notices;
  std::optional<double> temperature;
  for (const std::string& p : paths) {
    std::error_code ec;
    if (!fs::exists(p, ec)) {
      Throw(ErrorKind::kIo, "response surface not found: " + p +
                                " (run `sweep` first or set response.surfaces)",
            "response.surfaces");
    }
    const Json doc = ReadJson(p);
    if (doc.contains("nodes") && doc["nodes"].get<std::size_t>() != nodes) {
      Throw(ErrorKind::kData, "surface " + p + " was built for " + doc["nodes"].dump() +
                                  " nodes, the topology has " + std::to_string(nodes),
            "response.surfaces");
    }
    ResponseSurface s = io::SurfaceFromJson(doc);
    if (temperature && *temperature != s.temperature) {
      Throw(ErrorKind::kData, "surfaces disagree on temperature (" +
                                  FormatNumber(*temperature) + " vs " +
                                  FormatNumber(s.temperature) + ")",
            "response.surfaces");
    }
    temperature = s.temperature;
    notices.insert(notices.end(), s.notices.begin(), s.notices.end());
    hs.insert(hs.end(), s.histograms.begin(), s.histograms.end());
  }
  ResponseSurface surface = MakeSurface(std::move(hs), *temperature);
  notices.insert(notices.end(), surface.notices.begin(), surface.notices.end());
  surface.notices = notices;

  Report(o, "evolve: " + std::to_string(c.lambdas.size()) + " lambda values, horizon " +
                std::to_string(c.horizon));
  LittlesLawParams lp;
  lp.tail_fraction = c.tail_fraction;
  lp.steady_threshold = c.steady_threshold;
  const LittlesLawTable table = LittlesLawCurve(surface, c.lambdas, nodes, c.horizon,
                                                c.seed, lp);
  bool scaled = false;
  Json traces = Json::array();
  for (const auto& t : table.traces) {
    scaled = scaled || t.below_grid_scaled;
    traces.push_back(io::ToJson(t));
  }
  if (scaled) {
    notices.push_back("below the smallest grid load the smallest-load histogram was "
                      "scaled in proportion to the active count (approximation)");
  }

  Json doc = Envelope("ccsim.littles_law", c);
  Merge(doc, io::ToJson(table));
  doc["surfaces"] = paths;
  doc["surface_temperature"] = *temperature;
  doc["surface_loads"] = surface.loads;
  doc["notices"] = notices;
  doc["traces"] = traces;
  w.WriteJson("evolution.json", doc);
  if (o.export_csv) ExportEvolution(w, doc);
  return {{"command", "evolve"},
          {"seed", c.seed},
          {"lambda_c", table.lambda_c ? Json(*table.lambda_c) : Json(nullptr)},
          {"notices", notices},
          {"artifacts", w.artifacts()}};
}

Json CmdExport(const ExperimentConfig& c, const RunOptions& o) {
  Writer w(c.output_dir, o.overwrite);
  std::error_code ec;
  if (!fs::is_directory(w.root(), ec)) {
    Throw(ErrorKind::kIo, "output directory not found: " + w.root().string(), "output_dir");
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(w.root())) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  for (const std::string& name : names) {
    const Json doc = ReadJson(w.root() / name);
    const std::string format = doc.value("format", "");
    if (format == "ccsim.anneal_run") {
      ExportAnneal(w, doc);
    } else if (format == "ccsim.summary_surface") {
      w.Write(CsvName(name), io::SummaryCsv(io::SummaryFromJson(doc)));
    } else if (format == "ccsim.response_surface") {
      w.Write(CsvName(name), io::SurfaceCsv(io::SurfaceFromJson(doc)));
    } else if (format == "ccsim.littles_law") {
      ExportEvolution(w, doc);
    }
  }
  return {{"command", "export"}, {"artifacts", w.artifacts()}};
}

Json RunCommand(const std::string& command, const ExperimentConfig& config,
                const RunOptions& options) {
  const ExperimentConfig c = Resolve(config, options);
  if (command == "anneal") return CmdAnneal(c, options);
  if (command == "sweep") return CmdSweep(c, options);
  if (command == "evolve") return CmdEvolve(c, options);
  if (command == "export") return CmdExport(c, options);
  Throw(ErrorKind::kParameter, "unknown command '" + command +
                                   "' (anneal, sweep, evolve, export)");
}

}  // namespace ccsim
