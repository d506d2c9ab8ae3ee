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

#include "ccsim/response.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>
#include <utility>

#include "ccsim/error.hpp"
#include "ccsim/rng.hpp"

namespace ccsim {

double LatencyHistogram::Sum() const {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

void LatencyHistogram::Add(double latency, double weight) {
  if (!(latency >= origin)) {
    Throw(ErrorKind::kData, "latency below histogram origin");
  }
  const auto bin = static_cast<std::size_t>(std::floor((latency - origin) / width));
  if (bin >= counts.size()) counts.resize(bin + 1, 0.0);
  counts[bin] += weight;
  total += weight;
}

LatencyHistogram MakeHistogram(const std::vector<double>& latencies, double width,
                               double origin) {
  if (!(width > 0)) Throw(ErrorKind::kParameter, "bin width must be positive");
  LatencyHistogram h;
  h.origin = origin;
  h.width = width;
  for (double l : latencies) h.Add(l);
  return h;
}

LatencyHistogram Rebin(const LatencyHistogram& h, double origin, double width) {
  if (!(width > 0)) Throw(ErrorKind::kParameter, "bin width must be positive");
  LatencyHistogram out = h;
  out.origin = origin;
  out.width = width;
  out.counts.clear();
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    if (h.counts[i] == 0) continue;
    const double lo = h.origin + static_cast<double>(i) * h.width;
    const double hi = lo + h.width;
    if (lo < origin) Throw(ErrorKind::kData, "rebin target starts above data");
    auto j = static_cast<std::size_t>(std::floor((lo - origin) / width));
    while (true) {
      const double blo = origin + static_cast<double>(j) * width;
      const double bhi = blo + width;
      const double overlap = std::min(hi, bhi) - std::max(lo, blo);
      if (overlap > 0) {
        if (j >= out.counts.size()) out.counts.resize(j + 1, 0.0);
        out.counts[j] += h.counts[i] * overlap / h.width;
      }
      if (bhi >= hi) break;
      ++j;
    }
  }
  return out;
}

Graph BuildTopology(const TopologySpec& spec, std::uint64_t seed) {
  if (spec.kind == TopologySpec::Kind::kLattice) {
    return BuildLattice(spec.rows, spec.cols, spec.attrs);
  }
  return BuildBarabasiAlbert(spec.nodes, spec.m, seed, spec.attrs);
}

TopologyEnsemble::TopologyEnsemble(TopologySpec spec, std::uint64_t master_seed,
                                   int avoid_count)
    : spec_(spec), master_seed_(master_seed), avoid_count_(avoid_count) {}

std::uint64_t TopologyEnsemble::RealizationSeed(std::size_t replica) const {
  if (spec_.kind == TopologySpec::Kind::kLattice) return 0;
  return DeriveSeed(master_seed_, {kStreamTopology, replica});
}

std::shared_ptr<const RoutingTable> TopologyEnsemble::Get(std::size_t replica) {
  const std::uint64_t seed = RealizationSeed(replica);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = tables_.find(seed);
  if (it != tables_.end()) return it->second;
  auto graph = std::make_shared<const Graph>(BuildTopology(spec_, seed));
  RequireValid(*graph);
  auto table = std::make_shared<const RoutingTable>(graph, avoid_count_);
  tables_.emplace(seed, table);
  return table;
}

ImpulseResult RunImpulse(TopologyEnsemble& ensemble, std::size_t load,
                         double temperature, const ImpulseParams& params,
                         std::uint64_t seed) {
  if (load < 1) Throw(ErrorKind::kParameter, "impulse load must be >= 1");
  if (params.replicas < 1) Throw(ErrorKind::kParameter, "replicas must be >= 1");

  AnnealParams ap;
  ap.schedule = Schedule::Geometric(params.total_steps, params.t_start, temperature,
                                    params.steps_per_temperature,
                                    params.cooling_fraction);
  ap.restarts = params.restarts;
  ap.length_bias = params.length_bias;
  ap.per_task_temperature = params.per_task_temperature;

  ImpulseResult out;
  out.load = load;
  out.temperature = temperature;
  out.histogram.width = params.bin_width;
  const auto reps = static_cast<double>(params.replicas);
  const auto n = static_cast<double>(load);
  for (std::size_t r = 0; r < params.replicas; ++r) {
    const std::uint64_t rep_seed = DeriveSeed(seed, {r});
    out.replica_seeds.push_back(rep_seed);
    const auto table = ensemble.Get(r);
    // Task draws depend on the replica only, so the task set at a larger
    // load extends the one at a smaller load.
    auto specs = GenerateTasks(table->graph(), load, params.stage_workload,
                               DeriveSeed(rep_seed, {kStreamTasks}));
    AnnealResult annealed =
        Anneal(*table, specs, ap, DeriveSeed(rep_seed, {kStreamAnneal, load}));
    EnergyTracker tracker(std::move(annealed.best));
    Rng rng(DeriveSeed(rep_seed, {kStreamSample, load}));
    const SampleStats stats = SampleAtTemperature(
        tracker, temperature, params.sample_steps, params.burn_in, *table, rng,
        params.length_bias, params.per_task_temperature);

    const LatencyBreakdown final = ComputeLatencies(tracker.config());
    double max_l = 0;
    for (const TaskLatency& l : final.tasks) {
      out.histogram.Add(l.total(), 1.0 / reps);
      max_l = std::max(max_l, l.total());
    }
    out.replica_mean_latency.push_back(stats.mean_energy / n);
    out.mean_latency += stats.mean_energy / n / reps;
    out.mean_net += stats.mean_net / n / reps;
    out.mean_cpu += stats.mean_cpu / n / reps;
    out.mean_energy += stats.mean_energy / reps;
    out.max_latency += max_l / reps;
    out.acceptance_rate += stats.acceptance_rate / reps;
  }
  if (params.replicas > 1) {
    double ss = 0;
    for (double m : out.replica_mean_latency) ss += (m - out.mean_latency) * (m - out.mean_latency);
    out.mean_latency_stderr = std::sqrt(ss / (reps - 1) / reps);
  }
  out.histogram.total = n;  // exact; the per-replica 1/reps weights round
  out.histogram.load = n;
  out.histogram.temperature = temperature;
  out.histogram.replica_seeds = out.replica_seeds;
  return out;
}

ResponseSurface MakeSurface(std::vector<LatencyHistogram> histograms,
                            double temperature) {
  if (histograms.empty()) Throw(ErrorKind::kData, "surface needs histograms");
  std::sort(histograms.begin(), histograms.end(),
            [](const auto& a, const auto& b) { return a.load < b.load; });
  ResponseSurface s;
  s.temperature = temperature;
  double origin = histograms.front().origin, width = histograms.front().width;
  for (const auto& h : histograms) {
    origin = std::min(origin, h.origin);
    width = std::max(width, h.width);
  }
  std::size_t bins = 0;
  for (auto& h : histograms) {
    if (h.origin != origin || h.width != width) {
      s.notices.push_back("rebinned load " + std::to_string(h.load) +
                          " histogram onto the common grid");
      h = Rebin(h, origin, width);
    }
    bins = std::max(bins, h.counts.size());
  }
  for (auto& h : histograms) {
    h.counts.resize(bins, 0.0);
    if (!s.loads.empty() && !(h.load > s.loads.back())) {
      Throw(ErrorKind::kData, "surface loads must be strictly increasing");
    }
    s.loads.push_back(h.load);
  }
  s.histograms = std::move(histograms);
  return s;
}

void ParallelFor(std::size_t count, unsigned workers,
                 const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

SummarySurface Summarize(const std::vector<SweepCell>& cells,
                         const std::vector<std::size_t>& loads,
                         const std::vector<double>& temperatures) {
  SummarySurface s;
  s.loads = loads;
  s.temperatures = temperatures;
  const auto nan = std::nan("");
  const std::vector<double> row(loads.size(), nan);
  s.mean_latency.assign(temperatures.size(), row);
  s.max_latency = s.mean_net = s.mean_cpu = s.mean_energy = s.mean_latency;
  for (const SweepCell& c : cells) {
    if (!c.result) continue;
    const auto t = c.temperature_index, l = c.load_index;
    s.mean_latency[t][l] = c.result->mean_latency;
    s.max_latency[t][l] = c.result->max_latency;
    s.mean_net[t][l] = c.result->mean_net;
    s.mean_cpu[t][l] = c.result->mean_cpu;
    s.mean_energy[t][l] = c.result->mean_energy;
  }
  return s;
}

SweepResult Sweep(TopologyEnsemble& ensemble, const std::vector<std::size_t>& loads,
                  const std::vector<double>& temperatures,
                  const ImpulseParams& params, std::uint64_t master_seed,
                  unsigned workers, const SweepHooks& hooks) {
  if (loads.empty() || temperatures.empty()) {
    Throw(ErrorKind::kParameter, "sweep grids must be nonempty");
  }
  SweepResult out;
  for (std::size_t l = 0; l < loads.size(); ++l) {
    for (std::size_t t = 0; t < temperatures.size(); ++t) {
      out.cells.push_back({l, t, std::nullopt, {}});
    }
  }
  std::mutex report;
  std::size_t done = 0;
  ParallelFor(out.cells.size(), workers, [&](std::size_t i) {
    SweepCell& cell = out.cells[i];
    const std::size_t load = loads[cell.load_index];
    const double t = temperatures[cell.temperature_index];
    if (hooks.lookup) {
      if (auto prior = hooks.lookup(load, t)) {
        cell.result = std::move(prior);
        std::lock_guard<std::mutex> lock(report);
        ++done;
        return;
      }
    }
    try {
      cell.result = RunImpulse(ensemble, load, t, params, master_seed);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    std::lock_guard<std::mutex> lock(report);
    ++done;
    if (hooks.completed) hooks.completed(cell, done, out.cells.size());
  });

  out.summary = Summarize(out.cells, loads, temperatures);
  for (std::size_t t = 0; t < temperatures.size(); ++t) {
    std::vector<LatencyHistogram> hs;
    for (const SweepCell& c : out.cells) {
      if (c.temperature_index == t && c.result) hs.push_back(c.result->histogram);
    }
    if (!hs.empty()) out.surfaces.push_back(MakeSurface(std::move(hs), temperatures[t]));
  }
  return out;
}

LatencyHistogram InterpolateDistribution(const ResponseSurface& surface,
                                         double load) {
  if (surface.loads.empty()) Throw(ErrorKind::kData, "empty response surface");
  if (!(load >= surface.min_load() && load <= surface.max_load())) {
    Throw(ErrorKind::kRange, "load " + std::to_string(load) +
                                 " outside the surface range [" +
                                 std::to_string(surface.min_load()) + ", " +
                                 std::to_string(surface.max_load()) + "]");
  }
  const auto hi_it =
      std::lower_bound(surface.loads.begin(), surface.loads.end(), load);
  const auto hi = static_cast<std::size_t>(hi_it - surface.loads.begin());
  if (surface.loads[hi] == load) {
    LatencyHistogram h = surface.histograms[hi];
    h.load = load;
    return h;
  }
  const std::size_t lo = hi - 1;
  const double f = (load - surface.loads[lo]) / (surface.loads[hi] - surface.loads[lo]);
  const LatencyHistogram& a = surface.histograms[lo];
  const LatencyHistogram& b = surface.histograms[hi];
  LatencyHistogram h;
  h.origin = a.origin;
  h.width = a.width;
  h.counts.resize(a.counts.size());
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    h.counts[i] = (1 - f) * a.counts[i] + f * b.counts[i];
  }
  h.total = (1 - f) * a.total + f * b.total;
  h.load = load;
  h.temperature = surface.temperature;
  return h;
}

double CompletedPerUnitTime(const LatencyHistogram& hist) {
  double done = 0;
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double c = hist.counts[i];
    if (c == 0) continue;
    const double l = hist.center(i);
    if (!(l > 0)) {
      Throw(ErrorKind::kData, "occupied bin with nonpositive latency");
    }
    done += l <= 1.0 ? c : c / l;
  }
  return done;
}

EvolutionTrace Evolve(const ResponseSurface& surface, double lambda,
                      std::size_t nodes, std::size_t horizon, Rng& rng) {
  if (!(lambda >= 0 && lambda <= 1)) {
    Throw(ErrorKind::kParameter, "lambda must lie in [0, 1]");
  }
  if (nodes == 0 || horizon == 0) {
    Throw(ErrorKind::kParameter, "nodes and horizon must be positive");
  }
  EvolutionTrace tr;
  tr.lambda = lambda;
  tr.nodes = nodes;
  tr.horizon = horizon;
  tr.active.push_back(0.0);
  for (std::size_t step = 0; step < horizon; ++step) {
    const double n = tr.active.back();
    if (n > surface.max_load()) {
      tr.diverged = true;
      break;
    }
    double completed = 0;
    if (n > 0) {
      if (n < surface.min_load()) {
        tr.below_grid_scaled = true;
        completed = CompletedPerUnitTime(surface.histograms.front()) *
                    (n / surface.min_load());
      } else {
        completed = CompletedPerUnitTime(InterpolateDistribution(surface, n));
      }
    }
    std::size_t created = 0;
    for (std::size_t i = 0; i < nodes; ++i) {
      if (rng.Uniform() < lambda) ++created;
    }
    const auto c = static_cast<double>(created);
    tr.created.push_back(c);
    tr.completed.push_back(completed);
    tr.active.push_back(n + c - completed);
  }
  return tr;
}

LittlesLawRow AnalyzeTrace(const EvolutionTrace& trace,
                           const LittlesLawParams& params) {
  LittlesLawRow row;
  row.lambda = trace.lambda;
  row.diverged = trace.diverged;
  const std::size_t steps = trace.created.size();
  if (steps == 0) return row;
  const auto window = std::max<std::size_t>(
      2, static_cast<std::size_t>(
             std::ceil(params.tail_fraction * static_cast<double>(steps))));
  const std::size_t begin = steps > window ? steps - window : 0;
  const auto len = static_cast<double>(steps - begin);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = begin; i < steps; ++i) {
    row.created_rate += trace.created[i] / len;
    row.completed_rate += trace.completed[i] / len;
    const auto x = static_cast<double>(i + 1);
    const double y = trace.active[i + 1];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = len * sxx - sx * sx;
  row.tail_slope = denom > 0 ? (len * sxy - sx * sy) / denom : 0.0;
  row.steady = !row.diverged && row.tail_slope < params.steady_threshold;
  return row;
}

std::optional<double> EstimateLambdaC(const std::vector<LittlesLawRow>& rows) {
  std::optional<double> diverged;
  for (const LittlesLawRow& r : rows) {
    if (r.diverged && (!diverged || r.lambda < *diverged)) diverged = r.lambda;
  }
  if (!diverged) return std::nullopt;
  std::optional<double> steady;
  for (const LittlesLawRow& r : rows) {
    if (r.steady && r.lambda < *diverged && (!steady || r.lambda > *steady)) steady = r.lambda;
  }
  if (!steady) return std::nullopt;
  return 0.5 * (*steady + *diverged);
}

LittlesLawTable LittlesLawCurve(const ResponseSurface& surface,
                                const std::vector<double>& lambdas,
                                std::size_t nodes, std::size_t horizon,
                                std::uint64_t seed,
                                const LittlesLawParams& params) {
  if (lambdas.empty()) Throw(ErrorKind::kParameter, "lambda grid is empty");
  LittlesLawTable table;
  table.nodes = nodes;
  table.horizon = horizon;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    Rng rng(DeriveSeed(seed, {kStreamEvolve, i}));
    table.traces.push_back(Evolve(surface, lambdas[i], nodes, horizon, rng));
    table.rows.push_back(AnalyzeTrace(table.traces.back(), params));
  }
  table.lambda_c = EstimateLambdaC(table.rows);
  return table;
}

}  // namespace ccsim
