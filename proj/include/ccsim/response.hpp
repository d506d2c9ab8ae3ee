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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ccsim/annealer.hpp"
#include "ccsim/routing.hpp"
#include "ccsim/topology.hpp"

namespace ccsim {

// Unnormalized latency distribution: counts[i] tasks finish after a latency
// in [origin + i * width, origin + (i + 1) * width). Counts may be fractional
// after averaging or interpolation; they always sum to `total`.
struct LatencyHistogram {
  double origin = 0.0;
  double width = 1.0;
  std::vector<double> counts;
  double total = 0.0;

  // Provenance.
  double load = 0.0;
  double temperature = 0.0;
  std::vector<std::uint64_t> replica_seeds;

  double center(std::size_t i) const {
    return origin + (static_cast<double>(i) + 0.5) * width;
  }
  double Sum() const;
  void Add(double latency, double weight = 1.0);
  bool SameGrid(const LatencyHistogram& other) const {
    return origin == other.origin && width == other.width;
  }
};

LatencyHistogram MakeHistogram(const std::vector<double>& latencies,
                               double width, double origin = 0.0);

// Moves every bin's mass onto the target grid in proportion to overlap.
LatencyHistogram Rebin(const LatencyHistogram& h, double origin, double width);

struct TopologySpec {
  enum class Kind { kLattice, kBarabasiAlbert };
  Kind kind = Kind::kLattice;
  std::uint32_t rows = 10;
  std::uint32_t cols = 10;
  std::uint32_t nodes = 100;
  std::uint32_t m = 2;
  UniformAttrs attrs;

  std::uint32_t node_count() const {
    return kind == Kind::kLattice ? rows * cols : nodes;
  }
};

Graph BuildTopology(const TopologySpec& spec, std::uint64_t seed);

// Topology realizations indexed by replica: one shared lattice, or one
// Barabasi-Albert draw per replica. Routing tables are built once per
// realization and shared between threads.
class TopologyEnsemble {
 public:
  TopologyEnsemble(TopologySpec spec, std::uint64_t master_seed, int avoid_count);

  const TopologySpec& spec() const { return spec_; }
  std::uint64_t RealizationSeed(std::size_t replica) const;
  std::shared_ptr<const RoutingTable> Get(std::size_t replica);

 private:
  TopologySpec spec_;
  std::uint64_t master_seed_;
  int avoid_count_;
  std::mutex mutex_;
  std::map<std::uint64_t, std::shared_ptr<const RoutingTable>> tables_;
};

struct ImpulseParams {
  std::size_t replicas = 10;
  double stage_workload = 0.25;
  double bin_width = 1.0;
  double length_bias = 0.0;
  // Schedule shape; t_min is replaced by the target temperature of each run.
  std::uint64_t total_steps = 100'000;
  double t_start = 1.0;
  std::uint64_t steps_per_temperature = 100;
  double cooling_fraction = 0.6;
  int restarts = 3;
  bool per_task_temperature = true;
  std::uint64_t sample_steps = 20'000;
  std::uint64_t burn_in = 0;
};

struct ImpulseResult {
  std::size_t load = 0;
  double temperature = 0;
  LatencyHistogram histogram;  // replica-averaged, sums to `load`
  // Per-task averages over replicas (sampling means after annealing).
  double mean_latency = 0;
  double mean_net = 0;
  double mean_cpu = 0;
  double max_latency = 0;      // replica average of the final snapshot maximum
  double mean_energy = 0;
  double acceptance_rate = 0;
  // Per-replica mean task latency and the standard error of their average.
  std::vector<double> replica_mean_latency;
  double mean_latency_stderr = 0;
  std::vector<std::uint64_t> replica_seeds;
};

// Impulse response at load N and temperature t: per replica a fresh task set
// is annealed down to t, sampled at t, and its final per-task latencies are
// binned. Replica r uses stream DeriveSeed(seed, {r}); its task set depends
// on r alone (nested across loads) and its annealing and sampling streams on
// (r, load), so runs at different temperatures share every random draw
// except the acceptance outcomes.
ImpulseResult RunImpulse(TopologyEnsemble& ensemble, std::size_t load,
                         double temperature, const ImpulseParams& params,
                         std::uint64_t seed);

struct SummarySurface {
  std::vector<std::size_t> loads;
  std::vector<double> temperatures;
  // Indexed [temperature][load].
  std::vector<std::vector<double>> mean_latency;
  std::vector<std::vector<double>> max_latency;
  std::vector<std::vector<double>> mean_net;
  std::vector<std::vector<double>> mean_cpu;
  std::vector<std::vector<double>> mean_energy;
};

struct ResponseSurface {
  double temperature = 0;
  std::vector<double> loads;  // strictly increasing
  std::vector<LatencyHistogram> histograms;  // one per load, shared grid
  std::vector<std::string> notices;          // e.g. rebinning applied

  double min_load() const { return loads.front(); }
  double max_load() const { return loads.back(); }
};

// Puts histograms on one grid (rebinning where needed, noted in `notices`)
// and sorts by load. Throws kData on duplicate loads.
ResponseSurface MakeSurface(std::vector<LatencyHistogram> histograms,
                            double temperature);

struct SweepCell {
  std::size_t load_index = 0;
  std::size_t temperature_index = 0;
  std::optional<ImpulseResult> result;
  std::string error;  // set when the cell failed
};

struct SweepResult {
  std::vector<SweepCell> cells;  // load-major
  SummarySurface summary;
  std::vector<ResponseSurface> surfaces;  // one per temperature
};

struct SweepHooks {
  // Returns a previously computed cell to skip work, if any.
  std::function<std::optional<ImpulseResult>(std::size_t load, double t)> lookup;
  // Called (serialized) after each freshly computed or failed cell.
  std::function<void(const SweepCell&, std::size_t done, std::size_t total)>
      completed;
};

// Every cell calls RunImpulse with the master seed; cells run on `workers`
// threads (0 = hardware concurrency). Failed cells are recorded, not fatal.
SweepResult Sweep(TopologyEnsemble& ensemble, const std::vector<std::size_t>& loads,
                  const std::vector<double>& temperatures,
                  const ImpulseParams& params, std::uint64_t master_seed,
                  unsigned workers = 0, const SweepHooks& hooks = {});

SummarySurface Summarize(const std::vector<SweepCell>& cells,
                         const std::vector<std::size_t>& loads,
                         const std::vector<double>& temperatures);

// Bin-wise linear interpolation between the two grid loads bracketing
// `load`. Throws kRange outside [min_load, max_load].
LatencyHistogram InterpolateDistribution(const ResponseSurface& surface,
                                         double load);

// Equivalent number of tasks completed in one time unit: each bin
// contributes count / L at its center latency L, capped at the full count.
double CompletedPerUnitTime(const LatencyHistogram& hist);

struct EvolutionTrace {
  double lambda = 0;
  std::size_t nodes = 0;
  std::size_t horizon = 0;
  std::vector<double> active;     // N_t, one more entry than created/completed
  std::vector<double> created;
  std::vector<double> completed;
  bool diverged = false;          // active count left the surface's load range
  bool below_grid_scaled = false; // some step used the scaled minimum-load histogram
};

// Coarse-grained evolution from N_0 = 0: every step each node creates a task
// with probability lambda and the interpolated distribution at N_t gives the
// completions. Below the smallest grid load the smallest-load histogram is
// scaled by N_t / N_min. Stops early, flagged diverged, once N_t exceeds the
// largest grid load.
EvolutionTrace Evolve(const ResponseSurface& surface, double lambda,
                      std::size_t nodes, std::size_t horizon, Rng& rng);

struct LittlesLawRow {
  double lambda = 0;
  double created_rate = 0;    // tail-window means
  double completed_rate = 0;
  double tail_slope = 0;      // least-squares slope of N_t over the tail
  bool steady = false;
  bool diverged = false;
};

struct LittlesLawParams {
  double tail_fraction = 0.25;
  double steady_threshold = 0.05;
};

struct LittlesLawTable {
  std::size_t nodes = 0;
  std::size_t horizon = 0;
  std::vector<LittlesLawRow> rows;
  std::vector<EvolutionTrace> traces;
  std::optional<double> lambda_c;
};

// Midpoint between the smallest diverged lambda and the largest steady lambda
// below it; empty when either is missing.
std::optional<double> EstimateLambdaC(const std::vector<LittlesLawRow>& rows);

LittlesLawTable LittlesLawCurve(const ResponseSurface& surface,
                                const std::vector<double>& lambdas,
                                std::size_t nodes, std::size_t horizon,
                                std::uint64_t seed,
                                const LittlesLawParams& params = {});

// Tail-window statistics of one trace, as used by LittlesLawCurve.
LittlesLawRow AnalyzeTrace(const EvolutionTrace& trace,
                           const LittlesLawParams& params = {});

// Runs fn(i) for i in [0, count) on up to `workers` threads.
void ParallelFor(std::size_t count, unsigned workers,
                 const std::function<void(std::size_t)>& fn);

}  // namespace ccsim
