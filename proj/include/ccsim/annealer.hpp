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

#include <cmath>
#include <cstdint>
#include <vector>

#include "ccsim/latency.hpp"
#include "ccsim/routing.hpp"
#include "ccsim/workload.hpp"

namespace ccsim {

// Geometric cooling t_{j+1} = decay * t_j, one level per
// `steps_per_temperature` steps, clamped to t_min once reached.
struct Schedule {
  double t_start = 1.0;
  double t_min = 1e-5;
  double decay = 0.99;
  std::uint64_t steps_per_temperature = 100;
  std::uint64_t total_steps = 100'000;

  // Chooses decay so that t_min is reached after `cooling_fraction` of the
  // steps; the remainder runs at t_min. A literal t_min = 0 cools down to
  // 1e-6 * t_start and then switches to zero.
  static Schedule Geometric(std::uint64_t total_steps, double t_start,
                            double t_min, std::uint64_t steps_per_temperature = 100,
                            double cooling_fraction = 0.6);

  double TemperatureAt(std::uint64_t step) const;
  // Throws kParameter when the schedule cannot reach t_min in time.
  void Check() const;

 private:
  double Floor() const;
};

struct AnnealParams {
  Schedule schedule;
  int restarts = 3;
  double length_bias = 0.0;
  PlacementStrategy initial = PlacementStrategy::kRandom;
  std::uint64_t trace_stride = 1000;
  std::uint64_t resync_interval = 10'000;
  // When set, temperatures are per task: the Boltzmann factor uses the
  // change of the mean task latency, exp(-dE / (N t)).
  bool per_task_temperature = true;
};

struct TracePoint {
  std::uint64_t step = 0;
  double temperature = 0;
  double energy = 0;
  double best_energy = 0;
  double acceptance_rate = 0;  // over the trace window ending at `step`
};

struct AnnealResult {
  Configuration best;
  double best_energy = 0;
  int restart = 0;  // index of the winning restart
  std::vector<double> restart_energies;
  std::vector<TracePoint> trace;  // of the winning restart
};

Move ProposeMove(const Configuration& config, const RoutingTable& routes,
                 Rng& rng, double length_bias = 0.0);

inline bool MetropolisAccept(double delta, double temperature, double uniform) {
  if (delta <= 0) return true;
  return temperature > 0 && uniform < std::exp(-delta / temperature);
}

struct StepResult {
  bool accepted = false;
  double delta = 0;
};

// One proposal plus acceptance test. The uniform is drawn for every step so
// the random stream does not depend on the sign of the energy change.
StepResult MetropolisStep(EnergyTracker& tracker, double temperature,
                          const RoutingTable& routes, Rng& rng,
                          double length_bias = 0.0);

// Independent annealings from fresh random placements; the best one wins.
AnnealResult Anneal(const RoutingTable& routes, const std::vector<TaskSpec>& specs,
                    const AnnealParams& params, std::uint64_t seed);

struct SampleStats {
  std::uint64_t steps = 0;
  double mean_energy = 0;
  double energy_variance = 0;
  double mean_net = 0;
  double mean_cpu = 0;
  double acceptance_rate = 0;
};

// Fixed-temperature Metropolis run on `tracker`, which is left in the final
// state. Averages are over the `steps` after `burn_in`. Temperature units
// follow AnnealParams::per_task_temperature.
SampleStats SampleAtTemperature(EnergyTracker& tracker, double temperature,
                                std::uint64_t steps, std::uint64_t burn_in,
                                const RoutingTable& routes, Rng& rng,
                                double length_bias = 0.0,
                                bool per_task_temperature = true,
                                std::uint64_t resync_interval = 10'000);

}  // namespace ccsim
