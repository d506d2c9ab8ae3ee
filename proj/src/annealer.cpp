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

#include "ccsim/annealer.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ccsim/error.hpp"
#include "ccsim/rng.hpp"

namespace ccsim {
namespace {

void Revalidate(EnergyTracker& tracker) {
  const double before = tracker.energy();
  const double drift = tracker.Resync();
  if (drift > 1e-6 * std::max(1.0, std::abs(before))) {
    Throw(ErrorKind::kInternal, "incremental energy drifted from recomputation");
  }
}

}  // namespace

Schedule Schedule::Geometric(std::uint64_t total_steps, double t_start,
                             double t_min, std::uint64_t steps_per_temperature,
                             double cooling_fraction) {
  Schedule s;
  s.t_start = t_start;
  s.t_min = t_min;
  s.total_steps = total_steps;
  s.steps_per_temperature = std::max<std::uint64_t>(1, steps_per_temperature);
  const double floor = s.Floor();
  const auto levels = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(cooling_fraction *
                                    static_cast<double>(total_steps)) /
             s.steps_per_temperature);
  s.decay = t_start > floor
                ? std::pow(floor / t_start, 1.0 / static_cast<double>(levels))
                : 1.0;
  return s;
}

double Schedule::Floor() const { return t_min > 0 ? t_min : 1e-6 * t_start; }

double Schedule::TemperatureAt(std::uint64_t step) const {
  if (t_start <= t_min) return t_min;
  const double level = static_cast<double>(step / steps_per_temperature);
  const double t = t_start * std::pow(decay, level);
  return t <= Floor() * (1 + 1e-9) ? t_min : t;
}

void Schedule::Check() const {
  if (!(t_start > 0)) Throw(ErrorKind::kParameter, "t_start must be positive");
  if (!(t_min >= 0)) Throw(ErrorKind::kParameter, "t_min must be nonnegative");
  if (!(decay > 0 && decay <= 1)) {
    Throw(ErrorKind::kParameter, "decay must lie in (0, 1]");
  }
  if (steps_per_temperature == 0 || total_steps == 0) {
    Throw(ErrorKind::kParameter, "schedule step counts must be positive");
  }
  if (total_steps > 0 && TemperatureAt(total_steps - 1) != t_min) {
    Throw(ErrorKind::kParameter, "schedule does not reach t_min within total_steps");
  }
}

Move ProposeMove(const Configuration& config, const RoutingTable& routes,
                 Rng& rng, double length_bias) {
  Move m;
  m.task = static_cast<std::uint32_t>(rng.Below(config.task_count()));
  m.stage = static_cast<int>(rng.Below(2));
  m.node = static_cast<NodeId>(rng.Below(config.graph().node_count()));
  const NodeId pred = config.predecessor(m.task, m.stage);
  const NodeId succ = config.successor(m.task, m.stage);
  m.in_route = routes.pool(pred, m.node).Sample(rng, length_bias);
  m.out_route = routes.pool(m.node, succ).Sample(rng, length_bias);
  return m;
}

StepResult MetropolisStep(EnergyTracker& tracker, double temperature,
                          const RoutingTable& routes, Rng& rng,
                          double length_bias) {
  const Move move = ProposeMove(tracker.config(), routes, rng, length_bias);
  const EnergyChange change = tracker.Delta(move);
  StepResult r;
  r.delta = change.total();
  r.accepted = MetropolisAccept(r.delta, temperature, rng.Uniform());
  if (r.accepted) tracker.Apply(move, change);
  return r;
}

AnnealResult Anneal(const RoutingTable& routes, const std::vector<TaskSpec>& specs,
                    const AnnealParams& params, std::uint64_t seed) {
  const Schedule& sched = params.schedule;
  sched.Check();
  if (params.restarts < 1) Throw(ErrorKind::kParameter, "restarts must be >= 1");

  AnnealResult result;
  if (specs.empty()) {
    result.best = Configuration(routes.graph_ptr(), {}, {});
    result.restart_energies.assign(params.restarts, 0.0);
    result.trace.push_back({0, sched.TemperatureAt(0), 0.0, 0.0, 0.0});
    return result;
  }

  const double t_scale =
      params.per_task_temperature ? static_cast<double>(specs.size()) : 1.0;
  bool have_best = false;
  const std::uint64_t stride = std::max<std::uint64_t>(1, params.trace_stride);
  for (int r = 0; r < params.restarts; ++r) {
    const auto ur = static_cast<std::uint64_t>(r);
    EnergyTracker tracker(InitialPlacement(
        routes, specs, params.initial, DeriveSeed(seed, {kStreamPlacement, ur}),
        params.length_bias));
    Rng rng(DeriveSeed(seed, {kStreamAnneal, ur}));

    std::vector<TracePoint> trace;
    double best = tracker.energy();
    // The snapshot always holds a state of energy `best` unless the current
    // state is that best and has not been copied yet.
    std::vector<TaskPlacement> snapshot(tracker.config().placements().begin(),
                                        tracker.config().placements().end());
    bool at_best = true;
    bool saved = true;
    std::uint64_t window_accepts = 0;

    for (std::uint64_t step = 0; step < sched.total_steps; ++step) {
      const double t = sched.TemperatureAt(step) * t_scale;
      const Move move =
          ProposeMove(tracker.config(), routes, rng, params.length_bias);
      const EnergyChange change = tracker.Delta(move);
      const double delta = change.total();
      if (MetropolisAccept(delta, t, rng.Uniform())) {
        ++window_accepts;
        if (delta > 0 && at_best && !saved) {
          snapshot.assign(tracker.config().placements().begin(),
                          tracker.config().placements().end());
          saved = true;
        }
        tracker.Apply(move, change);
        if (tracker.energy() < best) {
          best = tracker.energy();
          at_best = true;
          saved = false;
        } else if (delta > 0) {
          at_best = false;
        }
      }
      if ((step + 1) % params.resync_interval == 0) Revalidate(tracker);
      if ((step + 1) % stride == 0 || step + 1 == sched.total_steps) {
        const std::uint64_t window = (step % stride) + 1;
        trace.push_back({step + 1, t / t_scale, tracker.energy(), best,
                         static_cast<double>(window_accepts) /
                             static_cast<double>(window)});
        window_accepts = 0;
      }
    }
    if (at_best && !saved) {
      snapshot.assign(tracker.config().placements().begin(),
                      tracker.config().placements().end());
    }
    Configuration candidate(routes.graph_ptr(), specs, std::move(snapshot));
    const double exact = TotalEnergy(candidate);
    result.restart_energies.push_back(exact);
    if (!have_best || exact < result.best_energy) {
      have_best = true;
      result.best = std::move(candidate);
      result.best_energy = exact;
      result.restart = r;
      result.trace = std::move(trace);
    }
  }
  return result;
}

SampleStats SampleAtTemperature(EnergyTracker& tracker, double temperature,
                                std::uint64_t steps, std::uint64_t burn_in,
                                const RoutingTable& routes, Rng& rng,
                                double length_bias, bool per_task_temperature,
                                std::uint64_t resync_interval) {
  SampleStats s;
  const std::size_t n_tasks = tracker.config().task_count();
  if (n_tasks == 0) {
    s.steps = steps;
    return s;
  }
  if (per_task_temperature) temperature *= static_cast<double>(n_tasks);
  resync_interval = std::max<std::uint64_t>(1, resync_interval);
  for (std::uint64_t i = 0; i < burn_in; ++i) {
    MetropolisStep(tracker, temperature, routes, rng, length_bias);
    if ((i + 1) % resync_interval == 0) Revalidate(tracker);
  }
  // Welford running moments.
  double mean = 0, m2 = 0, net = 0, cpu = 0;
  std::uint64_t accepted = 0;
  for (std::uint64_t i = 0; i < steps; ++i) {
    if (MetropolisStep(tracker, temperature, routes, rng, length_bias).accepted) {
      ++accepted;
    }
    if ((i + 1) % resync_interval == 0) Revalidate(tracker);
    const double e = tracker.energy();
    const double n = static_cast<double>(i + 1);
    const double d = e - mean;
    mean += d / n;
    m2 += d * (e - mean);
    net += (tracker.net_energy() - net) / n;
    cpu += (tracker.cpu_energy() - cpu) / n;
  }
  s.steps = steps;
  if (steps == 0) {
    s.mean_energy = tracker.energy();
    s.mean_net = tracker.net_energy();
    s.mean_cpu = tracker.cpu_energy();
    return s;
  }
  s.mean_energy = mean;
  s.energy_variance = steps > 1 ? m2 / static_cast<double>(steps - 1) : 0.0;
  s.mean_net = net;
  s.mean_cpu = cpu;
  s.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(steps);
  return s;
}

}  // namespace ccsim
