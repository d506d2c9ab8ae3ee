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
#include <optional>
#include <string>
#include <vector>

#include "ccsim/annealer.hpp"
#include "ccsim/response.hpp"
#include "json.hpp"

// Declarative experiment configuration and the four commands built on it.
// Artifacts are JSON documents (plus CSV tables on export) under the output
// directory; each embeds the resolved configuration and seed.
namespace ccsim {

struct ExperimentConfig {
  TopologySpec topology;
  int avoid_count = 1;

  std::size_t task_count = 100;  // load for `anneal`
  std::vector<std::size_t> loads;
  double stage_workload = 0.25;

  std::uint64_t total_steps = 100'000;
  double t_start = 1.0;
  double t_min = 1e-5;  // target temperature for `anneal`
  std::uint64_t steps_per_temperature = 100;
  double cooling_fraction = 0.6;
  int restarts = 3;
  double length_bias = 0.0;
  PlacementStrategy initial = PlacementStrategy::kRandom;
  std::uint64_t trace_stride = 1000;
  bool per_task_temperature = true;
  std::vector<double> temperatures;

  std::size_t replicas = 10;
  double bin_width = 1.0;
  std::uint64_t sample_steps = 20'000;
  std::uint64_t burn_in = 0;
  std::vector<double> lambdas;
  std::size_t horizon = 500;
  double tail_fraction = 0.25;
  double steady_threshold = 0.05;
  std::vector<std::string> surfaces;  // inputs for `evolve`

  std::uint64_t seed = 0;
  std::string output_dir = "ccsim-out";
};

// Parses a config document, filling defaults. Unknown keys, wrong types,
// out-of-range values and a missing "topology" section throw kConfig with
// the offending field path. A missing seed is drawn from the OS and recorded.
ExperimentConfig ParseConfig(const nlohmann::json& doc);
nlohmann::json ToJson(const ExperimentConfig& config);

using ProgressFn = std::function<void(const std::string& message)>;

struct RunOptions {
  std::optional<std::uint64_t> seed;        // overrides the config
  std::optional<std::string> output_dir;    // overrides the config
  unsigned workers = 0;                     // 0 = available parallelism
  bool overwrite = false;
  bool export_csv = false;
  ProgressFn progress;
};

// Applies the overrides of `options` to `config`.
ExperimentConfig Resolve(ExperimentConfig config, const RunOptions& options);

// Each command returns a report listing the written artifacts and headline
// results. Existing artifacts with identical content are left alone; a
// differing one is an I/O error unless `overwrite` is set.
nlohmann::json CmdAnneal(const ExperimentConfig& config, const RunOptions& options);
// Resumable: cells whose artifact already exists (with a compatible
// configuration) are loaded instead of recomputed.
nlohmann::json CmdSweep(const ExperimentConfig& config, const RunOptions& options);
// Reads the surfaces listed in the config, or the sweep surface for the
// lowest temperature in the output directory when none are listed.
nlohmann::json CmdEvolve(const ExperimentConfig& config, const RunOptions& options);
// Writes CSV tables for every artifact present in the output directory.
nlohmann::json CmdExport(const ExperimentConfig& config, const RunOptions& options);

nlohmann::json RunCommand(const std::string& command, const ExperimentConfig& config,
                          const RunOptions& options);

}  // namespace ccsim
