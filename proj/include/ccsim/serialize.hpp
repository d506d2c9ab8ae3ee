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

#include <string>

#include "ccsim/annealer.hpp"
#include "ccsim/response.hpp"
#include "ccsim/topology.hpp"
#include "ccsim/workload.hpp"
#include "json.hpp"

// Structured text documents (JSON) for every persisted object, and CSV tables
// for plotting. Each top-level document carries "format" and "version".
namespace ccsim::io {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

Json ToJson(const Graph& graph);
Graph GraphFromJson(const Json& doc);

Json ToJson(const TaskSpec& spec, const TaskPlacement& placement);
Json ToJson(const Configuration& config);
Configuration ConfigurationFromJson(const Json& doc);

Json ToJson(const LatencyHistogram& h);
LatencyHistogram HistogramFromJson(const Json& doc);

Json ToJson(const ImpulseResult& r);
ImpulseResult ImpulseFromJson(const Json& doc);

Json ToJson(const ResponseSurface& s);
ResponseSurface SurfaceFromJson(const Json& doc);

Json ToJson(const SummarySurface& s);
SummarySurface SummaryFromJson(const Json& doc);

Json ToJson(const EvolutionTrace& t);
EvolutionTrace TraceFromJson(const Json& doc);

Json ToJson(const LittlesLawTable& t);
LittlesLawTable LittlesLawFromJson(const Json& doc);

Json ToJson(const std::vector<TracePoint>& trace);
std::vector<TracePoint> TracePointsFromJson(const Json& doc);

Json ToJson(const GraphDiagnostics& d);

// CSV exports.
std::string TraceCsv(const std::vector<TracePoint>& trace);
std::string LatencyCsv(const Configuration& config);
std::string SummaryCsv(const SummarySurface& s);
std::string SurfaceCsv(const ResponseSurface& s);
std::string EvolutionCsv(const std::vector<EvolutionTrace>& traces);
std::string LittlesLawCsv(const LittlesLawTable& t);

// Fetches a required key, throwing kData that names the missing field.
const Json& Require(const Json& doc, const std::string& key,
                    const std::string& context);

}  // namespace ccsim::io
