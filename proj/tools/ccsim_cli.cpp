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


// Command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ccsim/ccsim.h"
#include "json.hpp"

namespace {

constexpr int kUsageExit = 64;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned workers = 0;
  bool overwrite = false;
  bool export_csv = false;
  bool print_config = false;
  bool quiet = false;
};

void Diagnostic(const std::string& status, int code, const std::string& message,
                const std::string& field = {}) {
  nlohmann::json j = {{"status", status}, {"code", code}, {"message", message}, {"field", field}};
  std::cerr << j.dump() << std::endl;
}

void Progress(const char* message, void* user) {
  if (user == nullptr) std::cerr << "ccsim: " << message << std::endl;
}

int RunLibrary(const std::string& command, const Flags& f) {
  std::string config = R"({"topology": {"type": "lattice"}})";
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path, std::ios::binary);
    if (!in) {
      Diagnostic("io", CCSIM_ERR_IO, "cannot read config file " + f.config_path, "--config");
      return CCSIM_ERR_IO;
    }
    std::ostringstream os;
    os << in.rdbuf();
    config = os.str();
  } else if (command != "export") {
    Diagnostic("usage", kUsageExit, "--config is required for " + command, "--config");
    return kUsageExit;
  }

  ccsim_run_options opts;
  ccsim_run_options_init(&opts);
  if (f.seed) {
    opts.has_seed = 1;
    opts.seed = *f.seed;
  }
  if (f.out) opts.output_dir = f.out->c_str();
  opts.workers = f.workers;
  opts.overwrite = f.overwrite ? 1 : 0;
  opts.export_csv = f.export_csv ? 1 : 0;
  opts.progress = Progress;
  opts.progress_user = f.quiet ? &opts : nullptr;

  char* out = nullptr;
  ccsim_status status = f.print_config
                            ? ccsim_resolve_config(config.c_str(), &opts, &out)
                            : ccsim_run_command(command.c_str(), config.c_str(), &opts, &out);
  if (status != CCSIM_OK) {
    std::cerr << ccsim_last_error_json() << std::endl;
    return static_cast<int>(status);
  }
  std::cout << out << std::endl;
  ccsim_string_free(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ccsim: task allocation and congestion experiments on graphs"};
  app.set_version_flag("--version", std::string(ccsim_version()));
  app.require_subcommand(1);
  Flags flags;
  std::uint64_t seed = 0;

  const char* commands[][2] = {
      {"anneal", "Anneal one task set and write the best configuration and traces"},
      {"sweep", "Impulse-response sweep over the load and temperature grids (resumable)"},
      {"evolve", "Coarse-grained evolution and Little's-law table from a response surface"},
      {"export", "Write CSV tables for the artifacts in the output directory"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", flags.config_path, "Experiment config (JSON)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("-o,--out", flags.out, "Output directory (overrides the config)");
    sub->add_option("-j,--workers", flags.workers, "Worker threads (0 = all cores)");
    sub->add_flag("--overwrite", flags.overwrite, "Replace differing existing artifacts");
    sub->add_flag("--export", flags.export_csv, "Also write plot-ready CSV tables");
    sub->add_flag("--print-config", flags.print_config,
                  "Print the resolved configuration and exit");
    sub->add_flag("-q,--quiet", flags.quiet, "Suppress progress messages");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Diagnostic("usage", kUsageExit, e.what());
    return kUsageExit;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) flags.seed = seed;
    return RunLibrary(sub->get_name(), flags);
  }
  return kUsageExit;
}
