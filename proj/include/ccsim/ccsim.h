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


#ifndef CCSIM_CCSIM_H_
#define CCSIM_CCSIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CCSIM_BUILDING_LIBRARY)
#define CCSIM_API __declspec(dllexport)
#else
#define CCSIM_API __declspec(dllimport)
#endif
#else
#define CCSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning ccsim_status records a message for
 * the calling thread on failure, retrievable with ccsim_last_error(). */
typedef enum ccsim_status {
  CCSIM_OK = 0,
  CCSIM_ERR_PARAMETER = 1, /* invalid argument value */
  CCSIM_ERR_RANGE = 2,     /* value outside a supported range */
  CCSIM_ERR_DATA = 3,      /* malformed or inconsistent input document */
  CCSIM_ERR_CONFIG = 4,    /* invalid experiment configuration */
  CCSIM_ERR_IO = 5,        /* filesystem failure or artifact conflict */
  CCSIM_ERR_INTERNAL = 6,  /* invariant violation inside the library */
  CCSIM_ERR_NULL = 7       /* required pointer argument was NULL */
} ccsim_status;

CCSIM_API const char* ccsim_version(void);
CCSIM_API const char* ccsim_status_name(ccsim_status status);

/* Last error of the calling thread; empty string when none. The pointers
 * stay valid until the next failing call on the same thread. */
CCSIM_API const char* ccsim_last_error(void);
/* Configuration field path of the last error (e.g. "topology.rows"), or "". */
CCSIM_API const char* ccsim_last_error_field(void);
/* Last error as a JSON object {"status", "message", "field"}. */
CCSIM_API const char* ccsim_last_error_json(void);

/* Frees strings returned through char** out-parameters. */
CCSIM_API void ccsim_string_free(char* s);

/* ---- graphs ------------------------------------------------------------ */

typedef struct ccsim_graph ccsim_graph;

CCSIM_API ccsim_status ccsim_graph_lattice(uint32_t rows, uint32_t cols,
                                           double cpu_capacity,
                                           double base_latency,
                                           double bandwidth, ccsim_graph** out);
CCSIM_API ccsim_status ccsim_graph_barabasi_albert(
    uint32_t nodes, uint32_t m, uint64_t seed, double cpu_capacity,
    double base_latency, double bandwidth, ccsim_graph** out);
CCSIM_API ccsim_status ccsim_graph_from_json(const char* json, ccsim_graph** out);
CCSIM_API ccsim_status ccsim_graph_to_json(const ccsim_graph* graph, char** out);
CCSIM_API ccsim_status ccsim_graph_node_count(const ccsim_graph* graph, size_t* out);
CCSIM_API ccsim_status ccsim_graph_edge_count(const ccsim_graph* graph, size_t* out);
/* Structural diagnostics as JSON; `valid` is set to 1 when no errors. */
CCSIM_API ccsim_status ccsim_graph_validate(const ccsim_graph* graph, int* valid,
                                            char** diagnostics_json);
CCSIM_API void ccsim_graph_free(ccsim_graph* graph);

/* ---- route pools ------------------------------------------------------- */

typedef struct ccsim_routes ccsim_routes;

/* Builds candidate-route pools for every node pair. The graph must be
 * valid; avoid_count is 0, 1 or 2. */
CCSIM_API ccsim_status ccsim_routes_create(const ccsim_graph* graph, int avoid_count,
                                           ccsim_routes** out);
CCSIM_API ccsim_status ccsim_routes_distance(const ccsim_routes* routes, uint32_t u,
                                             uint32_t v, double* out);
/* Enumerates the pool of (u, v) as a JSON array of node lists; fails with
 * CCSIM_ERR_RANGE when it holds more than `limit` paths. */
CCSIM_API ccsim_status ccsim_routes_pool_json(const ccsim_routes* routes, uint32_t u,
                                              uint32_t v, size_t limit, char** out);
CCSIM_API void ccsim_routes_free(ccsim_routes* routes);

/* ---- configurations ---------------------------------------------------- */

typedef struct ccsim_config ccsim_config;

CCSIM_API ccsim_status ccsim_config_from_json(const char* json, ccsim_config** out);
CCSIM_API ccsim_status ccsim_config_to_json(const ccsim_config* config, char** out);
CCSIM_API ccsim_status ccsim_config_task_count(const ccsim_config* config, size_t* out);
CCSIM_API ccsim_status ccsim_config_energy(const ccsim_config* config, double* total,
                                           double* net, double* cpu);
CCSIM_API ccsim_status ccsim_config_task_latency(const ccsim_config* config,
                                                 size_t task, double* net,
                                                 double* cpu);
CCSIM_API void ccsim_config_free(ccsim_config* config);

/* Generates `tasks` tasks with per-stage workload `stage_workload` and
 * anneals their placement. `params_json` may be NULL or an object with the
 * keys of the "annealer" config section. The best configuration is
 * returned in `best` (caller frees). */
CCSIM_API ccsim_status ccsim_anneal(const ccsim_routes* routes, size_t tasks,
                                    double stage_workload, const char* params_json,
                                    uint64_t seed, ccsim_config** best,
                                    double* best_energy);

/* ---- experiment commands ----------------------------------------------- */

typedef void (*ccsim_progress_fn)(const char* message, void* user);

typedef struct ccsim_run_options {
  int has_seed;            /* nonzero: `seed` overrides the config */
  uint64_t seed;
  const char* output_dir;  /* non-NULL: overrides the config */
  unsigned workers;        /* 0 = available parallelism */
  int overwrite;           /* nonzero: replace differing artifacts */
  int export_csv;          /* nonzero: also write CSV tables */
  ccsim_progress_fn progress;
  void* progress_user;
} ccsim_run_options;

CCSIM_API void ccsim_run_options_init(ccsim_run_options* options);

/* Parses `config_json`, applies `options` (may be NULL) and returns the
 * resolved configuration with all defaults filled in. */
CCSIM_API ccsim_status ccsim_resolve_config(const char* config_json,
                                            const ccsim_run_options* options,
                                            char** resolved_json);

/* Runs "anneal", "sweep", "evolve" or "export". `report_json` (may be NULL)
 * receives a JSON report of written artifacts and headline results. */
CCSIM_API ccsim_status ccsim_run_command(const char* command, const char* config_json,
                                         const ccsim_run_options* options,
                                         char** report_json);

#ifdef __cplusplus
}
#endif

#endif  /* CCSIM_CCSIM_H_ */
