// Copyright 2026 The dependsim Authors.
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

#ifndef DEPENDSIM_DEPENDSIM_H
#define DEPENDSIM_DEPENDSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DS_API __declspec(dllexport)
#else
#define DS_API __attribute__((visibility("default")))
#endif

/* Status codes. Every call returning ds_status stores a message for
 * ds_last_error() on failure. */
typedef enum ds_status {
  DS_OK = 0,
  DS_ERR_INVALID_ARGUMENT = 1, /* null handle or out of range argument */
  DS_ERR_CONFIG = 2,           /* scenario failed validation */
  DS_ERR_IO = 3,
  DS_ERR_MALFORMED_TRACE = 4,
  DS_ERR_RUNTIME = 5, /* any other simulation error */
  DS_ERR_INTERNAL = 6
} ds_status;

typedef enum ds_trace_level {
  DS_TRACE_FULL = 0,    /* includes every send, delivery and drop */
  DS_TRACE_PROTOCOL = 1 /* protocol events only */
} ds_trace_level;

typedef struct ds_scenario ds_scenario;
typedef struct ds_run ds_run;

/* Message for the last failed call on this thread; never null. */
DS_API const char* ds_last_error(void);
DS_API const char* ds_version(void);
/* Frees strings returned through char** out-parameters. */
DS_API void ds_string_free(char* s);

/* Scenarios (YAML, or JSON). */
DS_API ds_status ds_scenario_load_file(const char* path, ds_scenario** out);
DS_API ds_status ds_scenario_load_string(const char* text, ds_scenario** out);
DS_API void ds_scenario_free(ds_scenario* s);
DS_API ds_status ds_scenario_set_seed(ds_scenario* s, uint64_t seed);
DS_API ds_status ds_scenario_set_run_length(ds_scenario* s, int64_t run_length);
/* Appends patterns given as a JSON or YAML list in the scenario's
 * analysis.patterns form (the form returned by ds_run_learned_patterns). */
DS_API ds_status ds_scenario_add_patterns(ds_scenario* s, const char* patterns);

/* Runs. The scenario is copied; it may be freed after ds_run_create. */
DS_API ds_status ds_run_create(const ds_scenario* s, ds_trace_level level,
                               ds_run** out);
DS_API void ds_run_free(ds_run* r);
/* Advances to time t. ds_run_finish runs to the run length and closes the
 * trace. */
DS_API ds_status ds_run_until(ds_run* r, int64_t t);
DS_API ds_status ds_run_finish(ds_run* r);
DS_API int64_t ds_run_now(const ds_run* r);
DS_API size_t ds_run_trace_size(const ds_run* r);

DS_API ds_status ds_run_trace_jsonl(const ds_run* r, char** out);
DS_API ds_status ds_run_write_trace(const ds_run* r, const char* path);
DS_API ds_status ds_run_metrics_json(const ds_run* r, char** out);
DS_API ds_status ds_run_write_metrics(const ds_run* r, const char* path);
DS_API ds_status ds_run_learned_patterns(const ds_run* r, char** out);

/* Invariant checks. `violations` receives a JSON array (may be null if not
 * wanted); `count` its length. */
DS_API ds_status ds_run_verify(const ds_run* r, char** violations, size_t* count);
DS_API ds_status ds_verify_trace_file(const char* path, char** violations,
                                      size_t* count);
DS_API ds_status ds_metrics_trace_file(const char* path, char** out);

#ifdef __cplusplus
}
#endif

#endif /* DEPENDSIM_DEPENDSIM_H */
