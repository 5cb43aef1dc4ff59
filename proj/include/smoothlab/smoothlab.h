// Copyright 2026 The smoothlab Authors
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

/* C interface to smoothlab scenarios.
 *
 * Handles are opaque. Every function that can fail returns a status and
 * leaves a message in smoothlab_last_error() (per thread). Strings returned
 * by report accessors stay valid until the report is freed.
 */

#ifndef SMOOTHLAB_H
#define SMOOTHLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SMOOTHLAB_API __declspec(dllexport)
#else
#define SMOOTHLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* The first three values double as CLI exit codes. */
typedef enum smoothlab_status {
  SMOOTHLAB_OK = 0,
  SMOOTHLAB_CHECK_FAILED = 1,
  SMOOTHLAB_CONFIG_ERROR = 2,
  SMOOTHLAB_NUMERIC_ERROR = 3,
  SMOOTHLAB_IO_ERROR = 4,
  SMOOTHLAB_INVALID_ARGUMENT = 5
} smoothlab_status;

typedef struct smoothlab_scenario smoothlab_scenario;
typedef struct smoothlab_report smoothlab_report;

typedef struct smoothlab_options {
  int has_seed;            /* nonzero: seed overrides the config */
  uint64_t seed;
  double tolerance_scale;  /* multiplies every check tolerance; 0 means 1 */
} smoothlab_options;

typedef struct smoothlab_check {
  const char* name;
  double value;
  double reference;
  double metric;
  double tolerance;
  int pass;
  const char* note;
} smoothlab_check;

SMOOTHLAB_API const char* smoothlab_version(void);
SMOOTHLAB_API const char* smoothlab_last_error(void);
SMOOTHLAB_API const char* smoothlab_status_name(smoothlab_status status);

/* Worker threads for inner scans (results do not depend on it). 0 is rejected. */
SMOOTHLAB_API smoothlab_status smoothlab_set_threads(size_t n);

/* JSON array of presets: name, verb, description, config. Static storage. */
SMOOTHLAB_API const char* smoothlab_presets_json(void);

/* config_json may be NULL or "" for the verb's default preset. options may be NULL. */
SMOOTHLAB_API smoothlab_status smoothlab_scenario_load(const char* verb, const char* config_json,
                                                       const smoothlab_options* options,
                                                       smoothlab_scenario** out);
SMOOTHLAB_API smoothlab_status smoothlab_scenario_load_file(const char* verb, const char* path,
                                                            const smoothlab_options* options,
                                                            smoothlab_scenario** out);
/* Effective config (preset plus overrides) as JSON. */
SMOOTHLAB_API const char* smoothlab_scenario_config_json(const smoothlab_scenario* scenario);
SMOOTHLAB_API void smoothlab_scenario_free(smoothlab_scenario* scenario);

/* Always produces a report when the arguments are valid. Returns OK when every
 * check passed, CHECK_FAILED when one did not, NUMERIC_ERROR when a module
 * raised (the report then carries the message). */
SMOOTHLAB_API smoothlab_status smoothlab_scenario_run(const smoothlab_scenario* scenario, smoothlab_report** out);

SMOOTHLAB_API int smoothlab_report_passed(const smoothlab_report* report);
SMOOTHLAB_API size_t smoothlab_report_check_count(const smoothlab_report* report);
SMOOTHLAB_API smoothlab_status smoothlab_report_check(const smoothlab_report* report, size_t index,
                                                      smoothlab_check* out);
SMOOTHLAB_API const char* smoothlab_report_json(const smoothlab_report* report);
SMOOTHLAB_API const char* smoothlab_report_error(const smoothlab_report* report);
SMOOTHLAB_API double smoothlab_report_wall_time(const smoothlab_report* report);
SMOOTHLAB_API smoothlab_status smoothlab_report_write(const smoothlab_report* report, const char* directory);
SMOOTHLAB_API void smoothlab_report_free(smoothlab_report* report);

/* Load, run and write in one call. config_path may be NULL. Nothing is written
 * on CONFIG_ERROR. */
SMOOTHLAB_API smoothlab_status smoothlab_run(const char* verb, const char* config_path,
                                             const smoothlab_options* options, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* SMOOTHLAB_H */
