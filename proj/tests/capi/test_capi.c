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

// Exercises the C API from C, linking only the shared library.

#include <smoothlab/smoothlab.h>

#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>
#include <unistd.h>

static int failures = 0;

#define EXPECT(cond)                                                 \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static const char* matrix = "{\"schema\": \"smoothlab-config/1\", \"preset\": \"matrix-perturbation\"}";

static void test_errors(void) {
  smoothlab_scenario* s = NULL;
  EXPECT(smoothlab_scenario_load("perturb", "{\"schema\": \"smoothlab-config/1\", \"spectral\": {\"sigma\": 1}",
                                 NULL, &s) == SMOOTHLAB_CONFIG_ERROR);
  EXPECT(s == NULL);
  EXPECT(strstr(smoothlab_last_error(), "line") != NULL);

  EXPECT(smoothlab_scenario_load("no-such-verb", matrix, NULL, &s) == SMOOTHLAB_CONFIG_ERROR);
  EXPECT(smoothlab_scenario_load(NULL, matrix, NULL, &s) == SMOOTHLAB_INVALID_ARGUMENT);
  EXPECT(smoothlab_scenario_load("perturb", matrix, NULL, NULL) == SMOOTHLAB_INVALID_ARGUMENT);
  EXPECT(smoothlab_scenario_run(NULL, NULL) == SMOOTHLAB_INVALID_ARGUMENT);
  EXPECT(smoothlab_set_threads(0) == SMOOTHLAB_INVALID_ARGUMENT);
  EXPECT(smoothlab_report_check_count(NULL) == 0);
  EXPECT(strlen(smoothlab_last_error()) > 0);
  EXPECT(strcmp(smoothlab_status_name(SMOOTHLAB_CONFIG_ERROR), smoothlab_status_name(SMOOTHLAB_OK)) != 0);
  smoothlab_scenario_free(NULL);
  smoothlab_report_free(NULL);
}

static void test_run(void) {
  smoothlab_scenario* s = NULL;
  smoothlab_options opt = {1, 42u, 1.0};
  EXPECT(smoothlab_scenario_load("perturb", matrix, &opt, &s) == SMOOTHLAB_OK);
  if (!s) return;
  EXPECT(strstr(smoothlab_scenario_config_json(s), "\"seed\": 42") != NULL);

  smoothlab_report* r = NULL;
  EXPECT(smoothlab_scenario_run(s, &r) == SMOOTHLAB_OK);
  if (r) {
    EXPECT(smoothlab_report_passed(r) == 1);
    size_t n = smoothlab_report_check_count(r);
    EXPECT(n >= 2);
    for (size_t i = 0; i < n; ++i) {
      smoothlab_check c;
      EXPECT(smoothlab_report_check(r, i, &c) == SMOOTHLAB_OK);
      EXPECT(c.pass == 1);
      EXPECT(c.name != NULL && strlen(c.name) > 0);
      EXPECT(c.metric <= c.tolerance);
    }
    smoothlab_check c;
    EXPECT(smoothlab_report_check(r, n, &c) == SMOOTHLAB_INVALID_ARGUMENT);
    EXPECT(strstr(smoothlab_report_json(r), "smoothlab-report/1") != NULL);
    EXPECT(strlen(smoothlab_report_error(r)) == 0);
    EXPECT(smoothlab_report_wall_time(r) >= 0.0);

    char dir[256];
    snprintf(dir, sizeof dir, "/tmp/smoothlab-capi-%ld", (long)getpid());
    EXPECT(smoothlab_report_write(r, dir) == SMOOTHLAB_OK);
    char path[320];
    struct stat st;
    snprintf(path, sizeof path, "%s/report.json", dir);
    EXPECT(stat(path, &st) == 0);
    char cmd[300];
    snprintf(cmd, sizeof cmd, "rm -rf %s", dir);
    EXPECT(system(cmd) == 0);
    smoothlab_report_free(r);
  }
  smoothlab_scenario_free(s);
}

static void test_presets(void) {
  const char* p = smoothlab_presets_json();
  EXPECT(p != NULL && p[0] == '[');
  EXPECT(strstr(p, "\"stark-fd\"") != NULL);
  EXPECT(strstr(p, "\"fractional-laplacian\"") != NULL);
  EXPECT(strlen(smoothlab_version()) > 0);
}

int main(void) {
  EXPECT(smoothlab_set_threads(1) == SMOOTHLAB_OK);
  test_errors();
  test_run();
  test_presets();
  if (failures) fprintf(stderr, "%d expectation(s) failed\n", failures);
  else printf("C API: all expectations met\n");
  return failures ? 1 : 0;
}
