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

#include <smoothlab/error.hpp>
#include <smoothlab/harness.hpp>
#include <smoothlab/parallel.hpp>
#include <smoothlab/smoothlab.h>

#include <exception>
#include <new>
#include <string>

struct smoothlab_scenario {
  smoothlab::Scenario scenario;
  std::string config_json;
};

struct smoothlab_report {
  smoothlab::EstimateReport report;
  std::string json;
};

namespace {

thread_local std::string last_error;

smoothlab_status status_of(smoothlab::ErrorCode code) {
  using smoothlab::ErrorCode;
  switch (code) {
    case ErrorCode::Configuration: return SMOOTHLAB_CONFIG_ERROR;
    case ErrorCode::Io: return SMOOTHLAB_IO_ERROR;
    case ErrorCode::InvalidArgument: return SMOOTHLAB_INVALID_ARGUMENT;
    default: return SMOOTHLAB_NUMERIC_ERROR;
  }
}

smoothlab_status set_error(smoothlab_status s, const std::string& what) {
  last_error = what;
  return s;
}

// Runs fn, translating exceptions into a status and last_error.
template <class Fn>
smoothlab_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const smoothlab::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SMOOTHLAB_NUMERIC_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SMOOTHLAB_NUMERIC_ERROR, e.what());
  }
}

smoothlab::RunOverrides overrides(const smoothlab_options* o) {
  smoothlab::RunOverrides r;
  if (!o) return r;
  if (o->has_seed) r.seed = o->seed;
  if (o->tolerance_scale != 0.0) r.tolerance_scale = o->tolerance_scale;
  return r;
}

}  // namespace

extern "C" {

const char* smoothlab_version(void) { return "0.1.0"; }

const char* smoothlab_last_error(void) { return last_error.c_str(); }

const char* smoothlab_status_name(smoothlab_status status) {
  switch (status) {
    case SMOOTHLAB_OK: return "ok";
    case SMOOTHLAB_CHECK_FAILED: return "check failed";
    case SMOOTHLAB_CONFIG_ERROR: return "configuration error";
    case SMOOTHLAB_NUMERIC_ERROR: return "numerical error";
    case SMOOTHLAB_IO_ERROR: return "i/o error";
    case SMOOTHLAB_INVALID_ARGUMENT: return "invalid argument";
  }
  return "unknown";
}

smoothlab_status smoothlab_set_threads(size_t n) {
  if (n == 0) return set_error(SMOOTHLAB_INVALID_ARGUMENT, "thread count must be positive");
  smoothlab::set_thread_count(n);
  return SMOOTHLAB_OK;
}

const char* smoothlab_presets_json(void) {
  static const std::string text = smoothlab::preset_catalog().dump(2);
  return text.c_str();
}

smoothlab_status smoothlab_scenario_load(const char* verb, const char* config_json, const smoothlab_options* options,
                                         smoothlab_scenario** out) {
  if (!verb || !out) return set_error(SMOOTHLAB_INVALID_ARGUMENT, "verb and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    auto s = smoothlab::Scenario::load(verb, config_json ? config_json : "", overrides(options));
    *out = new smoothlab_scenario{s, s.config().dump(2)};
    return SMOOTHLAB_OK;
  });
}

smoothlab_status smoothlab_scenario_load_file(const char* verb, const char* path, const smoothlab_options* options,
                                              smoothlab_scenario** out) {
  if (!verb || !path || !out) return set_error(SMOOTHLAB_INVALID_ARGUMENT, "verb, path and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    auto s = smoothlab::Scenario::load_file(verb, path, overrides(options));
    *out = new smoothlab_scenario{s, s.config().dump(2)};
    return SMOOTHLAB_OK;
  });
}

const char* smoothlab_scenario_config_json(const smoothlab_scenario* scenario) {
  return scenario ? scenario->config_json.c_str() : "";
}

void smoothlab_scenario_free(smoothlab_scenario* scenario) { delete scenario; }

smoothlab_status smoothlab_scenario_run(const smoothlab_scenario* scenario, smoothlab_report** out) {
  if (!scenario || !out) return set_error(SMOOTHLAB_INVALID_ARGUMENT, "scenario and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    auto* r = new smoothlab_report{scenario->scenario.run(), {}};
    r->json = r->report.report_text();
    *out = r;
    if (!r->report.error.empty()) return set_error(SMOOTHLAB_NUMERIC_ERROR, r->report.error);
    return r->report.passed() ? SMOOTHLAB_OK : SMOOTHLAB_CHECK_FAILED;
  });
}

int smoothlab_report_passed(const smoothlab_report* report) { return report && report->report.passed() ? 1 : 0; }

size_t smoothlab_report_check_count(const smoothlab_report* report) {
  return report ? report->report.checks.size() : 0;
}

smoothlab_status smoothlab_report_check(const smoothlab_report* report, size_t index, smoothlab_check* out) {
  if (!report || !out) return set_error(SMOOTHLAB_INVALID_ARGUMENT, "report and out must not be NULL");
  if (index >= report->report.checks.size()) return set_error(SMOOTHLAB_INVALID_ARGUMENT, "check index out of range");
  const auto& c = report->report.checks[index];
  *out = smoothlab_check{c.name.c_str(), c.value, c.reference, c.metric, c.tolerance, c.pass ? 1 : 0, c.note.c_str()};
  return SMOOTHLAB_OK;
}

const char* smoothlab_report_json(const smoothlab_report* report) { return report ? report->json.c_str() : ""; }

const char* smoothlab_report_error(const smoothlab_report* report) {
  return report ? report->report.error.c_str() : "";
}

double smoothlab_report_wall_time(const smoothlab_report* report) { return report ? report->report.wall_time : 0.0; }

smoothlab_status smoothlab_report_write(const smoothlab_report* report, const char* directory) {
  if (!report || !directory) return set_error(SMOOTHLAB_INVALID_ARGUMENT, "report and directory must not be NULL");
  return guarded([&] {
    smoothlab::write_outputs(report->report, directory);
    return SMOOTHLAB_OK;
  });
}

void smoothlab_report_free(smoothlab_report* report) { delete report; }

smoothlab_status smoothlab_run(const char* verb, const char* config_path, const smoothlab_options* options,
                               const char* out_dir) {
  if (!verb || !out_dir) return set_error(SMOOTHLAB_INVALID_ARGUMENT, "verb and out_dir must not be NULL");
  smoothlab_scenario* scenario = nullptr;
  smoothlab_status st = config_path ? smoothlab_scenario_load_file(verb, config_path, options, &scenario)
                                    : smoothlab_scenario_load(verb, nullptr, options, &scenario);
  if (st != SMOOTHLAB_OK) return st;
  smoothlab_report* report = nullptr;
  st = smoothlab_scenario_run(scenario, &report);
  smoothlab_scenario_free(scenario);
  if (!report) return st;
  const std::string run_error = last_error;
  const smoothlab_status written = smoothlab_report_write(report, out_dir);
  smoothlab_report_free(report);
  if (written != SMOOTHLAB_OK) return written;
  if (!run_error.empty()) last_error = run_error;
  return st;
}

}  // extern "C"
