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

#include "common.hpp"

#include <smoothlab/parallel.hpp>

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace smoothlab {

using harness::json;

struct Scenario::Plan {
  std::string verb;
  std::string preset;
  json config;
  harness::VerbBody body;
};

namespace {

json number_json(double x) {
  if (std::isfinite(x)) return x;
  return harness::fmt(x);
}

double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

// NaN and infinities would serialize as null; keep them readable.
json sanitize(const json& j) {
  if (j.is_number_float()) return number_json(j.get<double>());
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = sanitize(*it);
    return out;
  }
  return j;
}

std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

harness::VerbPlanner planner(const std::string& verb) {
  if (verb == "identity") return harness::plan_identity;
  if (verb == "apriori") return harness::plan_apriori;
  if (verb == "best-constant") return harness::plan_best_constant;
  if (verb == "compare") return harness::plan_compare;
  if (verb == "powers") return harness::plan_powers;
  if (verb == "perturb") return harness::plan_perturb;
  if (verb == "lap-scan") return harness::plan_lap_scan;
  return nullptr;
}

json fingerprint() {
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
  return {{"library", "smoothlab 0.1.0"}, {"compiler", __VERSION__}, {"eigen", eigen.str()},
          {"cplusplus", static_cast<long>(__cplusplus)}};
}

}  // namespace

const std::vector<std::string>& scenario_verbs() {
  static const std::vector<std::string> v{"identity", "apriori", "best-constant", "compare",
                                          "powers",   "perturb", "lap-scan"};
  return v;
}

json preset_catalog() {
  json out = json::array();
  for (const auto& p : harness::presets())
    out.push_back({{"name", p.name}, {"verb", p.verb}, {"description", p.description}, {"config", p.config}});
  return out;
}

Scenario Scenario::load(const std::string& verb, const std::string& config_text, const RunOverrides& overrides,
                        const std::string& base_dir) {
  const auto plan_fn = planner(verb);
  if (!plan_fn) fail(ErrorCode::Configuration, "unknown verb '" + verb + "'");

  json user = json::object();
  if (!config_text.empty()) {
    try {
      user = json::parse(config_text);
    } catch (const json::parse_error& e) {
      // nlohmann reports the byte just past the offending token.
      const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
      std::string msg = e.what();
      // Drop nlohmann's own "[json.exception...] parse error at ...:" prefix.
      if (auto p = msg.find("parse error"); p != std::string::npos)
        if (auto q = msg.find(": ", p); q != std::string::npos) msg = msg.substr(q + 2);
      fail(ErrorCode::Configuration, "config parse error at " + position(config_text, byte) + ": " + msg);
    }
    if (!user.is_object()) fail(ErrorCode::Configuration, "config must be a JSON object");
    if (!user.contains("schema") || user["schema"] != kConfigSchema)
      fail(ErrorCode::Configuration, std::string("config field 'schema': expected \"") + kConfigSchema + "\"");
    const json::json_pointer file("/model/potential/file");
    if (!base_dir.empty() && user.contains(file) && user[file].is_string()) {
      const std::filesystem::path f = user[file].get<std::string>();
      if (f.is_relative()) user[file] = (std::filesystem::path(base_dir) / f).lexically_normal().string();
    }
  }
  if (user.contains("verb") && user["verb"] != verb)
    fail(ErrorCode::Configuration, "config field 'verb': config is for '" + user["verb"].dump() +
                                       "' but the command is '" + verb + "'");

  std::string preset_name = harness::default_preset(verb);
  if (user.contains("preset")) {
    if (!user["preset"].is_string()) fail(ErrorCode::Configuration, "config field 'preset': expected a string");
    preset_name = user["preset"].get<std::string>();
  }
  const harness::Preset* preset = harness::find_preset(preset_name);
  if (!preset) fail(ErrorCode::Configuration, "config field 'preset': unknown preset '" + preset_name + "'");
  if (preset->verb != verb)
    fail(ErrorCode::Configuration, "config field 'preset': '" + preset_name + "' runs with verb '" + preset->verb + "'");

  json effective = preset->config;
  effective.merge_patch(user);
  effective["preset"] = preset_name;
  effective["verb"] = verb;

  auto plan = std::make_shared<Plan>();
  plan->verb = verb;
  plan->preset = preset_name;
  try {
    harness::Reader r(effective);
    for (const char* k : {"schema", "preset", "verb", "seed", "tolerance_scale"}) r.mark(k);
    harness::Common common;
    if (r.has("seed")) common.seed = r.u64("seed");
    if (overrides.seed) common.seed = *overrides.seed;
    if (r.has("tolerance_scale")) common.tolerance_scale = r.positive("tolerance_scale");
    if (!(overrides.tolerance_scale > 0.0) || !std::isfinite(overrides.tolerance_scale))
      fail(ErrorCode::Configuration, "tolerance scale must be a positive number");
    common.tolerance_scale *= overrides.tolerance_scale;
    effective["seed"] = common.seed;
    effective["tolerance_scale"] = common.tolerance_scale;
    plan->body = plan_fn(r, common);
    r.reject_unused(user);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Configuration) throw;
    fail(ErrorCode::Configuration, std::string("invalid scenario: ") + e.what());
  } catch (const json::exception& e) {
    fail(ErrorCode::Configuration, std::string("invalid config: ") + e.what());
  }
  plan->config = effective;
  Scenario s;
  s.plan_ = plan;
  return s;
}

Scenario Scenario::load_file(const std::string& verb, const std::string& path, const RunOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Configuration, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.empty()) fail(ErrorCode::Configuration, "config file '" + path + "' is empty");
  return load(verb, text, overrides, std::filesystem::path(path).parent_path().string());
}

const std::string& Scenario::verb() const { return plan_->verb; }
const std::string& Scenario::preset() const { return plan_->preset; }
const json& Scenario::config() const { return plan_->config; }

EstimateReport Scenario::run() const {
  const auto start = std::chrono::steady_clock::now();
  EstimateReport rep;
  rep.verb = plan_->verb;
  rep.preset = plan_->preset;
  rep.config = plan_->config;
  try {
    plan_->body(rep);
  } catch (const Error& e) {
    rep.error = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    rep.error = std::string("internal: ") + e.what();
  }
  if (!rep.error.empty()) rep.checks.push_back(CheckRecord{"run", 0.0, 0.0, 1.0, 0.0, false, rep.error});
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.threads = thread_count();
  return rep;
}

// ---------------------------------------------------------------------------

bool EstimateReport::passed() const {
  if (!error.empty() || checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

json EstimateReport::to_json() const {
  json checks_j = json::array();
  for (const auto& c : checks)
    checks_j.push_back({{"name", c.name},
                        {"value", number_json(c.value)},
                        {"reference", number_json(c.reference)},
                        {"metric", number_json(c.metric)},
                        {"tolerance", number_json(c.tolerance)},
                        {"pass", c.pass},
                        {"note", c.note}});
  json names = json::array();
  for (const auto& a : artifacts) names.push_back(a.name);
  return {{"schema", kReportSchema}, {"verb", verb},       {"preset", preset},
          {"config", config},        {"checks", checks_j}, {"summary", sanitize(summary)},
          {"error", error},          {"passed", passed()}, {"artifacts", names},
          {"fingerprint", fingerprint()}};
}

EstimateReport EstimateReport::from_json(const json& j) {
  EstimateReport r;
  try {
    if (j.at("schema") != kReportSchema) fail(ErrorCode::Configuration, "not a smoothlab report");
    r.verb = j.at("verb").get<std::string>();
    r.preset = j.at("preset").get<std::string>();
    r.config = j.at("config");
    for (const auto& c : j.at("checks"))
      r.checks.push_back(CheckRecord{c.at("name").get<std::string>(), number_from(c.at("value")),
                                     number_from(c.at("reference")), number_from(c.at("metric")),
                                     number_from(c.at("tolerance")), c.at("pass").get<bool>(),
                                     c.at("note").get<std::string>()});
    r.summary = j.at("summary");
    r.error = j.at("error").get<std::string>();
    for (const auto& n : j.at("artifacts")) r.artifacts.push_back({n.get<std::string>(), {}});
  } catch (const json::exception& e) {
    fail(ErrorCode::Configuration, std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string EstimateReport::report_text() const { return to_json().dump(2) + "\n"; }

std::string EstimateReport::metadata_text() const {
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  const json m{{"wall_time_seconds", wall_time}, {"threads", threads}, {"timestamp_utc", stamp}};
  return m.dump(2) + "\n";
}

void write_outputs(const EstimateReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory '" + dir + "': " + ec.message());
  auto put = [&](const std::string& name, const std::string& content) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) fail(ErrorCode::Io, "cannot write '" + p.string() + "'");
  };
  for (const auto& a : report.artifacts) put(a.name, a.content);
  put("report.json", report.report_text());
  put("metadata.json", report.metadata_text());
}

}  // namespace smoothlab
