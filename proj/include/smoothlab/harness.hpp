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

// Scenario runner behind the CLI and the C API.
//
// A scenario is a verb plus a JSON config (schema "smoothlab-config/1"),
// optionally layered on a named preset. Loading validates everything that can
// be validated without running numerics; a loaded scenario only fails through
// its checks or through numerical errors. Reports and artifacts are built in
// memory and written in one pass, so a config error leaves nothing on disk.

#pragma once

#include <smoothlab/error.hpp>

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace smoothlab {

inline constexpr const char* kConfigSchema = "smoothlab-config/1";
inline constexpr const char* kReportSchema = "smoothlab-report/1";

struct CheckRecord {
  std::string name;
  double value = 0.0;      // measured quantity (lhs, constant, slope, ...)
  double reference = 0.0;  // what it is compared with (rhs, bound, target)
  double metric = 0.0;     // residual, gap or margin that the tolerance applies to
  double tolerance = 0.0;
  bool pass = false;
  std::string note;

  bool operator==(const CheckRecord&) const = default;
};

struct Artifact {
  std::string name;     // file name inside the output directory
  std::string content;
};

struct EstimateReport {
  std::string verb;
  std::string preset;
  nlohmann::json config;   // effective config after preset, overrides and CLI flags
  std::vector<CheckRecord> checks;
  nlohmann::json summary = nlohmann::json::object();
  std::string error;       // numerical failure surfaced from a module, empty otherwise
  std::vector<Artifact> artifacts;
  // Not part of report.json: written to metadata.json.
  double wall_time = 0.0;
  std::size_t threads = 1;

  bool passed() const;
  nlohmann::json to_json() const;
  static EstimateReport from_json(const nlohmann::json& j);
  /// report.json contents; deterministic for a fixed config and seed.
  std::string report_text() const;
  std::string metadata_text() const;
};

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  double tolerance_scale = 1.0;
};

class Scenario {
 public:
  /// `config_text` may be empty (the verb's default preset). Throws Error
  /// with ErrorCode::Configuration on any parse or validation problem.
  /// Relative potential file paths resolve against `base_dir` when it is given.
  static Scenario load(const std::string& verb, const std::string& config_text, const RunOverrides& overrides = {},
                       const std::string& base_dir = {});
  static Scenario load_file(const std::string& verb, const std::string& path, const RunOverrides& overrides = {});

  const std::string& verb() const;
  const std::string& preset() const;
  const nlohmann::json& config() const;

  /// Runs the verb. Module errors become a failed report with `error` set.
  EstimateReport run() const;

  struct Plan;

 private:
  std::shared_ptr<const Plan> plan_;
};

/// Writes every artifact, report.json and metadata.json into `dir` (created if needed).
void write_outputs(const EstimateReport& report, const std::string& dir);

const std::vector<std::string>& scenario_verbs();
/// Catalog of presets: name, verb, description and full default config.
nlohmann::json preset_catalog();

}  // namespace smoothlab
