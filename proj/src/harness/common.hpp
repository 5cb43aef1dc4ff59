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

// Pieces shared by the scenario verbs: strict config reading, model and
// spectral-function construction, check records and text tables.

#pragma once

#include <smoothlab/core_spaces.hpp>
#include <smoothlab/harness.hpp>
#include <smoothlab/models.hpp>

#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace smoothlab::harness {

using json = nlohmann::json;

/// Typed access to the effective config. Every read is recorded so that keys
/// the user wrote but no verb consumed can be reported as errors.
class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {}

  bool has(const std::string& path) const;
  double number(const std::string& path, double lo = -std::numeric_limits<double>::infinity(),
                double hi = std::numeric_limits<double>::infinity());
  double positive(const std::string& path);
  std::size_t count(const std::string& path, std::size_t lo = 0, std::size_t hi = std::size_t(1) << 40);
  std::uint64_t u64(const std::string& path);
  std::string string(const std::string& path);
  bool boolean(const std::string& path);
  std::vector<double> numbers(const std::string& path);
  /// Two-element array [lo, hi] with lo < hi.
  Interval interval(const std::string& path);

  void mark(const std::string& path) { used_.insert(path); }
  /// Throws for any key of `user` that no read touched.
  void reject_unused(const json& user) const;

  [[noreturn]] static void error(const std::string& path, const std::string& what);

 private:
  const json& at(const std::string& path);
  const json* find(const std::string& path) const;
  void walk(const json& node, const std::string& prefix) const;

  const json& root_;
  std::set<std::string> used_;
};

struct FunctionSpec {
  double center = 0.0, width = 1.0, frequency = 0.0;
};

struct ModelSpec {
  std::string kind;
  double x_max = 10.0;
  std::size_t points = 256;
  double field = 1.0;
  double epsilon = 0.0;          // 0: default width for matrix models
  std::size_t dimension = 64;    // generic-hermitian
  std::optional<PotentialSpec> potential;
  std::string potential_source;
};

struct Common {
  std::uint64_t seed = 0xC0FFEE;
  double tolerance_scale = 1.0;
  double tol(double t) const { return t * tolerance_scale; }
};

ModelSpec read_model(Reader& r, const std::string& prefix = "model");
SpatialGrid model_grid(const ModelSpec& m, std::optional<std::size_t> points = {}, std::optional<double> x_max = {});
OperatorModel build_model(const ModelSpec& m, std::uint64_t seed, std::optional<std::size_t> points = {},
                          std::optional<double> x_max = {});
CMatrix seeded_hermitian(std::uint64_t seed, Eigen::Index n);

struct SpectralSpec {
  std::string sigma, a;
  Interval window;
  double breakpoint_margin = 1e-6;
  SpectralFunction sf;
};
SpectralSpec read_spectral(Reader& r, const std::string& prefix = "spectral");

FunctionSpec read_function(Reader& r, const std::string& path);
GridFunction sample_function(const FunctionSpec& f, const SpatialGrid& g, const std::string& path);

CheckRecord upper_check(const std::string& name, double value, double bound, double tol, std::string note = {});
CheckRecord residual_check(const std::string& name, double value, double reference, double residual, double tol,
                           std::string note = {});
CheckRecord range_check(const std::string& name, double value, double lo, double hi, std::string note = {});
CheckRecord flag_check(const std::string& name, bool ok, std::string note = {});

/// Shortest round-trip decimal form; inf and nan spelled out.
std::string fmt(double x);

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void row(std::vector<std::string> cells);
  std::string csv() const;
 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Two-column plot data with a '#' header line.
std::string dat(const std::string& x_name, const std::string& y_name, const std::vector<double>& x,
                const std::vector<double>& y);

using VerbBody = std::function<void(EstimateReport&)>;
using VerbPlanner = VerbBody (*)(Reader&, const Common&);

VerbBody plan_identity(Reader& r, const Common& c);
VerbBody plan_apriori(Reader& r, const Common& c);
VerbBody plan_best_constant(Reader& r, const Common& c);
VerbBody plan_compare(Reader& r, const Common& c);
VerbBody plan_powers(Reader& r, const Common& c);
VerbBody plan_perturb(Reader& r, const Common& c);
VerbBody plan_lap_scan(Reader& r, const Common& c);

/// Preset configs keyed by name, with verb and description.
struct Preset {
  std::string name;
  std::string verb;
  std::string description;
  json config;
};
const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);
/// Default preset name for a verb.
std::string default_preset(const std::string& verb);

}  // namespace smoothlab::harness
