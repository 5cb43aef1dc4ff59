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

#include <smoothlab/harness.hpp>
#include <smoothlab/parallel.hpp>

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

using namespace smoothlab;

namespace {

const std::string kMatrix = R"({"schema": "smoothlab-config/1", "preset": "matrix-perturbation"})";
const std::string kSmallCompare = R"({"schema": "smoothlab-config/1", "model": {"x_max": 10, "points": 128},
  "batch": {"count": 6}, "lambda_grid": {"points": 32}})";

std::string config_error(const std::string& verb, const std::string& text) {
  try {
    Scenario::load(verb, text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Configuration);
    return e.what();
  }
  FAIL("no config error for " << text);
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("parse errors carry line and column") {
  const auto msg = config_error("compare", "{\n  \"schema\": \"smoothlab-config/1\",\n  \"model\": {,}\n}");
  CHECK(contains(msg, "line 3"));
  CHECK(contains(msg, "column"));
  CHECK(contains(config_error("compare", "[1, 2]"), "object"));
}

TEST_CASE("schema, preset and key validation") {
  CHECK(contains(config_error("compare", R"({"model": {"points": 64}})"), "schema"));
  CHECK(contains(config_error("compare", R"({"schema": "smoothlab-config/0"})"), "schema"));
  CHECK(contains(config_error("compare", R"({"schema": "smoothlab-config/1", "preset": "nope"})"), "unknown preset"));
  CHECK(contains(config_error("identity", kMatrix), "runs with verb 'perturb'"));

  const auto unknown = config_error("compare", R"({"schema": "smoothlab-config/1", "comparsion": {"slack": 0.1}})");
  CHECK(contains(unknown, "comparsion"));
  CHECK(contains(config_error("compare", R"({"schema": "smoothlab-config/1", "identiy": {}})"), "identiy"));
  CHECK(contains(config_error("compare", R"({"schema": "smoothlab-config/1", "model": {"points": -4}})"),
                 "model.points"));
  CHECK(contains(config_error("compare", R"({"schema": "smoothlab-config/1", "spectral": {"sigma": "λ^"}})"),
                 "column 3"));

  // null removes a preset key without tripping the unused-key check
  const auto s = Scenario::load("compare", R"({"schema": "smoothlab-config/1", "comparison": {"inflation": null}})");
  CHECK_FALSE(s.config()["comparison"].contains("inflation"));
}

TEST_CASE("empty config selects the verb's default preset") {
  const auto s = Scenario::load("perturb", "");
  CHECK(s.preset() == "schrodinger-potential");
  CHECK(s.config()["preset"] == "schrodinger-potential");
  CHECK(s.verb() == "perturb");
}

TEST_CASE("seed and tolerance overrides") {
  const auto hex = Scenario::load("perturb", R"({"schema": "smoothlab-config/1", "preset": "matrix-perturbation",
    "seed": "0x10"})");
  CHECK(hex.config()["seed"] == 16);
  RunOverrides o;
  o.seed = 77;
  o.tolerance_scale = 4.0;
  const auto s = Scenario::load("perturb", kMatrix, o);
  CHECK(s.config()["seed"] == 77);
  CHECK(s.config()["tolerance_scale"] == 4.0);

  const auto base = Scenario::load("perturb", kMatrix).run();
  const auto wide = s.run();
  REQUIRE(base.checks.size() == wide.checks.size());
  for (std::size_t i = 0; i < base.checks.size(); ++i)
    CHECK(wide.checks[i].tolerance == doctest::Approx(4.0 * base.checks[i].tolerance));
  CHECK(contains(config_error("perturb", R"({"schema": "smoothlab-config/1", "preset": "matrix-perturbation",
    "tolerance_scale": 0})"), "tolerance_scale"));
}

TEST_CASE("report json round trip") {
  auto rep = Scenario::load("perturb", kMatrix).run();
  REQUIRE(rep.passed());
  CHECK_FALSE(rep.artifacts.empty());
  rep.checks.push_back({"odd", std::numeric_limits<double>::infinity(), std::nan(""), -1.0, 0.5, false, "x"});
  const auto back = EstimateReport::from_json(nlohmann::json::parse(rep.report_text()));
  CHECK(back.verb == rep.verb);
  CHECK(back.preset == rep.preset);
  CHECK(back.config == rep.config);
  REQUIRE(back.checks.size() == rep.checks.size());
  for (std::size_t i = 0; i + 1 < rep.checks.size(); ++i) CHECK(back.checks[i] == rep.checks[i]);
  CHECK(std::isinf(back.checks.back().value));
  CHECK(std::isnan(back.checks.back().reference));
  CHECK_FALSE(back.passed());
  CHECK(back.report_text() == rep.report_text());
}

TEST_CASE("reports do not depend on the thread count") {
  set_thread_count(1);
  const auto a = Scenario::load("compare", kSmallCompare).run();
  set_thread_count(3);
  const auto b = Scenario::load("compare", kSmallCompare).run();
  set_thread_count(1);
  CHECK(a.report_text() == b.report_text());
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    CHECK(a.artifacts[i].name == b.artifacts[i].name);
    CHECK(a.artifacts[i].content == b.artifacts[i].content);
  }
}

TEST_CASE("outputs land in the directory") {
  namespace fs = std::filesystem;
  const auto rep = Scenario::load("perturb", kMatrix).run();
  const fs::path dir = fs::temp_directory_path() / "smoothlab-test-harness";
  fs::remove_all(dir);
  write_outputs(rep, (dir / "nested").string());
  CHECK(fs::exists(dir / "nested" / "report.json"));
  CHECK(fs::exists(dir / "nested" / "metadata.json"));
  for (const auto& art : rep.artifacts) {
    std::ifstream in(dir / "nested" / art.name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == art.content);
  }
  fs::remove_all(dir);
}

TEST_CASE("preset catalog") {
  const auto cat = preset_catalog();
  std::set<std::string> names;
  for (const auto& p : cat) {
    names.insert(p["name"].get<std::string>());
    CHECK(p["config"]["schema"] == kConfigSchema);
    // every preset loads under its own verb
    CHECK_NOTHROW(Scenario::load(p["verb"].get<std::string>(),
                                 R"({"schema": "smoothlab-config/1", "preset": ")" + p["name"].get<std::string>() + "\"}"));
  }
  for (const char* n : {"free-identity", "free-best-constant", "fractional-laplacian", "stark-fd",
                        "schrodinger-potential", "schrodinger-lap", "matrix-perturbation"})
    CHECK(names.count(n) == 1);
  for (const auto& v : scenario_verbs()) CHECK_NOTHROW(Scenario::load(v, ""));
}

TEST_CASE("potential files resolve against the config directory") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "smoothlab-test-potential";
  fs::remove_all(dir);
  fs::create_directories(dir / "pot");
  {
    std::ofstream p(dir / "pot" / "v.txt");
    p << "# x V\n-1 0\n0 0.5\n1 0\n";
    std::ofstream c(dir / "lap.json");
    c << R"({"schema": "smoothlab-config/1", "preset": "schrodinger-lap",
      "model": {"potential": {"expression": null, "file": "pot/v.txt"}}})";
    std::ofstream b(dir / "broken.txt");
    b << "0 1\n2\n";
    std::ofstream cb(dir / "broken.json");
    cb << R"({"schema": "smoothlab-config/1", "preset": "schrodinger-lap",
      "model": {"potential": {"expression": null, "file": "broken.txt"}}})";
  }
  const auto s = Scenario::load_file("lap-scan", (dir / "lap.json").string());
  CHECK(fs::path(s.config()["model"]["potential"]["file"].get<std::string>()) == (dir / "pot" / "v.txt"));
  try {
    Scenario::load_file("lap-scan", (dir / "broken.json").string());
    FAIL("broken potential file accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Configuration);
    CHECK(contains(e.what(), ":2: expected two columns"));
  }
  fs::remove_all(dir);
}

TEST_CASE("artifact headers match the shipped output schema") {
  std::ifstream in(SMOOTHLAB_SCHEMA_DIR "/outputs.json");
  REQUIRE(in.good());
  const auto schema = nlohmann::json::parse(in)["files"];
  auto header = [](const std::string& content) { return content.substr(0, content.find('\n')); };
  std::vector<EstimateReport> reports;
  reports.push_back(Scenario::load("perturb", kMatrix).run());
  reports.push_back(Scenario::load("compare", kSmallCompare).run());
  reports.push_back(Scenario::load("powers", R"({"schema": "smoothlab-config/1", "model": {"points": 128},
    "batch": {"count": 4}, "lambda_grid": {"points": 32}, "powers": {"alphas": [2]}})").run());
  for (const auto& rep : reports) {
    REQUIRE_FALSE(rep.artifacts.empty());
    for (const auto& art : rep.artifacts) {
      INFO(art.name);
      REQUIRE(schema.contains(art.name));
      std::string expected;
      const bool is_dat = art.name.size() > 4 && art.name.substr(art.name.size() - 4) == ".dat";
      for (const auto& col : schema[art.name]["columns"]) {
        if (!expected.empty()) expected += is_dat ? " " : ",";
        expected += col["name"].get<std::string>();
      }
      CHECK(header(art.content) == (is_dat ? "# " + expected : expected));
    }
  }
  // every file the verbs can write is documented
  std::ifstream src(SMOOTHLAB_SOURCE_DIR "/src/harness/verbs.cpp");
  std::stringstream ss;
  ss << src.rdbuf();
  const std::string text = ss.str();
  std::size_t pos = 0;
  while ((pos = text.find("artifacts.push_back({\"", pos)) != std::string::npos) {
    pos += 22;
    const std::string name = text.substr(pos, text.find('"', pos) - pos);
    CHECK_MESSAGE(schema.contains(name), name);
  }
}
