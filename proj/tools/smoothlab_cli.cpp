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

// smoothlab command line: one subcommand per scenario verb, plus list-presets.
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
// 3 output could not be written.

#include <smoothlab/smoothlab.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace {

struct Flags {
  std::string config;
  std::string out = "smoothlab-out";
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  double tolerance_scale = 1.0;
};

std::size_t thread_default() {
  if (const char* env = std::getenv("SMOOTHLAB_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return n;
    std::fprintf(stderr, "smoothlab: ignoring SMOOTHLAB_THREADS='%s'\n", env);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_verb(const std::string& verb, const Flags& f, bool seed_given) {
  if (smoothlab_set_threads(f.threads ? f.threads : thread_default()) != SMOOTHLAB_OK) {
    std::fprintf(stderr, "smoothlab: %s\n", smoothlab_last_error());
    return SMOOTHLAB_CONFIG_ERROR;
  }
  smoothlab_options opts{seed_given ? 1 : 0, f.seed, f.tolerance_scale};
  smoothlab_scenario* scenario = nullptr;
  smoothlab_status st = f.config.empty() ? smoothlab_scenario_load(verb.c_str(), nullptr, &opts, &scenario)
                                         : smoothlab_scenario_load_file(verb.c_str(), f.config.c_str(), &opts, &scenario);
  if (st != SMOOTHLAB_OK) {
    std::fprintf(stderr, "smoothlab: %s\n", smoothlab_last_error());
    smoothlab_scenario_free(scenario);
    return SMOOTHLAB_CONFIG_ERROR;
  }
  smoothlab_report* report = nullptr;
  st = smoothlab_scenario_run(scenario, &report);
  smoothlab_scenario_free(scenario);
  if (!report) {
    std::fprintf(stderr, "smoothlab: %s\n", smoothlab_last_error());
    return SMOOTHLAB_CHECK_FAILED;
  }
  const std::size_t n = smoothlab_report_check_count(report);
  for (std::size_t i = 0; i < n; ++i) {
    smoothlab_check c;
    smoothlab_report_check(report, i, &c);
    std::printf("%s  %-34s value=%.6g reference=%.6g metric=%.3g tolerance=%.3g\n", c.pass ? "PASS" : "FAIL",
                c.name, c.value, c.reference, c.metric, c.tolerance);
  }
  if (*smoothlab_report_error(report)) std::fprintf(stderr, "smoothlab: %s\n", smoothlab_report_error(report));
  const int code = smoothlab_report_passed(report) ? 0 : 1;
  if (smoothlab_report_write(report, f.out.c_str()) != SMOOTHLAB_OK) {
    std::fprintf(stderr, "smoothlab: %s\n", smoothlab_last_error());
    smoothlab_report_free(report);
    return 3;
  }
  std::printf("%s (%.1f s), outputs in %s\n", code == 0 ? "all checks passed" : "some checks failed",
              smoothlab_report_wall_time(report), f.out.c_str());
  smoothlab_report_free(report);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smoothlab: numerical checks of smoothing and spacetime estimates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", smoothlab_version());

  const std::vector<std::pair<std::string, std::string>> verbs{
      {"identity", "time side against spectral side of the evolution identities"},
      {"apriori", "a priori spacetime bound and density decay"},
      {"best-constant", "sup of the weighted density with wave-packet lower bounds"},
      {"compare", "comparison of two (sigma, a) triples"},
      {"powers", "time maps lambda^alpha with the transferred weight"},
      {"perturb", "perturbed densities and smoothing constants"},
      {"lap-scan", "limiting absorption scan of (I + V R)^{-1}"}};

  Flags flags;
  std::string chosen;
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON config (schema smoothlab-config/1); default: the verb's preset")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--seed", flags.seed, "seed override (unsigned 64-bit)");
    sub->add_option("--threads", flags.threads, "worker threads (default: SMOOTHLAB_THREADS, then all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tolerance-scale", flags.tolerance_scale, "multiply every check tolerance")
        ->check(CLI::PositiveNumber);
    sub->callback([&chosen, n = name] { chosen = n; });
    subs.push_back(sub);
  }
  app.add_subcommand("list-presets", "print the preset catalog as JSON")->callback([&chosen] {
    chosen = "list-presets";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : SMOOTHLAB_CONFIG_ERROR;
  }

  if (chosen == "list-presets") {
    std::printf("%s\n", smoothlab_presets_json());
    return 0;
  }
  bool seed_given = false;
  for (CLI::App* sub : subs)
    if (sub->parsed()) seed_given = sub->count("--seed") > 0;
  return run_verb(chosen, flags, seed_given);
}
