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

namespace smoothlab::harness {

namespace {

json free_model(double x_max, int points) { return {{"kind", "free"}, {"x_max", x_max}, {"points", points}}; }

json spectral(const char* sigma, const char* a, double lo, double hi) {
  return {{"sigma", sigma}, {"a", a}, {"window", {lo, hi}}};
}

json gaussian(double c, double w, double f) { return {{"center", c}, {"width", w}, {"frequency", f}}; }

const json kBump = {{"expression", "0.3 * exp(-x^2)"}};

std::vector<Preset> build() {
  std::vector<Preset> p;
  p.push_back({"free-identity", "identity",
               "Free line, sigma = lambda^(1/4), a = lambda: time side against spectral side for the scalar and "
               "weighted identities over three refinement levels.",
               {{"model", free_model(10.0, 128)},
                {"spectral", spectral("lambda^(1/4)", "lambda", 0.01, 100.0)},
                {"s", 1.0},
                {"functions", {{"phi", gaussian(0.0, 1.0, 0.0)}, {"psi", gaussian(0.5, 0.8, 1.0)}}},
                {"identity",
                 {{"t_max", 400.0}, {"eta_resolution", 0.5}, {"lambda_tolerance", 1e-10}, {"tail_limit", 0.1},
                  {"levels", 3}, {"tolerance", 1e-3}, {"scalar", true}, {"dual", true}}}}});
  p.push_back({"free-apriori", "apriori",
               "Free line: a priori spacetime bound on a random batch and the lambda^(-1/2) decay of the "
               "weighted density and of the weighted free resolvent.",
               {{"model", free_model(10.0, 256)},
                {"spectral", spectral("lambda^(1/4)", "lambda", 0.01, 100.0)},
                {"s", 1.0},
                {"functions", {{"phi", gaussian(0.0, 1.0, 0.0)}}},
                {"apriori", {{"single", true}, {"time_side", true}, {"sup_points", 256}, {"slack", 0.01}}},
                {"batch", {{"count", 100}}},
                {"decay",
                 {{"range", {10.0, 1000.0}}, {"points", 24}, {"spacing", "log"}, {"window", 0.0},
                  {"slope", {-0.55, -0.45}}, {"resolvent", true}, {"x_max", 20.0}, {"points_grid", 1024}}}}});
  p.push_back({"free-best-constant", "best-constant",
               "Free line, s = 1, sigma = lambda^(1/4), a = lambda: the sup of the weighted density, wave-packet "
               "lower bounds, and the upper bound on 1000 random functions.",
               {{"model", free_model(200.0, 2048)},
                {"spectral", spectral("lambda^(1/4)", "lambda", 1e-4, 1e4)},
                {"s", 1.0},
                {"certify",
                 {{"grid_points", 64}, {"rounds", 3}, {"points_per_round", 8}, {"h_levels", 7},
                  {"h0_fraction", 0.0625}, {"tolerance", 0.05}, {"expected", 1.7724538509055159},
                  {"expected_tolerance", 0.01}}},
                {"batch", {{"count", 1000}, {"slack", 0.01}, {"sup_points", 256}, {"x_max", 10.0}, {"points", 1024}}}}});
  p.push_back({"free-comparison", "compare",
               "Free line: (lambda^(1/4), lambda) against (lambda^(1/4) (2 lambda)^(1/2), lambda^2), with the "
               "weight inflated by 1.5 as a negative control.",
               {{"model", free_model(10.0, 512)},
                {"spectral", spectral("lambda^(1/4)", "lambda", 0.01, 100.0)},
                {"s", 1.0},
                {"functions", {{"phi", gaussian(0.2, 0.8, 1.0)}, {"psi", gaussian(-0.3, 1.0, 0.5)}}},
                {"comparison",
                 {{"sigma", "lambda^(1/4) * sqrt(2 * lambda)"}, {"a", "lambda^2"}, {"slack", 0.02},
                  {"inflation", 1.5}, {"local", true}, {"time_side", false}}},
                {"lambda_grid", {{"points", 64}, {"rounds", 3}, {"points_per_round", 8}}},
                {"batch", {{"count", 100}}}}});
  p.push_back({"fractional-laplacian", "powers",
               "Free line with the time map lambda^alpha, i.e. the flow of (-d^2/dx^2)^alpha: the weight "
               "alpha^(1/2) lambda^((2 alpha - 1)/4) keeps the smoothing constant.",
               {{"model", free_model(10.0, 512)},
                {"spectral", spectral("lambda^(1/4)", "lambda", 0.01, 100.0)},
                {"s", 1.0},
                {"powers", {{"alphas", {0.5, 2.0, 3.0}}, {"slack", 0.02}}},
                {"lambda_grid", {{"points", 64}, {"rounds", 3}, {"points_per_round", 8}}},
                {"batch", {{"count", 20}}}}});
  p.push_back({"stark-fd", "apriori",
               "Finite-difference Stark operator -d^2/dx^2 - x with Dirichlet ends: decay of the "
               "epsilon-smoothed weighted density, s = 3/4.",
               {{"model", {{"kind", "stark-fd"}, {"x_max", 20.0}, {"points", 800}, {"field", 1.0}, {"epsilon", 0.0}}},
                {"spectral", spectral("1", "lambda", 5.0, 100.0)},
                {"s", 0.75},
                {"apriori", {{"single", false}, {"time_side", false}, {"sup_points", 64}, {"slack", 0.01}}},
                {"batch", {{"count", 0}}},
                {"decay",
                 {{"range", {5.0, 100.0}}, {"points", 116}, {"spacing", "linear"}, {"window", 8.0},
                  {"slope", {-0.7, -0.3}}, {"resolvent", false}}}}});
  p.push_back({"schrodinger-potential", "perturb",
               "Free line plus V = 0.3 exp(-x^2), sigma = (1 + lambda)^(1/4): empirical smoothing constant on a "
               "random batch against the perturbed sup bound, under grid refinement.",
               {{"model", {{"kind", "schrodinger"}, {"x_max", 16.0}, {"points", 256}, {"potential", kBump}}},
                {"spectral", spectral("(1 + lambda)^(1/4)", "lambda", 0.1, 400.0)},
                {"s", 1.0},
                {"perturb",
                 {{"refine_points", 512}, {"stability", 0.05}, {"panels_per_unit_k", 2}, {"bound_points", 64},
                  {"slack", 0.01}}},
                {"batch", {{"count", 100}}}}});
  p.push_back({"schrodinger-lap", "lap-scan",
               "Free line plus V = 0.3 exp(-x^2): limiting absorption scan of (I + V R(lambda +- i0))^{-1} "
               "with grid doubling.",
               {{"model", {{"kind", "schrodinger"}, {"x_max", 6.0}, {"points", 256}, {"potential", kBump}}},
                {"spectral", {{"window", {0.1, 1000.0}}}},
                {"s", 1.0},
                {"lap",
                 {{"lambda_points", 40}, {"refine_points", 512}, {"stability", 0.01}, {"top_decade_limit", 1.0},
                  {"exclusion_threshold", 1e6}}}}});
  p.push_back({"matrix-perturbation", "perturb",
               "Random 64 x 64 Hermitian H and V at smoothing width 0.01: the resolvent chain for the perturbed "
               "density against the direct smoothed density of H + V.",
               {{"model", {{"kind", "generic-hermitian"}, {"dimension", 64}}},
                {"perturb",
                 {{"pairs", 3}, {"lambdas", {-2.0, 0.0, 0.7, 3.0}}, {"epsilon", 0.01}, {"potential_scale", 0.3},
                  {"tolerance", 1e-10}, {"zero_tolerance", 1e-12}}}}});
  for (auto& x : p) x.config["schema"] = kConfigSchema;
  return p;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

std::string default_preset(const std::string& verb) {
  if (verb == "identity") return "free-identity";
  if (verb == "apriori") return "free-apriori";
  if (verb == "best-constant") return "free-best-constant";
  if (verb == "compare") return "free-comparison";
  if (verb == "powers") return "fractional-laplacian";
  if (verb == "perturb") return "schrodinger-potential";
  if (verb == "lap-scan") return "schrodinger-lap";
  return {};
}

}  // namespace smoothlab::harness
