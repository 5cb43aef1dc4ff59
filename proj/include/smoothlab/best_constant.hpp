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

// Two-sided check of the smoothing constant
//
//   ||h_J|| = sqrt(2 pi) sup_{lambda in J} (|sigma| / a'^{1/2}) ||A(lambda)||^{1/2}.
//
// The upper side is a refined scan of the sup. The lower side follows a
// spectrally localized packet around the argmax: for a near-maximizer psi of
// <A(lambda0) psi, psi> and D_h = (lambda0 - h/2, lambda0 + h/2),
//
//   K_h = h^{-1/2} int_{D_h} (|sigma| / a'^{1/2}) <A psi, psi> / ||E(D_h) psi||,
//
// and sqrt(2 pi) K_h is attained by the normalized packet E(D_h) psi.

#pragma once

#include <smoothlab/core_spaces.hpp>
#include <smoothlab/models.hpp>

#include <string>
#include <vector>

namespace smoothlab {

struct RhsSup {
  double value = 0.0;   // sqrt(2 pi) times the max factor
  double argmax = 0.0;
  bool at_edge = false;  // argmax sat on a grid edge in every refinement round
  std::vector<double> lambdas;
  std::vector<double> factors;
  std::vector<double> round_argmax;  // argmax after the coarse scan and each round
  double coarse_cell = 0.0;          // coarse-grid cell around the first argmax
};

/// Needs at least 32 admissible points. Each round adds `points_per_round`
/// points between the neighbours of the running argmax.
RhsSup rhs_sup(const OperatorModel& model, const SpectralFunction& sf, WeightExponent s,
               const std::vector<double>& lambda_grid, int rounds = 3, int points_per_round = 8);

/// Coarse grid used by certify: `count` points, log-spaced when lo > 0.
std::vector<double> sup_grid(const SpectralFunction& sf, std::size_t count = 64);

/// Unit-X vector (||f||_{0,s} = 1) close to the maximizer of <A(lambda) f, f>.
/// Exact Gram maximizer for factored densities, top eigenvector for dense
/// matrices, power iteration otherwise.
GridFunction density_near_maximizer(const OperatorModel& model, double lambda, WeightExponent s);

/// E(D) psi / ||E(D) psi||. Throws InvalidArgument when ||E(D) psi|| <= 1e-12.
GridFunction wavepacket(const OperatorModel& model, Interval d, const GridFunction& psi);

struct LowerSequence {
  double lambda0 = 0.0;
  std::vector<double> h;
  std::vector<double> k;    // K_h
  double limit = 0.0;       // (|sigma|/a'^{1/2})(lambda0) <A(lambda0) psi, psi>^{1/2}
  double extrapolated = 0.0;  // Richardson on the two smallest h, O(h^2) error
};

/// K_h for each h (each D_h must lie inside the admissible part of J).
LowerSequence lhs_lower(const OperatorModel& model, const SpectralFunction& sf, double lambda0,
                        const std::vector<double>& hs, const GridFunction& psi);

struct CertifyOptions {
  std::size_t grid_points = 64;
  int rounds = 3;
  int points_per_round = 8;
  int h_levels = 7;            // h_k = h0 2^{-k}
  double h0_fraction = 1.0 / 16.0;  // h0 = |J| / 16, clipped so D_h stays inside J
  double h_min = 1e-12;
  double tolerance = 0.0;      // 0 picks 5% on a.c. models and 20% on the epsilon route
};

struct BestConstantReport {
  RhsSup sup;
  LowerSequence lower;
  double lhs_best = 0.0;  // sqrt(2 pi) max K_h
  double gap = 0.0;       // (rhs_sup - lhs_best) / rhs_sup
  double tolerance = 0.0;
  bool upper_respected = false;  // every sqrt(2 pi) K_h <= rhs_sup (1 + 0.01)
  bool pass = false;
  std::vector<std::string> notes;
};

BestConstantReport certify(const OperatorModel& model, const SpectralFunction& sf, WeightExponent s,
                           const CertifyOptions& options = {});

}  // namespace smoothlab
