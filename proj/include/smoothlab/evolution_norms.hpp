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

// Time side and spectral side of the time/energy duality
//
//   || (sigma(H) e^{it a(H)} E(J) phi, psi) ||_{L2(R_t)}
//       = sqrt(2 pi) || sigma a'^{-1/2} <A(lambda) phi, psi> ||_{L2(J)}
//
// and of its X*-valued version, plus the a priori spacetime bound.
//
// Line models: the time signal is the continuum integral over J evaluated at
// grid nodes. It is computed on a uniform grid in eta = a(lambda) with
// endpoint-corrected trapezoid weights, and all time samples come from one
// chirp-z transform. The spectral side is an independent adaptive
// Gauss-Kronrod integral in k = sqrt(lambda). Matrix models use the
// eigen-expansion with the damping e^{-eps a'(lambda_k) |t|} that matches the
// Lorentzian smoothing of their density.

#pragma once

#include <smoothlab/core_spaces.hpp>
#include <smoothlab/models.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace smoothlab {

struct TimeGrid {
  double t_max = 400.0;
  std::size_t m_points = 0;  // even; nodes t_j = -t_max + j dt, j = 0..m_points

  double spacing() const { return 2.0 * t_max / static_cast<double>(m_points); }
  double node(std::size_t j) const { return -t_max + static_cast<double>(j) * spacing(); }
  /// Largest |a| the grid resolves: pi m / (2 t_max).
  double nyquist() const { return kPi * static_cast<double>(m_points) / (2.0 * t_max); }

  /// Smallest even m with dt <= 0.9 pi / max_abs_a.
  static TimeGrid for_bandwidth(double t_max, double max_abs_a);
};

struct IdentityOptions {
  TimeGrid time{400.0, 0};       // m_points = 0 picks the grid from the Nyquist bound
  double eta_resolution = 0.5;   // t_max * d(eta) for the time-side eta grid
  double lambda_tolerance = 1e-10;
  double tail_limit = 0.1;       // max tail / lhs^2 before "t_max too small"
};

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;                   // |lhs - rhs| / max(rhs, 1e-300)
  double truncation_tail_estimate = 0.0;   // estimated lhs^2 mass beyond t_max (already added to lhs)
  double tail_exponent = 0.0;              // fitted |F|^2 ~ t^{-p}
  TimeGrid time;
  std::size_t eta_nodes = 0;
  double epsilon = 0.0;                    // matrix models: smoothing width
};

/// F(t) = (sigma(H) e^{it a(H)} E(J) phi, psi) at the given times by adaptive
/// quadrature of the lambda integral (line models) or the eigen-sum (matrix
/// models, exact functional calculus).
std::vector<cplx> evolve_signal(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                                const GridFunction& psi, const std::vector<double>& times,
                                double tolerance = 1e-10);

/// The same signal on a whole time grid through the fast eta-grid route.
std::vector<cplx> evolve_signal(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                                const GridFunction& psi, const TimeGrid& grid, double eta_resolution = 0.5);

/// u(t, x_i) for all grid nodes x_i and the given times (continuum evolution
/// of sigma(H) E(J) phi sampled at the nodes); rows are times.
CMatrix evolve_state(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                     const std::vector<double>& times, double tolerance = 1e-10);

IdentityReport identity_scalar(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                               const GridFunction& psi, const IdentityOptions& options = {});

IdentityReport identity_dual(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                             WeightExponent s, const IdentityOptions& options = {});

/// sqrt(2 pi) (int_J sigma^2 / a' ||A(lambda) phi||_{0,-s}^2 dlambda)^{1/2}.
double dual_spectral_side(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                          WeightExponent s, double tolerance = 1e-10);

/// sqrt(2 pi) (int_J sigma^2 / a' |<A(lambda) phi, psi>|^2 dlambda)^{1/2}.
double scalar_spectral_side(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                            const GridFunction& psi, double tolerance = 1e-10);

struct RefinementStudy {
  std::vector<IdentityReport> levels;
  bool monotone = false;  // residual(k+1) <= residual(k) + 1e-6 (quadrature noise floor)
};

/// Level k halves dt, doubles t_max and halves the lambda tolerance relative to level k-1.
RefinementStudy refine_identity_scalar(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                                       const GridFunction& psi, int levels = 3, const IdentityOptions& base = {});
RefinementStudy refine_identity_dual(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                                     WeightExponent s, int levels = 3, const IdentityOptions& base = {});

// ---------------------------------------------------------------------------

struct SupScan {
  double value = 0.0;          // sup of (|sigma| / a'^{1/2}) density_norm^{1/2} (no sqrt(2 pi))
  double argmax = 0.0;
  std::vector<double> lambdas;
  std::vector<double> factors;
  bool at_edge = false;        // maximizer on the first or last grid point
};

/// Pointwise factor over a lambda grid (admissible points only).
SupScan weighted_density_sup(const OperatorModel& model, const SpectralFunction& sf, WeightExponent s,
                             const std::vector<double>& lambdas);

/// Default lambda grid for sup scans: log-spaced over each component of J
/// (linear when a component has lo <= 0 or a small ratio).
std::vector<double> default_lambda_grid(const SpectralFunction& sf, std::size_t count);

struct AprioriReport {
  double lhs = 0.0;             // || <x>^{-s} sigma(H) e^{ita(H)} E(J) phi ||_{L2(R_t, L2)}
  double bound = 0.0;           // sqrt(2 pi) sup(...) ||E(J) phi||
  double sup_factor = 0.0;
  double projected_norm = 0.0;  // ||E(J) phi||
  bool pass = false;            // lhs <= bound (1 + slack)
};

struct AprioriOptions {
  std::size_t sup_points = 256;
  double slack = 0.01;
  bool time_side = true;        // false: evaluate lhs through the spectral side
  IdentityOptions identity;
};

AprioriReport apriori_check(const OperatorModel& model, const SpectralFunction& sf, WeightExponent s,
                            const GridFunction& phi, const AprioriOptions& options = {});

struct AprioriBatch {
  double sup_factor = 0.0;
  double bound_constant = 0.0;  // sqrt(2 pi) sup_factor
  std::vector<double> ratios;   // lhs / ||E(J) phi||
  double max_ratio = 0.0;
  std::size_t passed = 0;
  bool pass = false;
};

/// Inequality sweep over a batch with the lhs taken from the spectral side
/// (equal to the time side by the identity, and far cheaper per function).
AprioriBatch apriori_batch(const OperatorModel& model, const SpectralFunction& sf, WeightExponent s,
                           const std::vector<GridFunction>& batch, double slack = 0.01,
                           std::size_t sup_points = 256);

/// One to three modulated Gaussians per function: centers in [-1.5, 1.5],
/// widths in [0.5, 1.2], carrier frequencies in [-3, 3].
std::vector<GridFunction> random_wavepackets(const SpatialGrid& grid, std::size_t count, std::uint64_t seed);

}  // namespace smoothlab
