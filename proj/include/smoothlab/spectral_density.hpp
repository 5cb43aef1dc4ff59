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

// Spectral density A(lambda) = d/dlambda E(lambda) P_ac(H) as a pairing, an
// operator, and a weighted norm; resolvents and Stone-formula densities.
//
// Norm convention used throughout the library: density_norm returns
// sup_{||f||_{0,s}=1} <A f, f>, which equals ||<x>^{-s} A <x>^{-s}|| and is
// the square of the B(X, X*) norm written as a square-rooted form sup.

#pragma once

#include <smoothlab/core_spaces.hpp>
#include <smoothlab/models.hpp>

#include <vector>

namespace smoothlab {

struct DensityRep {
  double lambda = 0.0;
  OperatorRep rep;
  SpectralRoute route;
};

/// int_R <x>^{-2s} e^{iqx} dx on the whole line (s > 1/2), via the
/// Bessel-K closed form; c(0) = sqrt(pi) Gamma(s - 1/2) / Gamma(s).
double weight_fourier_transform(double q, double s);

/// Free-line density at lambda: left/right plane waves (2 pi)^{-1/2} e^{+-i k x},
/// k = sqrt(lambda), coefficients 1/(2k).
RankKFactored free_density_factored(const SpatialGrid& grid, double lambda);

/// Smoothing width used by the epsilon route at lambda.
double smoothing_width(const OperatorModel& model, double lambda);

/// (1/(2 pi i)) (R(lambda + i eps) - R(lambda - i eps)) as a dense matrix.
CMatrix smoothed_density_matrix(const OperatorModel& model, double lambda, double epsilon);

DensityRep density_rep(const OperatorModel& model, double lambda);
cplx density_pairing(const OperatorModel& model, double lambda, const GridFunction& phi, const GridFunction& psi);
GridFunction density_apply(const OperatorModel& model, double lambda, const GridFunction& phi);
double density_norm(const OperatorModel& model, double lambda, WeightExponent s);

/// Unit-X maximizer of the free density form: f = <x>^{-2s}(beta_+ e_+ + beta_- e_-).
struct FreeMaximizer {
  double value = 0.0;  // sup form value, equal to density_norm
  cplx beta_plus;
  cplx beta_minus;
};
FreeMaximizer free_density_maximizer(double lambda, WeightExponent s);

// ---------------------------------------------------------------------------

enum class Sign { Plus, Minus };
inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }

struct ResolventRep {
  double lambda = 0.0;
  double epsilon = 0.0;
  Sign sign = Sign::Plus;
  OperatorRep rep;
};

/// R(lambda +- i eps). Matrix models need eps > 0; the free and perturbed line
/// models also accept eps = 0 (boundary values from the explicit kernel).
ResolventRep resolvent(const OperatorModel& model, double lambda, double epsilon, Sign sign);

/// max_k ||(H - z) R(z) v_k - v_k|| / ||v_k|| over seeded random v_k (matrix models).
double resolvent_residual(const OperatorModel& model, const ResolventRep& r, int samples = 4);

// ---------------------------------------------------------------------------

struct PowerLawFit {
  double slope = 0.0;
  double constant = 0.0;  // value ~ constant * lambda^slope
  double rms_residual = 0.0;
};

/// Least-squares line through (log x, log y).
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct AgmonScan {
  std::vector<double> lambdas;
  std::vector<double> norms;  // density_norm values
  PowerLawFit fit;
};

/// density_norm over the grid and its log-log fit (needs at least 4 points).
AgmonScan agmon_scan(const OperatorModel& model, WeightExponent s, const std::vector<double>& lambdas);

/// Upper envelope of a scan over consecutive windows of `window` lambda width,
/// then the log-log fit of the envelope maxima against their positions.
AgmonScan envelope_fit(const AgmonScan& scan, double window);

/// int_J <A(lambda) phi, psi> dlambda with adaptive Gauss-Kronrod (free model
/// integrates in k = sqrt(lambda)); compares with ||E(J) phi||^2 for phi = psi.
cplx spectral_mass(const OperatorModel& model, Interval window, const GridFunction& phi, const GridFunction& psi,
                   double tolerance = 1e-10);

std::vector<double> log_spaced(double lo, double hi, std::size_t count);
std::vector<double> lin_spaced(double lo, double hi, std::size_t count);

}  // namespace smoothlab
