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

// Short-range perturbations of the free line: explicit free resolvent kernels,
// Lippmann-Schwinger inversion of I + V R(lambda +- i0) on the support of V,
// and the perturbed density
//
//   A~(lambda) = A (I + V R+)^{-1} - R- (I + V R+)^{-1} V A (I + V R-)^{-1}.
//
// The second term carries R-; without it the two sides of the Stone formula
// do not match (see the matrix-level check in perturbed_density_matrix).

#pragma once

#include <smoothlab/core_spaces.hpp>
#include <smoothlab/models.hpp>
#include <smoothlab/spectral_density.hpp>

#include <vector>

namespace smoothlab {

/// kappa with kappa^2 = lambda +- i eps and Im kappa >= 0; for eps = 0 and
/// lambda > 0 this is +-sqrt(lambda), for lambda < 0 it is i sqrt(-lambda).
cplx free_wavenumber(double lambda, double epsilon, Sign sign);

/// (i / (2 kappa)) e^{i kappa |x - y|}, the kernel of (-d^2/dx^2 - kappa^2)^{-1}.
cplx free_resolvent_value(cplx kappa, double distance);

/// Free resolvent on the grid. eps = 0 requires lambda != 0.
IntegralKernel free_resolvent_kernel(double lambda, Sign sign, const SpatialGrid& grid, double epsilon = 0.0);

/// ||<x>^{-s} R(lambda +- i0) <x>^{-s}|| on the grid, by power iteration.
double free_resolvent_norm(double lambda, Sign sign, const SpatialGrid& grid, WeightExponent s);

/// Indices where V is not negligible: multiplicative V with |V| above
/// tail * max|V|, or rows of a dense V with row norm above tail * max.
std::vector<Eigen::Index> potential_support(const DenseMatrix& v, double tail = 1e-10);

class LippmannSchwingerState {
 public:
  double lambda = 0.0;
  double epsilon = 0.0;
  Sign sign = Sign::Plus;
  WeightExponent s{1.0};
  SpatialGrid grid{1.0, 2};
  std::vector<Eigen::Index> support;
  CMatrix v_block;      // V on support x support
  CMatrix kernel_rows;  // free kernel K(x_S, x_j), |S| x n
  CMatrix vr_rows;      // rows S of V R as a matrix on sample vectors
  CMatrix vr_block;     // columns S of vr_rows
  CMatrix inv_block;    // (I + vr_block)^{-1}
  double inv_norm_s = 1.0;      // ||<x>^s (I + V R)^{-1} <x>^{-s}||
  double vr_norm_s = 0.0;       // ||<x>^s V R <x>^{-s}||
  double block_residual = 0.0;  // ||(I + vr_block) inv_block - I||_max

  Eigen::Index support_size() const { return static_cast<Eigen::Index>(support.size()); }
  CVector apply_vr(const CVector& f) const;
  CVector apply_inverse(const CVector& f) const;
  CVector apply_inverse_adjoint(const CVector& f) const;
  /// Free resolvent applied to a function supported on S (values on S).
  CVector resolvent_from_support(const CVector& g_support) const;
  /// det(I + vr_block); real for real lambda < 0 and eps = 0.
  cplx determinant() const;
};

struct LippmannSchwingerOptions {
  double support_tail = 1e-10;
  double epsilon = 0.0;
  double singular_rcond = 1e-12;
  bool compute_norms = true;  // inv_norm_s and vr_norm_s
};

/// Builds and inverts I + V R(lambda +- i eps) on the support of V; throws
/// Singular naming lambda when the block is numerically singular.
LippmannSchwingerState assemble_vr(const DenseMatrix& v, const SpatialGrid& grid, double lambda, Sign sign,
                                   WeightExponent s, const LippmannSchwingerOptions& options = {});
LippmannSchwingerState assemble_vr(const PotentialSpec& v, const SpatialGrid& grid, double lambda, Sign sign,
                                   WeightExponent s, const LippmannSchwingerOptions& options = {});

struct LapPoint {
  double lambda = 0.0;
  double inv_norm_plus = 0.0;
  double inv_norm_minus = 0.0;
  double vr_norm_plus = 0.0;
  double vr_norm_minus = 0.0;
  bool excluded = false;
};

struct LapScanReport {
  std::vector<LapPoint> points;
  std::vector<double> exclusions;      // lambdas dropped as singular or above the threshold
  std::vector<double> determinant_roots;  // refined roots of det(I + V R) for lambda < 0
  double sup_inv_norm = 0.0;
  double top_decade_vr_norm = 0.0;
  bool limsup_ok = false;
};

struct LapScanOptions {
  double exclusion_threshold = 1e6;
  LippmannSchwingerOptions ls;
};

LapScanReport lap_condition_scan(const PotentialSpec& v, const SpatialGrid& grid, WeightExponent s,
                                 const std::vector<double>& lambdas, const LapScanOptions& options = {});

struct PerturbedDensity {
  double lambda = 0.0;
  RankKFactored rep;            // general rank-4 factorization of A~(lambda)
  double norm = 0.0;            // ||A~||_{s,-s}, sup-form convention
  double free_norm = 0.0;       // ||A||_{s,-s} on the same grid
  double ratio = 0.0;
  double hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;  // relative to norm
};

/// A~(lambda) on the free line with potential V; validates Hermiticity and
/// positivity to `tolerance` relative.
PerturbedDensity perturbed_density(const DenseMatrix& v, const SpatialGrid& grid, double lambda, WeightExponent s,
                                   double tolerance = 1e-8, const LippmannSchwingerOptions& options = {});

/// The same chain for finite Hermitian matrices at fixed eps > 0, and the
/// Stone-formula density of H + V computed directly.
struct MatrixPerturbationCheck {
  CMatrix chain;     // A X+ - R- X+ V A X-
  CMatrix direct;    // (1/(2 pi i)) (R~(lambda + i eps) - R~(lambda - i eps))
  CMatrix literal;   // A X+ - X+ V A X-, the form without R-
  double relative_error = 0.0;          // ||chain - direct||_F / ||direct||_F
  double literal_relative_error = 0.0;  // same for `literal`
  double intermediate_error = 0.0;      // (X+ - X-)/(2 pi i) + X+ V A X-, relative
};
MatrixPerturbationCheck perturbed_density_matrix(const CMatrix& h, const CMatrix& v, double lambda, double epsilon);

struct SmoothingBatchReport {
  std::vector<double> ratios;  // spacetime norm / ||phi|| per batch member
  double empirical_constant = 0.0;
  double sup_bound = 0.0;
  double argmax_lambda = 0.0;
  double max_norm_ratio = 0.0;  // sup ||A~|| / ||A|| over the bound grid
  bool pass = false;
};

struct SmoothingBatchOptions {
  int panels_per_unit_k = 2;   // Gauss-Legendre panels per unit of k = sqrt(lambda)
  int bound_points = 64;
  double tolerance = 0.01;
  LippmannSchwingerOptions ls;
};

/// Weighted spacetime norms of e^{it a(H~)} sigma(H~) E~(J) phi through the
/// spectral side, for each phi in the batch, against the sup bound.
SmoothingBatchReport perturbed_smoothing_check(const PotentialSpec& v, const SpatialGrid& grid,
                                               const SpectralFunction& sf, WeightExponent s,
                                               const std::vector<GridFunction>& batch,
                                               const SmoothingBatchOptions& options = {});

/// RankKFactored density used by the spectral-density module for the perturbed model.
RankKFactored perturbed_density_factored(const OperatorModel& model, double lambda);

}  // namespace smoothlab
