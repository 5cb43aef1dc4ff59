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

// Discretized weighted L2 spaces on a truncated line.
//
// A SpatialGrid samples [-x_max, x_max] at cell midpoints; quadrature is the
// uniform-weight Riemann sum. Weighted spaces use <x> = (1 + x^2)^(1/2), so
// ||f||_{0,s}^2 = int <x>^{2s} |f|^2 dx. Operators act on the sample vectors;
// integral kernels carry the quadrature weight, dense matrices do not.

#pragma once

#include <smoothlab/error.hpp>

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <variant>
#include <vector>

namespace smoothlab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2Pi = 2.506628274631000502415765284811;

/// (1 + x^2)^(s/2)
inline double jp_power(double x, double s) { return std::pow(1.0 + x * x, 0.5 * s); }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x > lo && x < hi; }
  double width() const { return hi - lo; }
};

class SpatialGrid {
 public:
  SpatialGrid(double x_max, std::size_t n_points);

  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return dx_; }
  double frequency_spacing() const { return kPi / x_max_; }

  /// Cell midpoints, symmetric about zero.
  double node(std::size_t j) const { return -x_max_ + (static_cast<double>(j) + 0.5) * dx_; }
  /// Dual nodes (m - n/2) * pi / x_max, m = 0..n-1.
  double frequency(std::size_t m) const {
    return (static_cast<double>(m) - static_cast<double>(n_ / 2)) * frequency_spacing();
  }
  RVector nodes() const;
  RVector frequencies() const;

  bool operator==(const SpatialGrid& other) const { return x_max_ == other.x_max_ && n_ == other.n_; }

 private:
  double x_max_;
  std::size_t n_;
  double dx_;
};

enum class Domain { Space, Frequency };

/// Complex samples on the spatial grid, or on its dual frequency grid.
class GridFunction {
 public:
  GridFunction(SpatialGrid grid, CVector values, Domain domain = Domain::Space);

  static GridFunction zero(const SpatialGrid& grid, Domain domain = Domain::Space);
  /// Samples f at the nodes. Throws Truncation when more than `tail_fraction`
  /// of the L2 mass of f lies outside [-x_max, x_max].
  static GridFunction sample(const SpatialGrid& grid, const std::function<cplx(double)>& f,
                             double tail_fraction = 1e-8);

  const SpatialGrid& grid() const { return grid_; }
  Domain domain() const { return domain_; }
  const CVector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double spacing() const { return domain_ == Domain::Space ? grid_.spacing() : grid_.frequency_spacing(); }
  double node(std::size_t j) const { return domain_ == Domain::Space ? grid_.node(j) : grid_.frequency(j); }
  cplx operator[](std::size_t j) const { return values_[static_cast<Eigen::Index>(j)]; }

  GridFunction scaled(cplx c) const;
  GridFunction operator+(const GridFunction& other) const;
  GridFunction operator-(const GridFunction& other) const;

 private:
  SpatialGrid grid_;
  CVector values_;
  Domain domain_;
};

struct WeightExponent {
  double s = 0.0;
};

/// (sum <x_i>^{2s} |f_i|^2 dx)^(1/2); s = 0 is the plain L2 norm.
double weighted_norm(const GridFunction& f, WeightExponent s);

/// int f conj(g) dx on the grid.
cplx inner(const GridFunction& f, const GridFunction& g);

/// <x_i>^{s} f_i
GridFunction apply_weight(const GridFunction& f, WeightExponent s);

/// Unitary discretization of (2 pi)^{-1/2} int f(x) e^{-i xi x} dx onto the dual grid.
GridFunction fourier(const GridFunction& f);
GridFunction inverse_fourier(const GridFunction& fhat);

/// (2 pi)^{-1/2} sum_j f(x_j) e^{-i k x_j} dx at an arbitrary frequency k.
cplx fourier_at(const GridFunction& f, double k);

// ---------------------------------------------------------------------------
// Operator representations

/// n x n matrix acting on sample vectors.
struct DenseMatrix {
  CMatrix matrix;
  bool self_adjoint = false;
};

/// f -> F^{-1}[ m(xi) F f ] with a real multiplier sampled on the frequency grid.
struct FourierMultiplier {
  SpatialGrid grid{1.0, 2};
  RVector multiplier;
};

/// f -> sum_{j,l} C_{jl} (f, w_l) u_j with (f, w) = int f conj(w) dx.
/// `right` equals `left` for the symmetric form used by dual_norm_rank_k.
struct RankKFactored {
  SpatialGrid grid{1.0, 2};
  CMatrix left;    // n x k, columns u_j
  CMatrix right;   // n x k', columns w_l
  CMatrix coeff;   // k x k'
  bool symmetric = false;

  static RankKFactored make_symmetric(const SpatialGrid& grid, CMatrix u, CMatrix c);
  static RankKFactored make_general(const SpatialGrid& grid, CMatrix u, CMatrix c, CMatrix w);
  Eigen::Index rank() const { return coeff.rows(); }
};

/// (K f)(x_i) = sum_j K(x_i, x_j) f_j dx.
struct IntegralKernel {
  SpatialGrid grid{1.0, 2};
  CMatrix kernel;
};

using OperatorRep = std::variant<DenseMatrix, FourierMultiplier, RankKFactored, IntegralKernel>;

Eigen::Index rep_dimension(const OperatorRep& rep);
CVector apply(const OperatorRep& rep, const CVector& f);
/// Adjoint with respect to the grid L2 inner product.
CVector apply_adjoint(const OperatorRep& rep, const CVector& f);
GridFunction apply(const OperatorRep& rep, const GridFunction& f);

/// Relative Hermiticity defect ||M - M^*||_F / ||M||_F.
double hermiticity_defect(const CMatrix& m);

/// Builds a DenseMatrix after checking the self-adjointness claim to 1e-12 relative.
DenseMatrix make_self_adjoint_matrix(CMatrix m);

// ---------------------------------------------------------------------------
// Norms of operators between weighted spaces

struct PowerIterationOptions {
  double relative_tolerance = 1e-8;
  int max_iterations = 10000;
  std::uint64_t seed = 0xC0FFEE;
};

struct PowerIterationResult {
  double norm = 0.0;      // largest singular value
  CVector vector;         // approximate top right singular vector (unit Euclidean norm)
  int iterations = 0;
};

/// Largest singular value of B given B and B^* as black boxes acting on C^dim.
PowerIterationResult power_iteration_norm(const std::function<CVector(const CVector&)>& op,
                                          const std::function<CVector(const CVector&)>& op_adjoint,
                                          Eigen::Index dim, const PowerIterationOptions& options = {});

/// ||<x>^{s_out} rep <x>^{s_in}||_{L2 -> L2}.
PowerIterationResult op_norm_weighted(const OperatorRep& rep, WeightExponent s_in, WeightExponent s_out,
                                      const PowerIterationOptions& options = {});

/// Result of the k x k generalized Gram eigenproblem for a nonnegative factored form.
struct FormMaximum {
  double value = 0.0;     // sup over ||f||_{0,s} = 1 of <A f, f>
  CVector coefficients;   // maximizer f = <x>^{-2s} sum_j beta_j u_j, normalized in L2_s
};

/// Gram matrix Gamma_{lj} = int <x>^{-2s} u_j conj(u_l) dx for the columns of `u`.
CMatrix weighted_gram(const SpatialGrid& grid, const CMatrix& u, WeightExponent s);

/// sup of the form (not its square root) from the coefficient matrix and Gram matrix.
FormMaximum form_maximum_from_gram(const CMatrix& coeff, const CMatrix& gram);

/// sup_{||f||_{0,s} = 1} <rep f, f>. Callers take square roots for the B(X, X*) norm.
double dual_norm_rank_k(const RankKFactored& rep, WeightExponent s);
FormMaximum dual_norm_rank_k_maximizer(const RankKFactored& rep, WeightExponent s);

/// Low-rank operator reduced to an orthonormal basis of span{left, right}; the
/// returned matrix captures the whole operator.
struct ReducedOperator {
  CMatrix basis;    // n x r, orthonormal in the grid L2 inner product
  CMatrix matrix;   // r x r
};
ReducedOperator reduce(const RankKFactored& rep);
/// Same as reduce() after conjugating by <x>^{-s} on both sides.
ReducedOperator reduce_weighted(const RankKFactored& rep, WeightExponent s);

}  // namespace smoothlab
