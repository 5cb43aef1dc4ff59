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

// Self-adjoint operator models and spectral-function descriptors.

#pragma once

#include <smoothlab/core_spaces.hpp>

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace smoothlab {

enum class ModelKind { FreeLaplacian1D, StarkFD, GenericHermitian, PerturbedSchrodinger1D };

const char* to_string(ModelKind kind) noexcept;

struct ExactRoute {};
/// Stone-formula density at fixed width; epsilon = 0 picks default_epsilon(lambda).
struct EpsilonSmoothed {
  double epsilon = 0.0;
};
using SpectralRoute = std::variant<ExactRoute, EpsilonSmoothed>;

/// Eigenvalues ascending, eigenvectors orthonormal in C^n (columns).
struct Eigensystem {
  RVector values;
  CMatrix vectors;
};

/// V as a multiplication operator, or V = <x>^{-s} (I - d^2/dx^2)^beta <x>^{-s}.
struct PotentialSpec {
  enum class Kind { Multiplicative, FactoredPseudo };
  Kind kind = Kind::Multiplicative;
  std::function<double(double)> v;  // multiplicative only
  double beta = 0.0;
  double s = 0.0;
  double decay_epsilon = 1.0;  // exponent slack in |V(x)| <= C <x>^{-1-eps}

  static PotentialSpec multiplicative(std::function<double(double)> v, double decay_epsilon = 1.0);
  static PotentialSpec factored_pseudo(double beta, double s);
  /// Linear interpolation through (x_i, V_i), zero outside the sampled range.
  static PotentialSpec from_samples(std::vector<double> x, std::vector<double> v, double decay_epsilon = 1.0);
  bool is_zero() const;
};

/// Reads whitespace-separated "x V" rows; '#' starts a comment.
PotentialSpec load_potential_file(const std::string& path, double decay_epsilon = 1.0);

/// V realized on the grid: diagonal for multiplicative potentials, a dense
/// Fourier-multiplier sandwich for the factored kind.
DenseMatrix potential_matrix(const PotentialSpec& v, const SpatialGrid& grid);

class OperatorModel {
 public:
  ModelKind kind() const { return kind_; }
  const SpatialGrid& grid() const { return grid_; }
  const SpectralRoute& route() const { return route_; }
  bool exact_route() const { return std::holds_alternative<ExactRoute>(route_); }

  /// Dense matrix of H on the grid (matrix models and the perturbed model).
  const DenseMatrix& matrix() const;
  bool has_eigensystem() const { return static_cast<bool>(eig_); }
  const Eigensystem& eigensystem() const;
  /// Potential for PerturbedSchrodinger1D.
  const PotentialSpec& potential() const;
  const DenseMatrix& potential_on_grid() const;

  /// Copy with a different spectral route (e.g. an explicit epsilon).
  OperatorModel with_route(SpectralRoute route) const;

  /// 10 x mean spacing of the eigenvalues nearest to lambda (matrix models).
  double default_epsilon(double lambda) const;

  friend OperatorModel make_free_laplacian(const SpatialGrid& grid);
  friend OperatorModel make_stark_fd(const SpatialGrid& grid, double field);
  friend OperatorModel make_generic_hermitian(const SpatialGrid& grid, const CMatrix& m);
  friend OperatorModel make_perturbed_schrodinger(const SpatialGrid& grid, const PotentialSpec& v);

 private:
  OperatorModel(ModelKind kind, SpatialGrid grid, SpectralRoute route)
      : kind_(kind), grid_(grid), route_(route) {}

  ModelKind kind_;
  SpatialGrid grid_;
  SpectralRoute route_;
  std::shared_ptr<const DenseMatrix> matrix_;
  std::shared_ptr<const Eigensystem> eig_;
  std::shared_ptr<const PotentialSpec> potential_;
  std::shared_ptr<const DenseMatrix> potential_matrix_;
};

/// -d^2/dx^2 diagonalized by the grid Fourier transform.
OperatorModel make_free_laplacian(const SpatialGrid& grid);
/// Central differences for -d^2/dx^2 with Dirichlet ends, minus field * x.
OperatorModel make_stark_fd(const SpatialGrid& grid, double field = 1.0);
OperatorModel make_generic_hermitian(const SpatialGrid& grid, const CMatrix& m);
/// Free line plus V. The grid Hamiltonian (spectral Laplacian + V) is
/// diagonalized when the grid has at most 1024 points.
OperatorModel make_perturbed_schrodinger(const SpatialGrid& grid, const PotentialSpec& v);

/// Spectral calculus g(H) phi. Free model: multiplier g(xi^2); matrix
/// models: eigenbasis multiplier.
GridFunction apply_function(const OperatorModel& model, const std::function<cplx(double)>& g,
                            const GridFunction& phi);
/// 1_J(H) phi for the open interval J.
GridFunction spectral_projector(const OperatorModel& model, Interval window, const GridFunction& phi);

/// Dense matrix of the free Laplacian's spectral discretization, F^{-1} xi^2 F.
CMatrix spectral_laplacian_matrix(const SpatialGrid& grid);

// ---------------------------------------------------------------------------

/// sigma(lambda), a(lambda), a'(lambda) on an open window with breakpoints.
struct SpectralFunction {
  std::function<double(double)> sigma;
  std::function<double(double)> a;
  std::function<double(double)> a_prime;
  std::vector<double> breakpoints;  // sorted
  Interval window;
  double breakpoint_margin = 1e-6;  // closed exclusion radius around each breakpoint

  /// lambda in J and farther than the margin from every breakpoint.
  bool admissible(double lambda) const;
  /// Sub-intervals of J with the breakpoint neighborhoods removed.
  std::vector<Interval> components() const;
  /// Throws OutOfDomain when a' <= 0 or a is not increasing on sampled points.
  void validate(int samples_per_component = 256) const;
  /// Largest |a| over the window, by sampling (Nyquist bookkeeping).
  double max_abs_a(int samples = 2048) const;
};

SpectralFunction power_spectral_function(double sigma_power, double a_power, Interval window,
                                         double sigma_scale = 1.0, double a_scale = 1.0);

// ---------------------------------------------------------------------------

struct ShortRangeReport {
  bool short_range = false;
  double constant = 0.0;     // max |V(x_i)| <x_i>^{1+eps} on the grid
  double growth_slope = 0.0; // d log C(R) / d log R over the outer radii
  double epsilon = 0.0;
  std::string note;
};

/// Fits how max_{|x|<=R} |V| <x>^{1+eps} grows with R; a bounded constant passes.
ShortRangeReport shortrange_check(const PotentialSpec& v, const SpatialGrid& grid);

}  // namespace smoothlab
