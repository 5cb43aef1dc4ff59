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

#include <smoothlab/core_spaces.hpp>

#include "dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>

namespace smoothlab {

SpatialGrid::SpatialGrid(double x_max, std::size_t n_points) : x_max_(x_max), n_(n_points) {
  require(std::isfinite(x_max) && x_max > 0.0, ErrorCode::InvalidArgument, "grid half-width must be positive");
  require(n_points >= 2 && n_points % 2 == 0, ErrorCode::InvalidArgument, "grid size must be even and at least 2");
  dx_ = 2.0 * x_max / static_cast<double>(n_points);
}

RVector SpatialGrid::nodes() const {
  RVector x(static_cast<Eigen::Index>(n_));
  for (std::size_t j = 0; j < n_; ++j) x[static_cast<Eigen::Index>(j)] = node(j);
  return x;
}

RVector SpatialGrid::frequencies() const {
  RVector k(static_cast<Eigen::Index>(n_));
  for (std::size_t m = 0; m < n_; ++m) k[static_cast<Eigen::Index>(m)] = frequency(m);
  return k;
}

GridFunction::GridFunction(SpatialGrid grid, CVector values, Domain domain)
    : grid_(grid), values_(std::move(values)), domain_(domain) {
  require(static_cast<std::size_t>(values_.size()) == grid_.size(), ErrorCode::InvalidArgument,
          "sample count does not match the grid");
  require(values_.allFinite(), ErrorCode::InvalidArgument, "grid function has non-finite samples");
}

GridFunction GridFunction::zero(const SpatialGrid& grid, Domain domain) {
  return GridFunction(grid, CVector::Zero(static_cast<Eigen::Index>(grid.size())), domain);
}

GridFunction GridFunction::sample(const SpatialGrid& grid, const std::function<cplx(double)>& f,
                                  double tail_fraction) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  CVector v(n);
  double inside = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    v[j] = f(grid.node(static_cast<std::size_t>(j)));
    inside += std::norm(v[j]);
  }
  // Mass beyond the truncation, probed on one more half-width at the same spacing.
  double outside = 0.0;
  const double dx = grid.spacing();
  for (std::size_t j = 0; j < grid.size() / 2; ++j) {
    const double x = grid.x_max() + (static_cast<double>(j) + 0.5) * dx;
    outside += std::norm(f(x)) + std::norm(f(-x));
  }
  if (outside > tail_fraction * (inside + outside)) {
    std::ostringstream msg;
    msg << "function mass outside [-" << grid.x_max() << ", " << grid.x_max() << "] is "
        << outside / (inside + outside) << " of the total (limit " << tail_fraction << ")";
    fail(ErrorCode::Truncation, msg.str());
  }
  return GridFunction(grid, std::move(v));
}

GridFunction GridFunction::scaled(cplx c) const { return GridFunction(grid_, values_ * c, domain_); }

GridFunction GridFunction::operator+(const GridFunction& other) const {
  require(grid_ == other.grid_ && domain_ == other.domain_, ErrorCode::InvalidArgument, "grid mismatch");
  return GridFunction(grid_, values_ + other.values_, domain_);
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
  require(grid_ == other.grid_ && domain_ == other.domain_, ErrorCode::InvalidArgument, "grid mismatch");
  return GridFunction(grid_, values_ - other.values_, domain_);
}

double weighted_norm(const GridFunction& f, WeightExponent s) {
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += jp_power(f.node(j), 2.0 * s.s) * std::norm(f[j]);
  return std::sqrt(acc * f.spacing());
}

cplx inner(const GridFunction& f, const GridFunction& g) {
  require(f.grid() == g.grid() && f.domain() == g.domain(), ErrorCode::InvalidArgument, "grid mismatch");
  return g.values().dot(f.values()) * f.spacing();
}

GridFunction apply_weight(const GridFunction& f, WeightExponent s) {
  CVector v = f.values();
  for (std::size_t j = 0; j < f.size(); ++j) v[static_cast<Eigen::Index>(j)] *= jp_power(f.node(j), s.s);
  return GridFunction(f.grid(), std::move(v), f.domain());
}

namespace {

// FFTW plans are cached per (size, direction). Planning is serialized;
// execution goes through the new-array interface, which is thread safe.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

CVector run_dft(const CVector& in, int sign) {
  const auto n = static_cast<std::size_t>(in.size());
  FftwBuffer a(n), b(n);
  for (std::size_t j = 0; j < n; ++j) {
    a.data[j][0] = in[static_cast<Eigen::Index>(j)].real();
    a.data[j][1] = in[static_cast<Eigen::Index>(j)].imag();
  }
  fftw_execute_dft(PlanCache::instance().get(static_cast<int>(n), sign), a.data, b.data);
  CVector out(in.size());
  for (std::size_t j = 0; j < n; ++j) out[static_cast<Eigen::Index>(j)] = cplx(b.data[j][0], b.data[j][1]);
  return out;
}

}  // namespace

CVector detail::dft(const CVector& in, bool forward) { return run_dft(in, forward ? FFTW_FORWARD : FFTW_BACKWARD); }

// With x_j = x_0 + j dx and xi_m = xi_0 + m dxi, dx * dxi = 2 pi / n, so
// xi_m x_j = xi_m x_0 + xi_0 j dx + 2 pi m j / n and the sum is one DFT
// between two diagonal phase factors.
GridFunction fourier(const GridFunction& f) {
  require(f.domain() == Domain::Space, ErrorCode::InvalidArgument, "fourier expects a spatial grid function");
  const SpatialGrid& g = f.grid();
  const auto n = static_cast<Eigen::Index>(g.size());
  const double x0 = g.node(0), xi0 = g.frequency(0), dx = g.spacing();
  CVector a(n);
  for (Eigen::Index j = 0; j < n; ++j) a[j] = f.values()[j] * std::polar(1.0, -xi0 * static_cast<double>(j) * dx);
  CVector b = run_dft(a, FFTW_FORWARD);
  const double scale = dx / kSqrt2Pi;
  for (Eigen::Index m = 0; m < n; ++m)
    b[m] *= scale * std::polar(1.0, -g.frequency(static_cast<std::size_t>(m)) * x0);
  return GridFunction(g, std::move(b), Domain::Frequency);
}

GridFunction inverse_fourier(const GridFunction& fhat) {
  require(fhat.domain() == Domain::Frequency, ErrorCode::InvalidArgument,
          "inverse_fourier expects a frequency grid function");
  const SpatialGrid& g = fhat.grid();
  const auto n = static_cast<Eigen::Index>(g.size());
  const double x0 = g.node(0), xi0 = g.frequency(0), dx = g.spacing();
  CVector a(n);
  for (Eigen::Index m = 0; m < n; ++m)
    a[m] = fhat.values()[m] * std::polar(1.0, g.frequency(static_cast<std::size_t>(m)) * x0);
  CVector b = run_dft(a, FFTW_BACKWARD);
  const double scale = g.frequency_spacing() / kSqrt2Pi;
  for (Eigen::Index j = 0; j < n; ++j) b[j] *= scale * std::polar(1.0, xi0 * static_cast<double>(j) * dx);
  return GridFunction(g, std::move(b), Domain::Space);
}

cplx fourier_at(const GridFunction& f, double k) {
  require(f.domain() == Domain::Space, ErrorCode::InvalidArgument, "fourier_at expects a spatial grid function");
  const SpatialGrid& g = f.grid();
  // Phase recurrence e^{-ik x_{j+1}} = e^{-ik x_j} e^{-ik dx}, renormalized to
  // keep the rotation on the unit circle over long grids.
  const cplx step = std::polar(1.0, -k * g.spacing());
  cplx phase = std::polar(1.0, -k * g.node(0));
  cplx acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    acc += f[j] * phase;
    phase *= step;
    if ((j & 63) == 63) phase = std::polar(1.0, -k * g.node(j + 1));
  }
  return acc * g.spacing() / kSqrt2Pi;
}

// ---------------------------------------------------------------------------

RankKFactored RankKFactored::make_symmetric(const SpatialGrid& grid, CMatrix u, CMatrix c) {
  require(static_cast<std::size_t>(u.rows()) == grid.size(), ErrorCode::InvalidArgument,
          "factor columns do not match the grid");
  require(c.rows() == u.cols() && c.cols() == u.cols(), ErrorCode::InvalidArgument,
          "coefficient matrix must be k x k");
  RankKFactored r{grid, u, u, std::move(c), true};
  return r;
}

RankKFactored RankKFactored::make_general(const SpatialGrid& grid, CMatrix u, CMatrix c, CMatrix w) {
  require(static_cast<std::size_t>(u.rows()) == grid.size() && static_cast<std::size_t>(w.rows()) == grid.size(),
          ErrorCode::InvalidArgument, "factor columns do not match the grid");
  require(c.rows() == u.cols() && c.cols() == w.cols(), ErrorCode::InvalidArgument,
          "coefficient matrix shape does not match the factors");
  return RankKFactored{grid, std::move(u), std::move(w), std::move(c), false};
}

Eigen::Index rep_dimension(const OperatorRep& rep) {
  return std::visit(
      [](const auto& r) -> Eigen::Index {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, DenseMatrix>) return r.matrix.rows();
        else return static_cast<Eigen::Index>(r.grid.size());
      },
      rep);
}

CVector apply(const OperatorRep& rep, const CVector& f) {
  return std::visit(
      [&](const auto& r) -> CVector {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, DenseMatrix>) {
          return r.matrix * f;
        } else if constexpr (std::is_same_v<T, FourierMultiplier>) {
          GridFunction fh = fourier(GridFunction(r.grid, f));
          CVector v = fh.values().cwiseProduct(r.multiplier.template cast<cplx>());
          return inverse_fourier(GridFunction(r.grid, std::move(v), Domain::Frequency)).values();
        } else if constexpr (std::is_same_v<T, RankKFactored>) {
          CVector coeffs = r.right.adjoint() * f * r.grid.spacing();
          return r.left * (r.coeff * coeffs);
        } else {
          return r.kernel * f * r.grid.spacing();
        }
      },
      rep);
}

CVector apply_adjoint(const OperatorRep& rep, const CVector& f) {
  return std::visit(
      [&](const auto& r) -> CVector {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, DenseMatrix>) {
          return r.self_adjoint ? CVector(r.matrix * f) : CVector(r.matrix.adjoint() * f);
        } else if constexpr (std::is_same_v<T, FourierMultiplier>) {
          return smoothlab::apply(rep, f);  // real multiplier
        } else if constexpr (std::is_same_v<T, RankKFactored>) {
          CVector coeffs = r.left.adjoint() * f * r.grid.spacing();
          return r.right * (r.coeff.adjoint() * coeffs);
        } else {
          return r.kernel.adjoint() * f * r.grid.spacing();
        }
      },
      rep);
}

GridFunction apply(const OperatorRep& rep, const GridFunction& f) {
  require(f.domain() == Domain::Space, ErrorCode::InvalidArgument, "operators act on spatial grid functions");
  return GridFunction(f.grid(), smoothlab::apply(rep, f.values()));
}

double hermiticity_defect(const CMatrix& m) {
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

DenseMatrix make_self_adjoint_matrix(CMatrix m) {
  require(m.rows() == m.cols(), ErrorCode::InvalidArgument, "matrix must be square");
  const double defect = hermiticity_defect(m);
  if (defect > 1e-12) {
    std::ostringstream msg;
    msg << "matrix is not self-adjoint (relative defect " << defect << ")";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  return DenseMatrix{std::move(m), true};
}

// ---------------------------------------------------------------------------

PowerIterationResult power_iteration_norm(const std::function<CVector(const CVector&)>& op,
                                          const std::function<CVector(const CVector&)>& op_adjoint,
                                          Eigen::Index dim, const PowerIterationOptions& options) {
  require(dim > 0, ErrorCode::InvalidArgument, "power iteration on an empty space");
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = cplx(normal(rng), normal(rng));
  v.normalize();

  PowerIterationResult result;
  double previous = -1.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    CVector bv = op(v);
    const double sigma = bv.norm();  // ||B v|| with ||v|| = 1 increases monotonically to ||B||
    if (sigma == 0.0) {  // a generic start vector only lands in the kernel of the zero operator
      result.vector = v;
      result.iterations = it;
      return result;
    }
    CVector w = op_adjoint(bv);
    const double wn = w.norm();
    result.norm = sigma;
    result.iterations = it;
    result.vector = v;
    if (previous >= 0.0 && std::abs(sigma - previous) <= options.relative_tolerance * sigma) return result;
    previous = sigma;
    if (wn == 0.0) return result;
    v = w / wn;
  }
  std::ostringstream msg;
  msg << "power iteration did not converge in " << options.max_iterations
      << " iterations; last estimate " << result.norm << ", last relative change "
      << std::abs(result.norm - previous) / std::max(result.norm, 1e-300);
  fail(ErrorCode::NonConvergence, msg.str());
}

PowerIterationResult op_norm_weighted(const OperatorRep& rep, WeightExponent s_in, WeightExponent s_out,
                                      const PowerIterationOptions& options) {
  const Eigen::Index n = rep_dimension(rep);
  RVector w_in(n), w_out(n);
  std::optional<SpatialGrid> grid;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (!std::is_same_v<T, DenseMatrix>) grid = r.grid;
      },
      rep);
  for (Eigen::Index i = 0; i < n; ++i) {
    // A bare matrix has no grid: weights are taken as 1 (s ignored), which is
    // the only meaningful choice without node positions.
    const double x = grid ? grid->node(static_cast<std::size_t>(i)) : 0.0;
    w_in[i] = grid ? jp_power(x, s_in.s) : 1.0;
    w_out[i] = grid ? jp_power(x, s_out.s) : 1.0;
  }
  auto op = [&](const CVector& f) -> CVector {
    return w_out.cast<cplx>().cwiseProduct(smoothlab::apply(rep, CVector(w_in.cast<cplx>().cwiseProduct(f))));
  };
  auto op_adj = [&](const CVector& f) -> CVector {
    return w_in.cast<cplx>().cwiseProduct(apply_adjoint(rep, CVector(w_out.cast<cplx>().cwiseProduct(f))));
  };
  return power_iteration_norm(op, op_adj, n, options);
}

// ---------------------------------------------------------------------------

CMatrix weighted_gram(const SpatialGrid& grid, const CMatrix& u, WeightExponent s) {
  CMatrix wu = u;
  for (Eigen::Index i = 0; i < u.rows(); ++i) wu.row(i) *= jp_power(grid.node(static_cast<std::size_t>(i)), -2.0 * s.s);
  return (u.adjoint() * wu) * grid.spacing();
}

namespace {

void require_nonnegative(const CMatrix& c) {
  const double scale = std::max(c.norm(), 1e-300);
  require(hermiticity_defect(c) <= 1e-12, ErrorCode::NotNonnegativeForm, "not a nonnegative form (C not Hermitian)");
  if (c.norm() == 0.0) return;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
    std::ostringstream msg;
    msg << "not a nonnegative form (smallest coefficient eigenvalue " << es.eigenvalues().minCoeff() << ")";
    fail(ErrorCode::NotNonnegativeForm, msg.str());
  }
}

// Square root and pseudo-inverse square root of a Hermitian PSD matrix.
std::pair<CMatrix, CMatrix> psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  RVector ev = es.eigenvalues();
  const double cut = 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  RVector root(ev.size()), inv_root(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double e = ev[i] > cut ? ev[i] : 0.0;
    root[i] = std::sqrt(e);
    inv_root[i] = e > 0.0 ? 1.0 / std::sqrt(e) : 0.0;
  }
  const CMatrix& q = es.eigenvectors();
  return {q * root.cast<cplx>().asDiagonal() * q.adjoint(), q * inv_root.cast<cplx>().asDiagonal() * q.adjoint()};
}

}  // namespace

FormMaximum form_maximum_from_gram(const CMatrix& coeff, const CMatrix& gram) {
  require_nonnegative(coeff);
  FormMaximum out;
  out.coefficients = CVector::Zero(coeff.rows());
  if (coeff.norm() == 0.0) return out;
  auto [g_half, g_inv_half] = psd_sqrt(0.5 * (gram + gram.adjoint()));
  CMatrix m = g_half * coeff * g_half;
  m = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const Eigen::Index top = es.eigenvalues().size() - 1;
  out.value = std::max(0.0, es.eigenvalues()[top]);
  out.coefficients = g_inv_half * es.eigenvectors().col(top);
  return out;
}

FormMaximum dual_norm_rank_k_maximizer(const RankKFactored& rep, WeightExponent s) {
  require(rep.symmetric, ErrorCode::InvalidArgument, "dual_norm_rank_k needs a symmetric factored form");
  return form_maximum_from_gram(rep.coeff, weighted_gram(rep.grid, rep.left, s));
}

double dual_norm_rank_k(const RankKFactored& rep, WeightExponent s) { return dual_norm_rank_k_maximizer(rep, s).value; }

namespace {

ReducedOperator reduce_factors(const SpatialGrid& grid, const CMatrix& left, const CMatrix& coeff,
                               const CMatrix& right) {
  const double dx = grid.spacing();
  CMatrix span(left.rows(), left.cols() + right.cols());
  span << left, right;
  span *= std::sqrt(dx);
  Eigen::ColPivHouseholderQR<CMatrix> qr(span);
  qr.setThreshold(1e-13);
  const Eigen::Index r = qr.rank();
  CMatrix q = CMatrix(qr.householderQ()).leftCols(r) / std::sqrt(dx);
  ReducedOperator out;
  out.matrix = (q.adjoint() * left * dx) * coeff * (right.adjoint() * q * dx);
  out.basis = std::move(q);
  return out;
}

}  // namespace

ReducedOperator reduce(const RankKFactored& rep) { return reduce_factors(rep.grid, rep.left, rep.coeff, rep.right); }

ReducedOperator reduce_weighted(const RankKFactored& rep, WeightExponent s) {
  CMatrix l = rep.left, r = rep.right;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double w = jp_power(rep.grid.node(static_cast<std::size_t>(i)), -s.s);
    l.row(i) *= w;
    r.row(i) *= w;
  }
  return reduce_factors(rep.grid, l, rep.coeff, r);
}

}  // namespace smoothlab
