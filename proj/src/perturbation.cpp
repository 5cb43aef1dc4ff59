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

#include <smoothlab/parallel.hpp>
#include <smoothlab/perturbation.hpp>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smoothlab {

cplx free_wavenumber(double lambda, double epsilon, Sign sign) {
  if (epsilon == 0.0) {
    require(lambda != 0.0, ErrorCode::OutOfDomain, "free resolvent boundary value is singular at lambda = 0");
    if (lambda > 0.0) return sign_value(sign) * std::sqrt(lambda);
    return {0.0, std::sqrt(-lambda)};
  }
  cplx kappa = std::sqrt(cplx(lambda, sign_value(sign) * epsilon));
  if (kappa.imag() < 0.0) kappa = -kappa;
  return kappa;
}

cplx free_resolvent_value(cplx kappa, double distance) {
  return cplx(0.0, 1.0) / (2.0 * kappa) * std::exp(cplx(0.0, 1.0) * kappa * distance);
}

IntegralKernel free_resolvent_kernel(double lambda, Sign sign, const SpatialGrid& grid, double epsilon) {
  const cplx kappa = free_wavenumber(lambda, epsilon, sign);
  const auto n = static_cast<Eigen::Index>(grid.size());
  // Depends on |i - j| only.
  CVector row(n);
  for (Eigen::Index d = 0; d < n; ++d) row[d] = free_resolvent_value(kappa, static_cast<double>(d) * grid.spacing());
  CMatrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = row[std::abs(i - j)];
  return IntegralKernel{grid, std::move(k)};
}

double free_resolvent_norm(double lambda, Sign sign, const SpatialGrid& grid, WeightExponent s) {
  const OperatorRep rep = free_resolvent_kernel(lambda, sign, grid);
  return op_norm_weighted(rep, WeightExponent{-s.s}, WeightExponent{-s.s}).norm;
}

std::vector<Eigen::Index> potential_support(const DenseMatrix& v, double tail) {
  const auto n = v.matrix.rows();
  RVector row_max(n);
  for (Eigen::Index i = 0; i < n; ++i) row_max[i] = v.matrix.row(i).cwiseAbs().maxCoeff();
  const double top = n > 0 ? row_max.maxCoeff() : 0.0;
  std::vector<Eigen::Index> s;
  if (top == 0.0) return s;
  for (Eigen::Index i = 0; i < n; ++i)
    if (row_max[i] > tail * top) s.push_back(i);
  return s;
}

// ---------------------------------------------------------------------------

CVector LippmannSchwingerState::apply_vr(const CVector& f) const {
  CVector out = CVector::Zero(f.size());
  if (support.empty()) return out;
  const CVector t = vr_rows * f;
  for (std::size_t a = 0; a < support.size(); ++a) out[support[a]] = t[static_cast<Eigen::Index>(a)];
  return out;
}

CVector LippmannSchwingerState::apply_inverse(const CVector& f) const {
  CVector out = f;
  if (support.empty()) return out;
  const CVector t = inv_block * (vr_rows * f);
  for (std::size_t a = 0; a < support.size(); ++a) out[support[a]] -= t[static_cast<Eigen::Index>(a)];
  return out;
}

CVector LippmannSchwingerState::apply_inverse_adjoint(const CVector& f) const {
  if (support.empty()) return f;
  CVector fs(support_size());
  for (std::size_t a = 0; a < support.size(); ++a) fs[static_cast<Eigen::Index>(a)] = f[support[a]];
  return f - vr_rows.adjoint() * (inv_block.adjoint() * fs);
}

CVector LippmannSchwingerState::resolvent_from_support(const CVector& g_support) const {
  if (support.empty()) return CVector::Zero(static_cast<Eigen::Index>(grid.size()));
  return kernel_rows.transpose() * g_support * grid.spacing();
}

cplx LippmannSchwingerState::determinant() const {
  if (support.empty()) return 1.0;
  return (CMatrix::Identity(support_size(), support_size()) + vr_block).fullPivLu().determinant();
}

namespace {

double largest_singular_value(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  const CMatrix g = a.rows() <= a.cols() ? CMatrix(a * a.adjoint()) : CMatrix(a.adjoint() * a);
  const double top = Eigen::SelfAdjointEigenSolver<CMatrix>(g, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, top));
}

// ||I - iota_S Y|| with Y an m x n matrix: the operator is the identity off
// span{e_S, rows of Y restricted to the complement}, so the norm reduces to a
// (m + m) x (m + m) block problem.
double identity_minus_support_rank_norm(const CMatrix& y, const std::vector<Eigen::Index>& support) {
  const Eigen::Index m = static_cast<Eigen::Index>(support.size());
  const Eigen::Index n = y.cols();
  std::vector<char> in_s(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i : support) in_s[static_cast<std::size_t>(i)] = 1;
  CMatrix y_s(m, m), z(n - m, m);
  Eigen::Index c = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (in_s[static_cast<std::size_t>(j)]) continue;
    z.row(c++) = y.col(j).adjoint();
  }
  for (Eigen::Index a = 0; a < m; ++a) y_s.col(a) = y.col(support[static_cast<std::size_t>(a)]);
  const Eigen::Index mr = std::min(m, n - m);
  CMatrix r2 = CMatrix::Zero(mr, m);
  if (mr > 0) {
    Eigen::HouseholderQR<CMatrix> qr(z);
    r2 = qr.matrixQR().topRows(mr).triangularView<Eigen::Upper>();
  }
  CMatrix block = CMatrix::Zero(m + mr, m + mr);
  block.topLeftCorner(m, m) = CMatrix::Identity(m, m) - y_s;
  block.topRightCorner(m, mr) = -r2.adjoint();
  block.bottomRightCorner(mr, mr) = CMatrix::Identity(mr, mr);
  double norm = largest_singular_value(block);
  if (n > m + mr) norm = std::max(norm, 1.0);
  return norm;
}

}  // namespace

LippmannSchwingerState assemble_vr(const DenseMatrix& v, const SpatialGrid& grid, double lambda, Sign sign,
                                   WeightExponent s, const LippmannSchwingerOptions& options) {
  require(static_cast<std::size_t>(v.matrix.rows()) == grid.size(), ErrorCode::InvalidArgument,
          "potential does not match the grid");
  require(hermiticity_defect(v.matrix) <= 1e-12, ErrorCode::InvalidArgument, "potential is not symmetric");
  LippmannSchwingerState st;
  st.lambda = lambda;
  st.epsilon = options.epsilon;
  st.sign = sign;
  st.s = s;
  st.grid = grid;
  st.support = potential_support(v, options.support_tail);
  const Eigen::Index m = st.support_size();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const cplx kappa = free_wavenumber(lambda, options.epsilon, sign);
  if (m == 0) {
    st.inv_block = CMatrix(0, 0);
    return st;
  }
  st.v_block.resize(m, m);
  st.kernel_rows.resize(m, n);
  for (Eigen::Index a = 0; a < m; ++a) {
    const double xa = grid.node(static_cast<std::size_t>(st.support[static_cast<std::size_t>(a)]));
    for (Eigen::Index b = 0; b < m; ++b) st.v_block(a, b) = v.matrix(st.support[static_cast<std::size_t>(a)], st.support[static_cast<std::size_t>(b)]);
    for (Eigen::Index j = 0; j < n; ++j)
      st.kernel_rows(a, j) = free_resolvent_value(kappa, std::abs(xa - grid.node(static_cast<std::size_t>(j))));
  }
  st.vr_rows = st.v_block * st.kernel_rows * grid.spacing();
  st.vr_block.resize(m, m);
  for (Eigen::Index b = 0; b < m; ++b) st.vr_block.col(b) = st.vr_rows.col(st.support[static_cast<std::size_t>(b)]);

  const CMatrix system = CMatrix::Identity(m, m) + st.vr_block;
  Eigen::PartialPivLU<CMatrix> lu(system);
  const double rcond = lu.rcond();
  if (!(rcond >= options.singular_rcond)) {
    std::ostringstream msg;
    msg << "I + V R is singular at lambda = " << lambda << " (reciprocal condition " << rcond << ")";
    fail(ErrorCode::Singular, msg.str());
  }
  st.inv_block = lu.inverse();
  st.block_residual = (system * st.inv_block - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff();

  if (options.compute_norms) {
    RVector w(n), w_inv(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      w[j] = jp_power(grid.node(static_cast<std::size_t>(j)), s.s);
      w_inv[j] = 1.0 / w[j];
    }
    RVector w_s(m);
    for (Eigen::Index a = 0; a < m; ++a) w_s[a] = w[st.support[static_cast<std::size_t>(a)]];
    const CMatrix weighted_rows = w_s.cast<cplx>().asDiagonal() * st.vr_rows * w_inv.cast<cplx>().asDiagonal();
    st.vr_norm_s = largest_singular_value(weighted_rows);
    // W (I + T)^{-1} W^{-1} = I - iota_S Y with Y = W_S M T_rows W^{-1}.
    const CMatrix y = w_s.cast<cplx>().asDiagonal() * st.inv_block * st.vr_rows * w_inv.cast<cplx>().asDiagonal();
    st.inv_norm_s = identity_minus_support_rank_norm(y, st.support);
  }
  return st;
}

LippmannSchwingerState assemble_vr(const PotentialSpec& v, const SpatialGrid& grid, double lambda, Sign sign,
                                   WeightExponent s, const LippmannSchwingerOptions& options) {
  return assemble_vr(potential_matrix(v, grid), grid, lambda, sign, s, options);
}

// ---------------------------------------------------------------------------

LapScanReport lap_condition_scan(const PotentialSpec& v, const SpatialGrid& grid, WeightExponent s,
                                 const std::vector<double>& lambdas, const LapScanOptions& options) {
  require(!lambdas.empty(), ErrorCode::InvalidArgument, "empty lambda grid");
  require(std::is_sorted(lambdas.begin(), lambdas.end()), ErrorCode::InvalidArgument, "lambda grid must be sorted");
  const DenseMatrix vm = potential_matrix(v, grid);
  LapScanReport rep;

  struct Eval {
    LapPoint point;
    cplx det = 0.0;
  };
  rep.points.resize(lambdas.size());
  auto evals = parallel_map<Eval>(lambdas.size(), [&](std::size_t i) {
    Eval e;
    e.point.lambda = lambdas[i];
    try {
      const auto plus = assemble_vr(vm, grid, lambdas[i], Sign::Plus, s, options.ls);
      e.point.inv_norm_plus = plus.inv_norm_s;
      e.point.vr_norm_plus = plus.vr_norm_s;
      e.det = plus.determinant();
      if (lambdas[i] > 0.0 || options.ls.epsilon > 0.0) {
        const auto minus = assemble_vr(vm, grid, lambdas[i], Sign::Minus, s, options.ls);
        e.point.inv_norm_minus = minus.inv_norm_s;
        e.point.vr_norm_minus = minus.vr_norm_s;
      } else {
        e.point.inv_norm_minus = plus.inv_norm_s;
        e.point.vr_norm_minus = plus.vr_norm_s;
      }
      e.point.excluded = std::max(e.point.inv_norm_plus, e.point.inv_norm_minus) > options.exclusion_threshold;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::Singular) throw;
      e.point.excluded = true;
      e.point.inv_norm_plus = e.point.inv_norm_minus = std::numeric_limits<double>::infinity();
    }
    return e;
  });

  // Real determinant sign changes below zero energy bracket discrete eigenvalues.
  for (std::size_t i = 0; i + 1 < evals.size(); ++i) {
    const double a = lambdas[i], b = lambdas[i + 1];
    if (b >= 0.0 || options.ls.epsilon > 0.0) break;
    const double da = evals[i].det.real(), db = evals[i + 1].det.real();
    if (!(da * db < 0.0) || !std::isfinite(da) || !std::isfinite(db)) continue;
    auto det_at = [&](double l) {
      LippmannSchwingerOptions o = options.ls;
      o.compute_norms = false;
      o.singular_rcond = 0.0;
      return assemble_vr(vm, grid, l, Sign::Plus, s, o).determinant().real();
    };
    boost::uintmax_t iters = 100;
    auto tol = boost::math::tools::eps_tolerance<double>(40);
    const auto root = boost::math::tools::toms748_solve(det_at, a, b, da, db, tol, iters);
    rep.determinant_roots.push_back(0.5 * (root.first + root.second));
    evals[i].point.excluded = true;
    evals[i + 1].point.excluded = true;
  }

  const double top_start = lambdas.back() / 10.0;
  bool any_top = false;
  for (std::size_t i = 0; i < evals.size(); ++i) {
    const LapPoint& p = evals[i].point;
    rep.points[i] = p;
    if (p.excluded) {
      rep.exclusions.push_back(p.lambda);
      continue;
    }
    rep.sup_inv_norm = std::max({rep.sup_inv_norm, p.inv_norm_plus, p.inv_norm_minus});
    if (p.lambda >= top_start) {
      any_top = true;
      rep.top_decade_vr_norm = std::max({rep.top_decade_vr_norm, p.vr_norm_plus, p.vr_norm_minus});
    }
  }
  for (double r : rep.determinant_roots) rep.exclusions.push_back(r);
  std::sort(rep.exclusions.begin(), rep.exclusions.end());
  rep.limsup_ok = any_top && rep.top_decade_vr_norm < 1.0;
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

CMatrix plane_waves(const SpatialGrid& grid, double k) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  CMatrix e(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.node(static_cast<std::size_t>(i));
    e(i, 0) = std::polar(1.0 / kSqrt2Pi, k * x);
    e(i, 1) = std::polar(1.0 / kSqrt2Pi, -k * x);
  }
  return e;
}

// A~ = A X+ - R- X+ V A X- with A = alpha (|e+><e+| + |e-><e-|):
// left [e, R- X+ V e], right [X+^* e, X-^* e], coefficients diag(alpha, -alpha).
RankKFactored build_perturbed(const DenseMatrix& v, const SpatialGrid& grid, double lambda,
                              const LippmannSchwingerOptions& options) {
  require(lambda > 0.0, ErrorCode::OutOfDomain, "perturbed density needs lambda > 0");
  LippmannSchwingerOptions o = options;
  o.compute_norms = false;
  const WeightExponent unused{0.0};
  const auto plus = assemble_vr(v, grid, lambda, Sign::Plus, unused, o);
  const auto minus = assemble_vr(v, grid, lambda, Sign::Minus, unused, o);
  const double k = std::sqrt(lambda);
  const double alpha = 1.0 / (2.0 * k);
  const CMatrix e = plane_waves(grid, k);
  const auto n = e.rows();
  CMatrix left(n, 4), right(n, 4);
  left.leftCols(2) = e;
  for (int c = 0; c < 2; ++c) {
    right.col(c) = plus.apply_inverse_adjoint(e.col(c));
    right.col(2 + c) = minus.apply_inverse_adjoint(e.col(c));
    if (plus.support.empty()) {
      left.col(2 + c).setZero();
      continue;
    }
    // V e lives on the support, and so does X+ applied to it.
    const Eigen::Index m = plus.support_size();
    CVector g(m);
    for (Eigen::Index a = 0; a < m; ++a) g[a] = e(plus.support[static_cast<std::size_t>(a)], c);
    g = plus.v_block * g;
    g -= plus.inv_block * (plus.vr_block * g);
    left.col(2 + c) = minus.resolvent_from_support(g);
  }
  CMatrix coeff = CMatrix::Zero(4, 4);
  coeff(0, 0) = coeff(1, 1) = alpha;
  coeff(2, 2) = coeff(3, 3) = -alpha;
  return RankKFactored::make_general(grid, std::move(left), std::move(coeff), std::move(right));
}

}  // namespace

PerturbedDensity perturbed_density(const DenseMatrix& v, const SpatialGrid& grid, double lambda, WeightExponent s,
                                   double tolerance, const LippmannSchwingerOptions& options) {
  PerturbedDensity out;
  out.lambda = lambda;
  out.rep = build_perturbed(v, grid, lambda, options);
  const ReducedOperator red = reduce_weighted(out.rep, s);
  out.hermiticity_defect = hermiticity_defect(red.matrix);
  const CMatrix h = 0.5 * (red.matrix + red.matrix.adjoint());
  const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
  out.norm = std::max(0.0, ev.maxCoeff());
  out.min_eigenvalue = out.norm > 0.0 ? ev.minCoeff() / out.norm : 0.0;
  const ReducedOperator free_red = reduce_weighted(free_density_factored(grid, lambda), s);
  const CMatrix fh = 0.5 * (free_red.matrix + free_red.matrix.adjoint());
  out.free_norm = Eigen::SelfAdjointEigenSolver<CMatrix>(fh, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  out.ratio = out.free_norm > 0.0 ? out.norm / out.free_norm : 0.0;
  if (out.hermiticity_defect > tolerance || out.min_eigenvalue < -tolerance) {
    std::ostringstream msg;
    msg << "formula/inversion inconsistency at lambda = " << lambda << " (Hermiticity defect "
        << out.hermiticity_defect << ", relative smallest eigenvalue " << out.min_eigenvalue << ")";
    fail(ErrorCode::Inconsistency, msg.str());
  }
  return out;
}

RankKFactored perturbed_density_factored(const OperatorModel& model, double lambda) {
  require(model.kind() == ModelKind::PerturbedSchrodinger1D, ErrorCode::InvalidArgument,
          "perturbed density needs a perturbed line model");
  return build_perturbed(model.potential_on_grid(), model.grid(), lambda, {});
}

MatrixPerturbationCheck perturbed_density_matrix(const CMatrix& h, const CMatrix& v, double lambda, double epsilon) {
  require(h.rows() == h.cols() && v.rows() == h.rows() && v.cols() == h.cols(), ErrorCode::InvalidArgument,
          "H and V must be square of equal size");
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "matrix perturbation chain needs epsilon > 0");
  require(hermiticity_defect(h) <= 1e-12 && hermiticity_defect(v) <= 1e-12, ErrorCode::InvalidArgument,
          "H and V must be Hermitian");
  const auto n = h.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const cplx zp(lambda, epsilon), zm(lambda, -epsilon);
  const cplx two_pi_i(0.0, 2.0 * kPi);
  auto inv = [](const CMatrix& m) { return CMatrix(m.partialPivLu().inverse()); };
  const CMatrix rp = inv(h - zp * id), rm = inv(h - zm * id);
  const CMatrix a = (rp - rm) / two_pi_i;
  const CMatrix xp = inv(id + v * rp), xm = inv(id + v * rm);
  MatrixPerturbationCheck out;
  out.chain = a * xp - rm * xp * v * a * xm;
  out.literal = a * xp - xp * v * a * xm;
  const CMatrix ht = h + v;
  out.direct = (inv(ht - zp * id) - inv(ht - zm * id)) / two_pi_i;
  const double scale = out.direct.norm();
  out.relative_error = (out.chain - out.direct).norm() / scale;
  out.literal_relative_error = (out.literal - out.direct).norm() / scale;
  const CMatrix lhs = (xp - xm) / two_pi_i;
  const CMatrix rhs = -xp * v * a * xm;
  out.intermediate_error = (lhs - rhs).norm() / std::max(rhs.norm(), 1e-300);
  return out;
}

// ---------------------------------------------------------------------------

SmoothingBatchReport perturbed_smoothing_check(const PotentialSpec& v, const SpatialGrid& grid,
                                               const SpectralFunction& sf, WeightExponent s,
                                               const std::vector<GridFunction>& batch,
                                               const SmoothingBatchOptions& options) {
  require(sf.window.lo > 0.0 && std::isfinite(sf.window.hi), ErrorCode::InvalidArgument,
          "perturbed smoothing check needs a bounded window in (0, inf)");
  require(!batch.empty(), ErrorCode::InvalidArgument, "empty batch");
  const DenseMatrix vm = potential_matrix(v, grid);
  const double ka = std::sqrt(sf.window.lo), kb = std::sqrt(sf.window.hi);
  const int panels = std::max(4, static_cast<int>(std::ceil(options.panels_per_unit_k * (kb - ka))));
  using GL = boost::math::quadrature::gauss<double, 16>;
  std::vector<double> nodes, weights;
  const double width = (kb - ka) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = ka + (p + 0.5) * width, half = 0.5 * width;
    const auto& absc = GL::abscissa();
    const auto& wts = GL::weights();
    for (std::size_t i = 0; i < absc.size(); ++i) {
      const double xs[2] = {absc[i], -absc[i]};
      for (int sgn = 0; sgn < (absc[i] == 0.0 ? 1 : 2); ++sgn) {
        nodes.push_back(mid + half * xs[sgn]);
        weights.push_back(half * wts[i]);
      }
    }
  }

  // Per node: sum over the batch of (sigma^2 / a') ||A~ phi||_{-s}^2 2k w.
  const std::size_t nb = batch.size();
  auto contributions = parallel_map<std::vector<double>>(nodes.size(), [&](std::size_t q) {
    const double k = nodes[q], lambda = k * k;
    std::vector<double> c(nb, 0.0);
    if (!sf.admissible(lambda)) return c;
    const RankKFactored rep = build_perturbed(vm, grid, lambda, options.ls);
    const double sig = sf.sigma(lambda);
    const double factor = sig * sig / sf.a_prime(lambda) * 2.0 * k * weights[q];
    for (std::size_t b = 0; b < nb; ++b) {
      const GridFunction out = smoothlab::apply(OperatorRep(rep), batch[b]);
      const double wn = weighted_norm(out, WeightExponent{-s.s});
      c[b] = factor * wn * wn;
    }
    return c;
  });

  SmoothingBatchReport rep;
  rep.ratios.assign(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    double acc = 0.0;
    for (const auto& c : contributions) acc += c[b];
    const double lhs = kSqrt2Pi * std::sqrt(acc);
    rep.ratios[b] = lhs / weighted_norm(batch[b], WeightExponent{0.0});
  }
  rep.empirical_constant = *std::max_element(rep.ratios.begin(), rep.ratios.end());

  auto lambdas = log_spaced(sf.window.lo, sf.window.hi, static_cast<std::size_t>(std::max(4, options.bound_points)));
  lambdas.front() *= 1.0 + 1e-9;
  lambdas.back() *= 1.0 - 1e-9;
  struct BoundEval {
    double value = 0.0;
    double ratio = 0.0;
  };
  auto evals = parallel_map<BoundEval>(lambdas.size(), [&](std::size_t i) {
    BoundEval e;
    if (!sf.admissible(lambdas[i])) return e;
    const PerturbedDensity pd = perturbed_density(vm, grid, lambdas[i], s, 1e-8, options.ls);
    e.value = std::abs(sf.sigma(lambdas[i])) / std::sqrt(sf.a_prime(lambdas[i])) * std::sqrt(pd.norm);
    e.ratio = pd.ratio;
    return e;
  });
  for (std::size_t i = 0; i < evals.size(); ++i) {
    if (evals[i].value > rep.sup_bound) {
      rep.sup_bound = evals[i].value;
      rep.argmax_lambda = lambdas[i];
    }
    rep.max_norm_ratio = std::max(rep.max_norm_ratio, evals[i].ratio);
  }
  rep.sup_bound *= kSqrt2Pi;
  rep.pass = rep.empirical_constant <= rep.sup_bound * (1.0 + options.tolerance);
  return rep;
}

}  // namespace smoothlab
