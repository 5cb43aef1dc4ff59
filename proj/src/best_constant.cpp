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

#include <smoothlab/best_constant.hpp>
#include <smoothlab/evolution_norms.hpp>
#include <smoothlab/spectral_density.hpp>

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smoothlab {

namespace {

double edge_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

std::vector<double> fill_between(double lo, double hi, int count) {
  std::vector<double> out;
  const bool geometric = lo > 0.0;
  for (int j = 1; j <= count; ++j) {
    const double t = static_cast<double>(j) / (count + 1);
    out.push_back(geometric ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo));
  }
  return out;
}

Interval component_of(const SpectralFunction& sf, double lambda) {
  for (const Interval& c : sf.components())
    if (c.contains(lambda)) return c;
  fail(ErrorCode::OutOfDomain, "lambda0 is not inside an admissible part of the window");
}

}  // namespace

RhsSup rhs_sup(const OperatorModel& model, const SpectralFunction& sf, WeightExponent s,
               const std::vector<double>& lambda_grid, int rounds, int points_per_round) {
  std::vector<double> grid;
  for (double l : lambda_grid)
    if (sf.admissible(l)) grid.push_back(l);
  require(!grid.empty(), ErrorCode::InvalidArgument, "lambda grid is empty after excluding breakpoints");
  require(grid.size() >= 32, ErrorCode::InvalidArgument, "rhs_sup needs at least 32 admissible lambda points");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  RhsSup out;
  auto scan = weighted_density_sup(model, sf, s, grid);
  std::vector<double> lambdas = scan.lambdas, factors = scan.factors;
  bool always_edge = scan.at_edge;
  out.round_argmax.push_back(scan.argmax);
  {
    const auto i = static_cast<std::size_t>(std::find(lambdas.begin(), lambdas.end(), scan.argmax) - lambdas.begin());
    const double left = i > 0 ? lambdas[i] - lambdas[i - 1] : 0.0;
    const double right = i + 1 < lambdas.size() ? lambdas[i + 1] - lambdas[i] : 0.0;
    out.coarse_cell = std::max(left, right);
  }
  for (int r = 0; r < rounds; ++r) {
    const auto i = static_cast<std::size_t>(std::max_element(factors.begin(), factors.end()) - factors.begin());
    const Interval comp = component_of(sf, lambdas[i]);
    const double lo = i > 0 ? std::max(lambdas[i - 1], comp.lo) : comp.lo;
    const double hi = i + 1 < lambdas.size() ? std::min(lambdas[i + 1], comp.hi) : edge_or(comp.hi, 2.0 * lambdas[i] + 1.0);
    std::vector<double> extra;
    for (double l : fill_between(lo, hi, points_per_round))
      if (l != lambdas[i] && sf.admissible(l)) extra.push_back(l);
    if (extra.empty()) break;
    const auto add = weighted_density_sup(model, sf, s, extra);
    for (std::size_t j = 0; j < add.lambdas.size(); ++j) {
      const auto pos = std::lower_bound(lambdas.begin(), lambdas.end(), add.lambdas[j]);
      const auto k = pos - lambdas.begin();
      lambdas.insert(pos, add.lambdas[j]);
      factors.insert(factors.begin() + k, add.factors[j]);
    }
    const auto m = static_cast<std::size_t>(std::max_element(factors.begin(), factors.end()) - factors.begin());
    always_edge = always_edge && (m == 0 || m + 1 == lambdas.size());
    out.round_argmax.push_back(lambdas[m]);
  }
  const auto m = static_cast<std::size_t>(std::max_element(factors.begin(), factors.end()) - factors.begin());
  out.value = kSqrt2Pi * factors[m];
  out.argmax = lambdas[m];
  out.at_edge = always_edge;
  out.lambdas = std::move(lambdas);
  out.factors = std::move(factors);
  return out;
}

std::vector<double> sup_grid(const SpectralFunction& sf, std::size_t count) { return default_lambda_grid(sf, count); }

GridFunction density_near_maximizer(const OperatorModel& model, double lambda, WeightExponent s) {
  const SpatialGrid& g = model.grid();
  CVector f;
  const DensityRep dr = density_rep(model, lambda);
  const auto* factored = std::get_if<RankKFactored>(&dr.rep);
  if (model.kind() == ModelKind::FreeLaplacian1D) {
    const FreeMaximizer fm = free_density_maximizer(lambda, s);
    f = factored->left.col(0) * fm.beta_plus + factored->left.col(1) * fm.beta_minus;
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] *= jp_power(g.node(static_cast<std::size_t>(i)), -2.0 * s.s);
  } else if (factored && factored->symmetric) {
    const FormMaximum fm = dual_norm_rank_k_maximizer(*factored, s);
    f = factored->left * fm.coefficients;
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] *= jp_power(g.node(static_cast<std::size_t>(i)), -2.0 * s.s);
  } else if (const auto* dense = std::get_if<DenseMatrix>(&dr.rep)) {
    // Top eigenvector of <x>^{-s} M <x>^{-s}; a bare matrix carries no node positions.
    RVector w(dense->matrix.rows());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = jp_power(g.node(static_cast<std::size_t>(i)), -s.s);
    const CMatrix m = w.asDiagonal() * dense->matrix * w.asDiagonal();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
    f = es.eigenvectors().col(es.eigenvectors().cols() - 1).cwiseProduct(w.cast<cplx>());
  } else {
    const auto top = op_norm_weighted(dr.rep, WeightExponent{-s.s}, WeightExponent{-s.s});
    f = top.vector;
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] *= jp_power(g.node(static_cast<std::size_t>(i)), -s.s);
  }
  GridFunction out(g, f);
  const double n = weighted_norm(out, s);
  require(n > 0.0, ErrorCode::Inconsistency, "density maximizer vanished");
  return out.scaled(1.0 / n);
}

GridFunction wavepacket(const OperatorModel& model, Interval d, const GridFunction& psi) {
  const GridFunction p = spectral_projector(model, d, psi);
  const double n = weighted_norm(p, WeightExponent{0.0});
  require(n > 1e-12, ErrorCode::InvalidArgument, "psi is spectrally disjoint from the packet window");
  return p.scaled(1.0 / n);
}

LowerSequence lhs_lower(const OperatorModel& model, const SpectralFunction& sf, double lambda0,
                        const std::vector<double>& hs, const GridFunction& psi) {
  LowerSequence out;
  out.lambda0 = lambda0;
  const Interval comp = component_of(sf, lambda0);
  auto weight = [&](double l) { return std::abs(sf.sigma(l)) / std::sqrt(sf.a_prime(l)); };
  for (double h : hs) {
    require(h > 0.0 && lambda0 - 0.5 * h >= comp.lo && lambda0 + 0.5 * h <= comp.hi, ErrorCode::InvalidArgument,
            "packet window D_h leaves the admissible part of J");
    const double a = lambda0 - 0.5 * h, b = lambda0 + 0.5 * h;
    const std::vector<double> cuts{a, lambda0, b};
    const double num = detail::integrate_complex(
        [&](double l) { return weight(l) * density_pairing(model, l, psi, psi); }, cuts, 1e-12).real();
    const double den = detail::integrate_complex(
        [&](double l) { return density_pairing(model, l, psi, psi); }, cuts, 1e-12).real();
    require(den > 1e-300, ErrorCode::NonConvergence, "packet normalization collapsed: ||E(D_h) psi|| = 0");
    out.h.push_back(h);
    out.k.push_back(num / (std::sqrt(h) * std::sqrt(den)));
  }
  out.limit = weight(lambda0) * std::sqrt(std::max(density_pairing(model, lambda0, psi, psi).real(), 0.0));
  const std::size_t n = out.k.size();
  out.extrapolated = n >= 2 ? (4.0 * out.k[n - 1] - out.k[n - 2]) / 3.0 : n == 1 ? out.k[0] : 0.0;
  return out;
}

BestConstantReport certify(const OperatorModel& model, const SpectralFunction& sf, WeightExponent s,
                           const CertifyOptions& options) {
  sf.validate();
  BestConstantReport rep;
  require(sf.window.width() > options.h_min, ErrorCode::Configuration, "window is narrower than the smallest packet width");
  rep.sup = rhs_sup(model, sf, s, sup_grid(sf, options.grid_points), options.rounds, options.points_per_round);
  const double l0 = rep.sup.argmax;
  const Interval comp = component_of(sf, l0);
  const double width = std::isfinite(comp.width()) ? comp.width() : std::max(l0, 1.0);
  const double h0 = std::min(options.h0_fraction * width, 2.0 * (1.0 - 1e-9) * std::min(l0 - comp.lo, comp.hi - l0));
  std::vector<double> hs;
  for (int k = 0; k < options.h_levels; ++k) hs.push_back(h0 * std::pow(0.5, k));
  require(!hs.empty() && hs.back() >= options.h_min, ErrorCode::Configuration,
          "window is too narrow around the argmax for the packet sequence");

  const GridFunction psi = density_near_maximizer(model, l0, s);
  rep.lower = lhs_lower(model, sf, l0, hs, psi);
  rep.lhs_best = kSqrt2Pi * *std::max_element(rep.lower.k.begin(), rep.lower.k.end());
  rep.gap = rep.sup.value > 0.0 ? (rep.sup.value - rep.lhs_best) / rep.sup.value : 0.0;

  const bool absolutely_continuous =
      model.kind() == ModelKind::FreeLaplacian1D || model.kind() == ModelKind::PerturbedSchrodinger1D;
  rep.tolerance = options.tolerance > 0.0 ? options.tolerance : absolutely_continuous ? 0.05 : 0.20;
  rep.upper_respected = true;
  for (double k : rep.lower.k)
    if (kSqrt2Pi * k > rep.sup.value * 1.01 + 1e-300) rep.upper_respected = false;
  rep.pass = rep.upper_respected && rep.gap <= rep.tolerance && rep.gap >= -0.01;

  if (rep.sup.at_edge) rep.notes.push_back("sup not attained in grid interior");
  if (!absolutely_continuous)
    rep.notes.push_back("epsilon-smoothed surrogate: pure point spectrum, equality of norm and sup is not certified");
  if (!rep.upper_respected) rep.notes.push_back("a packet value exceeds the sup: the upper bound is violated");
  const double last = rep.lower.k.back();
  if (rep.lower.extrapolated > 0.0 && std::abs(last - rep.lower.extrapolated) > 0.01 * rep.lower.extrapolated) {
    std::ostringstream msg;
    msg << "K_h not converged: smallest h is " << 100.0 * std::abs(last / rep.lower.extrapolated - 1.0)
        << "% from the extrapolated limit";
    rep.notes.push_back(msg.str());
  }
  return rep;
}

}  // namespace smoothlab
