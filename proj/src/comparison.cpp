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
#include <smoothlab/comparison.hpp>
#include <smoothlab/parallel.hpp>
#include <smoothlab/spectral_density.hpp>

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smoothlab {

namespace {

struct Pair {
  double left = 0.0, right = 0.0;
};

double margin(const Pair& p) {
  const double scale = std::max({std::abs(p.left), std::abs(p.right), 1e-300});
  return (p.left - p.right) / scale;
}

void require_same_window(const ComparisonConfig& cfg) {
  require(cfg.sf.window.lo == cfg.sf_tilde.window.lo && cfg.sf.window.hi == cfg.sf_tilde.window.hi,
          ErrorCode::InvalidArgument, "both triples must share the energy window");
  cfg.sf.validate();
  cfg.sf_tilde.validate();
}

bool admissible_both(const ComparisonConfig& cfg, double l) { return cfg.sf.admissible(l) && cfg.sf_tilde.admissible(l); }

ConditionScan scan_condition(const ComparisonConfig& cfg, const std::vector<double>& grid,
                             const std::function<Pair(double)>& eval, const ComparisonOptions& options) {
  ConditionScan scan;
  std::vector<double> lambdas;
  for (double l : grid)
    if (admissible_both(cfg, l)) lambdas.push_back(l);
  require(!lambdas.empty(), ErrorCode::InvalidArgument, "lambda grid is empty after excluding breakpoints");
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  std::vector<Pair> vals = parallel_map<Pair>(lambdas.size(), [&](std::size_t i) { return eval(lambdas[i]); });

  auto argmin = [&] {
    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
      if (margin(vals[i]) < margin(vals[best])) best = i;
    return best;
  };
  for (int r = 0; r < options.rounds; ++r) {
    const std::size_t i = argmin();
    const double lo = i > 0 ? lambdas[i - 1] : lambdas[i];
    const double hi = i + 1 < lambdas.size() ? lambdas[i + 1] : lambdas[i];
    if (!(hi > lo)) break;
    std::vector<double> extra;
    for (int j = 1; j <= options.points_per_round; ++j) {
      const double t = static_cast<double>(j) / (options.points_per_round + 1);
      const double l = lo > 0.0 ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
      if (l != lambdas[i] && admissible_both(cfg, l)) extra.push_back(l);
    }
    const auto add = parallel_map<Pair>(extra.size(), [&](std::size_t k) { return eval(extra[k]); });
    for (std::size_t k = 0; k < extra.size(); ++k) {
      const auto pos = std::lower_bound(lambdas.begin(), lambdas.end(), extra[k]);
      vals.insert(vals.begin() + (pos - lambdas.begin()), add[k]);
      lambdas.insert(pos, extra[k]);
    }
  }
  const std::size_t m = argmin();
  scan.min_margin = margin(vals[m]);
  scan.argmin = lambdas[m];
  scan.holds = scan.min_margin >= -options.condition_slack;
  scan.lambdas = std::move(lambdas);
  for (const Pair& p : vals) {
    scan.left.push_back(p.left);
    scan.right.push_back(p.right);
  }
  return scan;
}

double weight(const SpectralFunction& sf, double l) { return std::abs(sf.sigma(l)) / std::sqrt(sf.a_prime(l)); }

bool ordered(double lhs, double rhs, double tol) { return rhs == 0.0 || lhs >= rhs * (1.0 - tol); }

}  // namespace

LocalReport check_local(const OperatorModel& h, const OperatorModel& h_tilde, const ComparisonConfig& cfg,
                        const GridFunction& phi, const GridFunction& psi, const std::vector<double>& lambdas,
                        const ComparisonOptions& options) {
  require_same_window(cfg);
  LocalReport rep;
  rep.condition = scan_condition(cfg, lambdas, [&](double l) {
    return Pair{weight(cfg.sf, l) * std::abs(density_pairing(h, l, phi, psi)),
                weight(cfg.sf_tilde, l) * std::abs(density_pairing(h_tilde, l, phi, psi))};
  }, options);
  rep.lhs_spectral = scalar_spectral_side(h, cfg.sf, phi, psi, options.identity.lambda_tolerance);
  rep.rhs_spectral = scalar_spectral_side(h_tilde, cfg.sf_tilde, phi, psi, options.identity_tilde.lambda_tolerance);
  if (options.time_side) {
    rep.lhs_norm = identity_scalar(h, cfg.sf, phi, psi, options.identity).lhs;
    rep.rhs_norm = identity_scalar(h_tilde, cfg.sf_tilde, phi, psi, options.identity_tilde).lhs;
  } else {
    rep.lhs_norm = rep.lhs_spectral;
    rep.rhs_norm = rep.rhs_spectral;
  }
  rep.conclusion_holds = ordered(rep.lhs_norm, rep.rhs_norm, options.conclusion_tolerance);
  return rep;
}

LocalReport check_global(const OperatorModel& h, const OperatorModel& h_tilde, const ComparisonConfig& cfg,
                         const GridFunction& phi, WeightExponent s, const std::vector<double>& lambdas,
                         const ComparisonOptions& options) {
  require_same_window(cfg);
  LocalReport rep;
  const WeightExponent neg{-s.s};
  rep.condition = scan_condition(cfg, lambdas, [&](double l) {
    return Pair{weight(cfg.sf, l) * weighted_norm(density_apply(h, l, phi), neg),
                weight(cfg.sf_tilde, l) * weighted_norm(density_apply(h_tilde, l, phi), neg)};
  }, options);
  rep.lhs_spectral = dual_spectral_side(h, cfg.sf, phi, s, options.identity.lambda_tolerance);
  rep.rhs_spectral = dual_spectral_side(h_tilde, cfg.sf_tilde, phi, s, options.identity_tilde.lambda_tolerance);
  if (options.time_side) {
    rep.lhs_norm = identity_dual(h, cfg.sf, phi, s, options.identity).lhs;
    rep.rhs_norm = identity_dual(h_tilde, cfg.sf_tilde, phi, s, options.identity_tilde).lhs;
  } else {
    rep.lhs_norm = rep.lhs_spectral;
    rep.rhs_norm = rep.rhs_spectral;
  }
  rep.conclusion_holds = ordered(rep.lhs_norm, rep.rhs_norm, options.conclusion_tolerance);
  return rep;
}

UniformReport check_uniform(const OperatorModel& h, const OperatorModel& h_tilde, const ComparisonConfig& cfg,
                            WeightExponent s, const std::vector<double>& lambdas,
                            const std::vector<GridFunction>& batch, double slack, const ComparisonOptions& options) {
  require_same_window(cfg);
  UniformReport rep;
  rep.slack = slack;
  rep.condition = scan_condition(cfg, lambdas, [&](double l) {
    const double w = weight(cfg.sf, l), wt = weight(cfg.sf_tilde, l);
    return Pair{w * w * density_norm(h, l, s), wt * wt * density_norm(h_tilde, l, s)};
  }, options);
  rep.c0 = rhs_sup(h, cfg.sf, s, lambdas).value;
  rep.ratios = parallel_map<double>(batch.size(), [&](std::size_t i) {
    const double n = weighted_norm(batch[i], WeightExponent{0.0});
    return n > 0.0 ? dual_spectral_side(h_tilde, cfg.sf_tilde, batch[i], s, 1e-8) / n : 0.0;
  });
  for (double r : rep.ratios) rep.max_ratio = std::max(rep.max_ratio, r);
  rep.transferred = rep.max_ratio <= rep.c0 * (1.0 + slack);
  rep.pass = rep.condition.holds && rep.transferred;
  std::ostringstream note;
  note << "norm-level condition (sup over psi on the H side, the A~ maximizer on the H~ side); ";
  if (!rep.condition.holds)
    note << "condition fails at lambda = " << rep.condition.argmin << " with relative margin " << rep.condition.min_margin;
  else
    note << "condition holds with relative margin " << rep.condition.min_margin;
  rep.note = note.str();
  return rep;
}

Reparametrization power_map(double alpha) {
  require(alpha > 0.0, ErrorCode::InvalidArgument, "power map needs alpha > 0");
  Reparametrization r;
  // Odd extension sgn(lambda)|lambda|^alpha keeps a' > 0 on both half-lines.
  r.a = [alpha](double l) { return std::copysign(std::pow(std::abs(l), alpha), l); };
  r.a_prime = [alpha](double l) { return alpha * std::pow(std::abs(l), alpha - 1.0); };
  if (alpha != 1.0) r.breakpoints = {0.0};
  std::ostringstream name;
  name << "lambda^" << alpha;
  r.name = name.str();
  return r;
}

namespace {

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b, Interval window) {
  for (double x : b)
    if (x > window.lo && x < window.hi) a.push_back(x);
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

SpectralFunction powers_weight(const SpectralFunction& sf, const Reparametrization& a_new) {
  for (const Interval& c : sf.components()) {
    const double hi = std::isfinite(c.hi) ? c.hi : c.lo + 10.0;
    for (double t : {0.25, 0.5, 0.75}) {
      const double l = c.lo + t * (hi - c.lo);
      require(std::abs(sf.a(l) - l) <= 1e-12 * std::max(1.0, std::abs(l)) && std::abs(sf.a_prime(l) - 1.0) <= 1e-12,
              ErrorCode::InvalidArgument, "powers_weight needs a base triple with a(lambda) = lambda");
    }
  }
  SpectralFunction out;
  const auto sigma = sf.sigma;
  const auto ap = a_new.a_prime;
  out.sigma = [sigma, ap](double l) { return sigma(l) * std::sqrt(std::abs(ap(l))); };
  out.a = a_new.a;
  out.a_prime = a_new.a_prime;
  out.window = sf.window;
  out.breakpoints = merged(sf.breakpoints, a_new.breakpoints, sf.window);
  try {
    out.validate();
  } catch (const Error& e) {
    fail(ErrorCode::OutOfDomain, std::string("new time map is not admissible (needs a' > 0 off breakpoints): ") + e.what());
  }
  return out;
}

SpectralFunction compose_weight(const SpectralFunction& sf, const Reparametrization& g) {
  SpectralFunction out;
  const auto sigma = sf.sigma, a = sf.a, ap = sf.a_prime;
  const auto ga = g.a, gp = g.a_prime;
  out.sigma = [sigma, a, gp](double l) { return sigma(l) * std::sqrt(std::abs(gp(a(l)))); };
  out.a = [a, ga](double l) { return ga(a(l)); };
  out.a_prime = [a, ap, gp](double l) { return gp(a(l)) * ap(l); };
  out.window = sf.window;
  // Preimages under a of the breakpoints of g.
  std::vector<double> pre;
  for (const Interval& c : sf.components()) {
    const double hi = std::isfinite(c.hi) ? c.hi : std::max(2.0 * std::abs(c.lo), 1e6);
    const double lo = std::isfinite(c.lo) ? c.lo : -std::max(2.0 * std::abs(c.hi), 1e6);
    for (double b : g.breakpoints) {
      auto f = [&](double l) { return a(l) - b; };
      const double flo = f(lo), fhi = f(hi);
      if (!(flo < 0.0 && fhi > 0.0)) continue;
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
      pre.push_back(0.5 * (r.first + r.second));
    }
  }
  out.breakpoints = merged(sf.breakpoints, pre, sf.window);
  out.validate();
  return out;
}

FractionalPrefactor fractional_prefactor(double alpha) {
  FractionalPrefactor p;
  p.from_weight = alpha;
  p.quoted = alpha * alpha;
  p.ratio = alpha;
  return p;
}

}  // namespace smoothlab
