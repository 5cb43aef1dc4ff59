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

#include <smoothlab/evolution_norms.hpp>
#include <smoothlab/parallel.hpp>
#include <smoothlab/spectral_density.hpp>

#include "quadrature.hpp"
#include "time_transform.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smoothlab {

TimeGrid TimeGrid::for_bandwidth(double t_max, double max_abs_a) {
  require(t_max > 0.0, ErrorCode::InvalidArgument, "t_max must be positive");
  const double dt = 0.9 * kPi / std::max(max_abs_a, 1e-12);
  auto m = static_cast<std::size_t>(std::ceil(2.0 * t_max / dt));
  m += m % 2;
  return {t_max, std::max<std::size_t>(m, 2)};
}

namespace {

bool is_line_model(const OperatorModel& model) {
  return model.kind() == ModelKind::FreeLaplacian1D || model.kind() == ModelKind::PerturbedSchrodinger1D;
}

void check_inputs(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi) {
  require(phi.grid() == model.grid(), ErrorCode::InvalidArgument, "function and model live on different grids");
  sf.validate();
  if (is_line_model(model))
    require(sf.window.lo > 0.0 && std::isfinite(sf.window.hi), ErrorCode::OutOfDomain,
            "line models need a window 0 < lo < hi < infinity for time-side evaluation");
}

TimeGrid resolve_time_grid(const SpectralFunction& sf, const TimeGrid& requested) {
  const double amax = sf.max_abs_a();
  TimeGrid tg = requested.m_points == 0 ? TimeGrid::for_bandwidth(requested.t_max, amax) : requested;
  require(tg.m_points % 2 == 0 && tg.m_points >= 2, ErrorCode::InvalidArgument, "time grid needs an even point count");
  if (amax > tg.nyquist()) {
    std::ostringstream msg;
    msg << "time grid violates the Nyquist bound: max |a| = " << amax << " > pi m / (2 t_max) = " << tg.nyquist();
    fail(ErrorCode::OutOfDomain, msg.str());
  }
  return tg;
}

double trapezoid_weight(std::size_t j, std::size_t m) { return (j == 0 || j == m) ? 0.5 : 1.0; }

// ---------------------------------------------------------------------------
// eta = a(lambda) grids for line models

struct EtaComponent {
  double eta0 = 0.0;
  double deta = 0.0;
  std::vector<double> lambda;
  std::vector<double> weight;  // Gregory weight * deta * sigma / a'
};

double invert_a(const SpectralFunction& sf, double eta, double lo, double hi) {
  auto f = [&](double l) { return sf.a(l) - eta; };
  const double flo = f(lo), fhi = f(hi);
  if (flo >= 0.0) return lo;
  if (fhi <= 0.0) return hi;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

std::vector<EtaComponent> eta_grid(const SpectralFunction& sf, double deta_target) {
  std::vector<EtaComponent> out;
  for (const Interval& c : sf.components()) {
    EtaComponent e;
    const double e_lo = sf.a(c.lo), e_hi = sf.a(c.hi);
    const auto n = std::max<std::size_t>(14, static_cast<std::size_t>(std::ceil((e_hi - e_lo) / deta_target)) + 1);
    e.eta0 = e_lo;
    e.deta = (e_hi - e_lo) / static_cast<double>(n - 1);
    const auto greg = detail::gregory_weights(n);
    struct Node {
      double lambda, weight;
    };
    const auto nodes = parallel_map<Node>(n, [&](std::size_t i) {
      const double l = i == 0 ? c.lo : i == n - 1 ? c.hi : invert_a(sf, e_lo + static_cast<double>(i) * e.deta, c.lo, c.hi);
      return Node{l, greg[i] * e.deta * sf.sigma(l) / sf.a_prime(l)};
    });
    for (const Node& nd : nodes) {
      e.lambda.push_back(nd.lambda);
      e.weight.push_back(nd.weight);
    }
    out.push_back(std::move(e));
  }
  return out;
}

// Free-line transforms phi^(+-k) at every eta node, used for both the scalar
// and the X*-valued signals.
struct FreeSamples {
  CVector plus, minus;
};

FreeSamples free_samples(const GridFunction& f, const std::vector<double>& lambda) {
  struct Pair {
    cplx p, m;
  };
  const auto v = parallel_map<Pair>(lambda.size(), [&](std::size_t i) {
    const double k = std::sqrt(lambda[i]);
    return Pair{fourier_at(f, k), fourier_at(f, -k)};
  });
  FreeSamples s{CVector(static_cast<Eigen::Index>(v.size())), CVector(static_cast<Eigen::Index>(v.size()))};
  for (std::size_t i = 0; i < v.size(); ++i) {
    s.plus[static_cast<Eigen::Index>(i)] = v[i].p;
    s.minus[static_cast<Eigen::Index>(i)] = v[i].m;
  }
  return s;
}

// sum_j dt w_j |F_j|^2 and the tail bins of a sampled signal.
struct SignalMass {
  double mass = 0.0;
  detail::TailBins bins{1.0};
};

SignalMass signal_mass(const CVector& f, const TimeGrid& tg, double weight) {
  SignalMass out{0.0, detail::TailBins(tg.t_max)};
  const double dt = tg.spacing();
  for (std::size_t j = 0; j <= tg.m_points; ++j) {
    const double v = weight * std::norm(f[static_cast<Eigen::Index>(j)]);
    out.mass += dt * trapezoid_weight(j, tg.m_points) * v;
    out.bins.add(tg.node(j), v);
  }
  return out;
}

IdentityReport finish_report(double mass, const detail::TailBins& bins, double rhs, const TimeGrid& tg,
                             double negligible, double tail_limit) {
  IdentityReport r;
  r.time = tg;
  r.rhs = rhs;
  if (mass > negligible) {
    const auto fit = bins.fit();
    if (!fit.ok) {
      std::ostringstream msg;
      msg << "t_max too small: |F|^2 does not decay integrably by t = " << tg.t_max << " (fitted exponent "
          << fit.exponent << ")";
      fail(ErrorCode::Truncation, msg.str());
    }
    if (fit.tail > tail_limit * mass) {
      std::ostringstream msg;
      msg << "t_max too small: estimated tail " << fit.tail << " exceeds " << tail_limit << " of lhs^2 = " << mass;
      fail(ErrorCode::Truncation, msg.str());
    }
    r.truncation_tail_estimate = fit.tail;
    r.tail_exponent = fit.exponent;
  }
  r.lhs = std::sqrt(mass + r.truncation_tail_estimate);
  r.residual = std::abs(r.lhs - r.rhs) / std::max(r.rhs, 1e-300);
  return r;
}

// ---------------------------------------------------------------------------
// Matrix models: eigen-expansion with damping matched to the smoothing width.

OperatorModel fixed_width(const OperatorModel& model, const SpectralFunction& sf, double& eps) {
  const auto& route = std::get<EpsilonSmoothed>(model.route());
  const double mid = std::isfinite(sf.window.hi) ? 0.5 * (sf.window.lo + sf.window.hi) : sf.window.lo + 1.0;
  eps = route.epsilon > 0.0 ? route.epsilon : model.default_epsilon(mid);
  return model.with_route(EpsilonSmoothed{eps});
}

struct EigenTerms {
  std::vector<Eigen::Index> index;  // eigenvalues inside J
  RVector a, damp, sigma;
};

EigenTerms eigen_terms(const OperatorModel& model, const SpectralFunction& sf, double eps) {
  const auto& ev = model.eigensystem().values;
  EigenTerms t;
  std::vector<double> a, d, s;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (!sf.admissible(ev[k])) continue;
    t.index.push_back(k);
    a.push_back(sf.a(ev[k]));
    d.push_back(eps * sf.a_prime(ev[k]));
    s.push_back(sf.sigma(ev[k]));
  }
  t.a = Eigen::Map<RVector>(a.data(), static_cast<Eigen::Index>(a.size()));
  t.damp = Eigen::Map<RVector>(d.data(), static_cast<Eigen::Index>(d.size()));
  t.sigma = Eigen::Map<RVector>(s.data(), static_cast<Eigen::Index>(s.size()));
  return t;
}

TimeGrid matrix_time_grid(const EigenTerms& t, const TimeGrid& requested, int level) {
  if (t.index.empty()) return TimeGrid::for_bandwidth(requested.t_max, 1.0);
  const double dmin = t.damp.minCoeff();
  const double amax = t.a.cwiseAbs().maxCoeff();
  const double t_max = std::max(requested.t_max, 18.0 / dmin * std::pow(2.0, level));
  TimeGrid tg = requested.m_points == 0 ? TimeGrid::for_bandwidth(t_max, amax) : TimeGrid{t_max, requested.m_points};
  require(amax <= tg.nyquist(), ErrorCode::OutOfDomain, "time grid violates the Nyquist bound");
  return tg;
}

CVector matrix_phase(const EigenTerms& t, double time) {
  CVector p(t.a.size());
  for (Eigen::Index k = 0; k < t.a.size(); ++k)
    p[k] = t.sigma[k] * std::exp(cplx(-t.damp[k] * std::abs(time), t.a[k] * time));
  return p;
}

std::vector<double> matrix_cuts(const OperatorModel& model, const Interval& c) {
  std::vector<double> cuts{c.lo};
  for (Eigen::Index k = 0; k < model.eigensystem().values.size(); ++k) {
    const double l = model.eigensystem().values[k];
    if (l > c.lo && l < c.hi) cuts.push_back(l);
  }
  cuts.push_back(c.hi);
  return cuts;
}

RVector lorentz(const RVector& ev, double lambda, double eps) {
  return ev.unaryExpr([&](double e) { return eps / (kPi * ((e - lambda) * (e - lambda) + eps * eps)); });
}

// Line-model spectral side, integrated in k = sqrt(lambda) over each component.
template <class G>
double line_spectral_integral(const SpectralFunction& sf, G&& density_term, double tolerance) {
  double total = 0.0;
  for (const Interval& c : sf.components()) {
    auto f = [&](double k) -> cplx {
      const double l = k * k;
      const double sig = sf.sigma(l);
      return 2.0 * k * sig * sig / sf.a_prime(l) * density_term(l);
    };
    total += detail::integrate_complex(f, std::sqrt(c.lo), std::sqrt(c.hi), tolerance, 20000).real();
  }
  return total;
}

template <class G>
double matrix_spectral_integral(const OperatorModel& model, const SpectralFunction& sf, G&& density_term,
                                double tolerance) {
  double total = 0.0;
  for (const Interval& c : sf.components()) {
    const auto cuts = matrix_cuts(model, c);
    auto f = [&](double l) -> cplx {
      const double sig = sf.sigma(l);
      return sig * sig / sf.a_prime(l) * density_term(l);
    };
    total += detail::integrate_complex(f, cuts, tolerance, 40 * cuts.size() + 4000).real();
  }
  return total;
}

double negligible_scale(const GridFunction& phi, const GridFunction& psi) {
  return 1e-24 * std::pow(weighted_norm(phi, WeightExponent{0.0}) * weighted_norm(psi, WeightExponent{0.0}), 2) +
         1e-300;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<cplx> evolve_signal(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                                const GridFunction& psi, const std::vector<double>& times, double tolerance) {
  check_inputs(model, sf, phi);
  require(psi.grid() == model.grid(), ErrorCode::InvalidArgument, "function and model live on different grids");
  if (!is_line_model(model)) {
    const auto& eig = model.eigensystem();
    const CVector c = eig.vectors.adjoint() * phi.values();
    const CVector d = eig.vectors.adjoint() * psi.values();
    std::vector<cplx> out(times.size(), 0.0);
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      const double l = eig.values[k];
      if (!sf.admissible(l)) continue;
      const cplx w = sf.sigma(l) * c[k] * std::conj(d[k]) * model.grid().spacing();
      for (std::size_t j = 0; j < times.size(); ++j) out[j] += w * std::polar(1.0, times[j] * sf.a(l));
    }
    return out;
  }
  return parallel_map<cplx>(times.size(), [&](std::size_t j) {
    cplx acc = 0.0;
    for (const Interval& c : sf.components()) {
      auto f = [&](double k) -> cplx {
        const double l = k * k;
        return 2.0 * k * sf.sigma(l) * std::polar(1.0, times[j] * sf.a(l)) * density_pairing(model, l, phi, psi);
      };
      acc += detail::integrate_complex(f, std::sqrt(c.lo), std::sqrt(c.hi), tolerance, 20000);
    }
    return acc;
  });
}

CMatrix evolve_state(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                     const std::vector<double>& times, double tolerance) {
  check_inputs(model, sf, phi);
  const auto n = static_cast<Eigen::Index>(model.grid().size());
  CMatrix out(static_cast<Eigen::Index>(times.size()), n);
  if (!is_line_model(model)) {
    const auto& eig = model.eigensystem();
    const CVector c = eig.vectors.adjoint() * phi.values();
    for (std::size_t j = 0; j < times.size(); ++j) {
      CVector coef = CVector::Zero(c.size());
      for (Eigen::Index k = 0; k < c.size(); ++k)
        if (sf.admissible(eig.values[k]))
          coef[k] = sf.sigma(eig.values[k]) * std::polar(1.0, times[j] * sf.a(eig.values[k])) * c[k];
      out.row(static_cast<Eigen::Index>(j)) = (eig.vectors * coef).transpose();
    }
    return out;
  }
  const auto rows = parallel_map<CVector>(times.size(), [&](std::size_t j) {
    CVector acc = CVector::Zero(n);
    for (const Interval& c : sf.components()) {
      auto f = [&](double k) -> CVector {
        const double l = k * k;
        const cplx w = 2.0 * k * sf.sigma(l) * std::polar(1.0, times[j] * sf.a(l));
        return w * density_apply(model, l, phi).values();
      };
      acc += detail::integrate_complex(f, std::sqrt(c.lo), std::sqrt(c.hi), tolerance, 20000);
    }
    return acc;
  });
  for (std::size_t j = 0; j < times.size(); ++j) out.row(static_cast<Eigen::Index>(j)) = rows[j].transpose();
  return out;
}

std::vector<cplx> evolve_signal(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                                const GridFunction& psi, const TimeGrid& grid, double eta_resolution) {
  check_inputs(model, sf, phi);
  const TimeGrid tg = resolve_time_grid(sf, grid);
  const auto m = tg.m_points + 1;
  CVector f = CVector::Zero(static_cast<Eigen::Index>(m));
  if (is_line_model(model)) {
    for (const auto& comp : eta_grid(sf, eta_resolution / tg.t_max)) {
      const auto vals = parallel_map<cplx>(comp.lambda.size(), [&](std::size_t i) {
        return comp.weight[i] * density_pairing(model, comp.lambda[i], phi, psi);
      });
      const CVector c = Eigen::Map<const CVector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
      f += detail::ChirpZ(c.size(), m, comp.eta0, comp.deta, -tg.t_max, tg.spacing()).apply(c);
    }
  } else {
    double eps = 0.0;
    const OperatorModel fixed = fixed_width(model, sf, eps);
    const auto terms = eigen_terms(fixed, sf, eps);
    const auto& eig = fixed.eigensystem();
    CVector p(static_cast<Eigen::Index>(terms.index.size()));
    const CVector c = eig.vectors.adjoint() * phi.values();
    const CVector d = eig.vectors.adjoint() * psi.values();
    for (std::size_t k = 0; k < terms.index.size(); ++k)
      p[static_cast<Eigen::Index>(k)] = c[terms.index[k]] * std::conj(d[terms.index[k]]) * fixed.grid().spacing();
    for (std::size_t j = 0; j < m; ++j) f[static_cast<Eigen::Index>(j)] = matrix_phase(terms, tg.node(j)).dot(p.conjugate());
  }
  return std::vector<cplx>(f.data(), f.data() + f.size());
}

double scalar_spectral_side(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                            const GridFunction& psi, double tolerance) {
  check_inputs(model, sf, phi);
  double integral = 0.0;
  if (is_line_model(model)) {
    integral = line_spectral_integral(sf, [&](double l) { return std::norm(density_pairing(model, l, phi, psi)); }, tolerance);
  } else {
    const auto& eig = model.eigensystem();
    const CVector c = eig.vectors.adjoint() * phi.values();
    const CVector d = eig.vectors.adjoint() * psi.values();
    const CVector p = c.cwiseProduct(d.conjugate()) * model.grid().spacing();
    integral = matrix_spectral_integral(model, sf, [&](double l) {
      return std::norm(lorentz(eig.values, l, smoothing_width(model, l)).cast<cplx>().dot(p.conjugate()));
    }, tolerance);
  }
  return std::sqrt(2.0 * kPi * std::max(integral, 0.0));
}

double dual_spectral_side(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                          WeightExponent s, double tolerance) {
  check_inputs(model, sf, phi);
  double integral = 0.0;
  const WeightExponent neg{-s.s};
  if (is_line_model(model)) {
    integral = line_spectral_integral(sf, [&](double l) {
      return std::pow(weighted_norm(density_apply(model, l, phi), neg), 2);
    }, tolerance);
  } else {
    const auto& eig = model.eigensystem();
    const CVector c = eig.vectors.adjoint() * phi.values();
    CMatrix q = eig.vectors;
    for (Eigen::Index i = 0; i < q.rows(); ++i) q.row(i) *= jp_power(model.grid().node(static_cast<std::size_t>(i)), neg.s);
    const CMatrix gram = q.adjoint() * q * model.grid().spacing();
    integral = matrix_spectral_integral(model, sf, [&](double l) {
      const CVector b = lorentz(eig.values, l, smoothing_width(model, l)).cast<cplx>().cwiseProduct(c);
      return cplx(b.dot(gram * b).real());
    }, tolerance);
  }
  return std::sqrt(2.0 * kPi * std::max(integral, 0.0));
}

IdentityReport identity_scalar(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                               const GridFunction& psi, const IdentityOptions& options) {
  check_inputs(model, sf, phi);
  require(psi.grid() == model.grid(), ErrorCode::InvalidArgument, "function and model live on different grids");
  const double negligible = negligible_scale(phi, psi);
  if (is_line_model(model)) {
    const TimeGrid tg = resolve_time_grid(sf, options.time);
    const auto comps = eta_grid(sf, options.eta_resolution / tg.t_max);
    std::size_t nodes = 0;
    CVector f = CVector::Zero(static_cast<Eigen::Index>(tg.m_points + 1));
    for (const auto& comp : comps) {
      nodes += comp.lambda.size();
      const auto vals = parallel_map<cplx>(comp.lambda.size(), [&](std::size_t i) {
        return comp.weight[i] * density_pairing(model, comp.lambda[i], phi, psi);
      });
      const CVector c = Eigen::Map<const CVector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
      f += detail::ChirpZ(c.size(), tg.m_points + 1, comp.eta0, comp.deta, -tg.t_max, tg.spacing()).apply(c);
    }
    const auto sm = signal_mass(f, tg, 1.0);
    const double rhs = scalar_spectral_side(model, sf, phi, psi, options.lambda_tolerance);
    auto r = finish_report(sm.mass, sm.bins, rhs, tg, negligible, options.tail_limit);
    r.eta_nodes = nodes;
    return r;
  }
  double eps = 0.0;
  const OperatorModel fixed = fixed_width(model, sf, eps);
  const auto terms = eigen_terms(fixed, sf, eps);
  const TimeGrid tg = matrix_time_grid(terms, options.time, 0);
  const auto& eig = fixed.eigensystem();
  const CVector c = eig.vectors.adjoint() * phi.values();
  const CVector d = eig.vectors.adjoint() * psi.values();
  CVector p(static_cast<Eigen::Index>(terms.index.size()));
  for (std::size_t k = 0; k < terms.index.size(); ++k)
    p[static_cast<Eigen::Index>(k)] = c[terms.index[k]] * std::conj(d[terms.index[k]]) * fixed.grid().spacing();
  const auto vals = parallel_map<double>(tg.m_points + 1, [&](std::size_t j) {
    return std::norm(p.dot(matrix_phase(terms, tg.node(j)).conjugate()));
  });
  double mass = 0.0;
  for (std::size_t j = 0; j <= tg.m_points; ++j) mass += tg.spacing() * trapezoid_weight(j, tg.m_points) * vals[j];
  IdentityReport r;
  r.time = tg;
  r.epsilon = eps;
  if (!terms.index.empty()) r.truncation_tail_estimate = 2.0 * vals.back() / (2.0 * terms.damp.minCoeff());
  r.lhs = std::sqrt(mass + r.truncation_tail_estimate);
  r.rhs = scalar_spectral_side(fixed, sf, phi, psi, options.lambda_tolerance);
  r.residual = std::abs(r.lhs - r.rhs) / std::max(r.rhs, 1e-300);
  (void)negligible;
  return r;
}

IdentityReport identity_dual(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                             WeightExponent s, const IdentityOptions& options) {
  check_inputs(model, sf, phi);
  const double negligible = negligible_scale(phi, phi);
  const SpatialGrid& grid = model.grid();
  const auto nx = grid.size();
  if (is_line_model(model)) {
    const TimeGrid tg = resolve_time_grid(sf, options.time);
    const auto comps = eta_grid(sf, options.eta_resolution / tg.t_max);
    std::size_t nodes = 0;
    // Node coefficients of (A(lambda_n) phi)(x_i): the free line has them in
    // closed form from phi^(+-k); other line models store density_apply columns.
    struct Prepared {
      FreeSamples free;
      CMatrix columns;  // eta nodes x grid nodes
      detail::ChirpZ chirp;
    };
    std::vector<Prepared> prep;
    for (const auto& comp : comps) {
      nodes += comp.lambda.size();
      Prepared p{{}, {}, detail::ChirpZ(comp.lambda.size(), tg.m_points + 1, comp.eta0, comp.deta, -tg.t_max, tg.spacing())};
      if (model.kind() == ModelKind::FreeLaplacian1D) {
        p.free = free_samples(phi, comp.lambda);
      } else {
        require(comp.lambda.size() * nx <= 20'000'000, ErrorCode::InvalidArgument,
                "time grid too large for this model's time side; use the spectral side");
        const auto cols = parallel_map<CVector>(comp.lambda.size(), [&](std::size_t i) {
          return CVector(density_apply(model, comp.lambda[i], phi).values());
        });
        p.columns.resize(static_cast<Eigen::Index>(cols.size()), static_cast<Eigen::Index>(nx));
        for (std::size_t i = 0; i < cols.size(); ++i) p.columns.row(static_cast<Eigen::Index>(i)) = cols[i].transpose();
      }
      prep.push_back(std::move(p));
    }
    const auto per_node = parallel_map<SignalMass>(nx, [&](std::size_t i) {
      const double x = grid.node(i);
      CVector f = CVector::Zero(static_cast<Eigen::Index>(tg.m_points + 1));
      for (std::size_t c = 0; c < comps.size(); ++c) {
        const auto& comp = comps[c];
        const auto n = static_cast<Eigen::Index>(comp.lambda.size());
        CVector coef(n);
        for (Eigen::Index q = 0; q < n; ++q) {
          const auto qi = static_cast<std::size_t>(q);
          if (model.kind() == ModelKind::FreeLaplacian1D) {
            const double k = std::sqrt(comp.lambda[qi]);
            const cplx e = std::polar(1.0, k * x);
            coef[q] = comp.weight[qi] / (2.0 * k * kSqrt2Pi) * (prep[c].free.plus[q] * e + prep[c].free.minus[q] * std::conj(e));
          } else {
            coef[q] = comp.weight[qi] * prep[c].columns(q, static_cast<Eigen::Index>(i));
          }
        }
        f += prep[c].chirp.apply(coef);
      }
      return signal_mass(f, tg, jp_power(x, -2.0 * s.s) * grid.spacing());
    });
    double mass = 0.0;
    detail::TailBins bins(tg.t_max);
    for (const auto& pm : per_node) {
      mass += pm.mass;
      bins.merge(pm.bins);
    }
    const double rhs = dual_spectral_side(model, sf, phi, s, options.lambda_tolerance);
    auto r = finish_report(mass, bins, rhs, tg, negligible, options.tail_limit);
    r.eta_nodes = nodes;
    return r;
  }
  double eps = 0.0;
  const OperatorModel fixed = fixed_width(model, sf, eps);
  const auto terms = eigen_terms(fixed, sf, eps);
  const TimeGrid tg = matrix_time_grid(terms, options.time, 0);
  const auto& eig = fixed.eigensystem();
  const CVector c = eig.vectors.adjoint() * phi.values();
  const auto kk = static_cast<Eigen::Index>(terms.index.size());
  CMatrix q(static_cast<Eigen::Index>(nx), kk);
  CVector ck(kk);
  for (Eigen::Index k = 0; k < kk; ++k) {
    q.col(k) = eig.vectors.col(terms.index[static_cast<std::size_t>(k)]);
    ck[k] = c[terms.index[static_cast<std::size_t>(k)]];
  }
  for (Eigen::Index i = 0; i < q.rows(); ++i) q.row(i) *= jp_power(grid.node(static_cast<std::size_t>(i)), -s.s);
  const CMatrix gram = q.adjoint() * q * grid.spacing();
  const auto vals = parallel_map<double>(tg.m_points + 1, [&](std::size_t j) {
    const CVector b = matrix_phase(terms, tg.node(j)).cwiseProduct(ck);
    return b.dot(gram * b).real();
  });
  double mass = 0.0;
  for (std::size_t j = 0; j <= tg.m_points; ++j) mass += tg.spacing() * trapezoid_weight(j, tg.m_points) * vals[j];
  IdentityReport r;
  r.time = tg;
  r.epsilon = eps;
  if (kk > 0) r.truncation_tail_estimate = 2.0 * vals.back() / (2.0 * terms.damp.minCoeff());
  r.lhs = std::sqrt(std::max(mass, 0.0) + r.truncation_tail_estimate);
  r.rhs = dual_spectral_side(fixed, sf, phi, s, options.lambda_tolerance);
  r.residual = std::abs(r.lhs - r.rhs) / std::max(r.rhs, 1e-300);
  (void)negligible;
  return r;
}

namespace {

IdentityOptions refined(const IdentityOptions& base, const SpectralFunction& sf, int level) {
  IdentityOptions o = base;
  const TimeGrid t0 = base.time.m_points == 0 ? TimeGrid::for_bandwidth(base.time.t_max, sf.max_abs_a()) : base.time;
  const double f = std::pow(2.0, level);
  o.time = TimeGrid{t0.t_max * f, t0.m_points * static_cast<std::size_t>(f * f)};
  o.lambda_tolerance = base.lambda_tolerance / f;
  return o;
}

// Quadrature noise floor below which residual changes are not meaningful.
constexpr double kResidualFloor = 1e-6;

RefinementStudy finish_study(std::vector<IdentityReport> levels) {
  RefinementStudy st;
  st.levels = std::move(levels);
  st.monotone = true;
  for (std::size_t k = 1; k < st.levels.size(); ++k)
    if (st.levels[k].residual > st.levels[k - 1].residual + kResidualFloor) st.monotone = false;
  return st;
}

}  // namespace

RefinementStudy refine_identity_scalar(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                                       const GridFunction& psi, int levels, const IdentityOptions& base) {
  std::vector<IdentityReport> out;
  for (int k = 0; k < levels; ++k) out.push_back(identity_scalar(model, sf, phi, psi, refined(base, sf, k)));
  return finish_study(std::move(out));
}

RefinementStudy refine_identity_dual(const OperatorModel& model, const SpectralFunction& sf, const GridFunction& phi,
                                     WeightExponent s, int levels, const IdentityOptions& base) {
  std::vector<IdentityReport> out;
  for (int k = 0; k < levels; ++k) out.push_back(identity_dual(model, sf, phi, s, refined(base, sf, k)));
  return finish_study(std::move(out));
}

// ---------------------------------------------------------------------------

SupScan weighted_density_sup(const OperatorModel& model, const SpectralFunction& sf, WeightExponent s,
                             const std::vector<double>& lambdas) {
  SupScan scan;
  for (double l : lambdas)
    if (sf.admissible(l)) scan.lambdas.push_back(l);
  require(!scan.lambdas.empty(), ErrorCode::InvalidArgument, "lambda grid is empty after excluding breakpoints");
  scan.factors = parallel_map<double>(scan.lambdas.size(), [&](std::size_t i) {
    const double l = scan.lambdas[i];
    return std::abs(sf.sigma(l)) / std::sqrt(sf.a_prime(l)) * std::sqrt(std::max(density_norm(model, l, s), 0.0));
  });
  const auto it = std::max_element(scan.factors.begin(), scan.factors.end());
  const auto idx = static_cast<std::size_t>(it - scan.factors.begin());
  scan.value = *it;
  scan.argmax = scan.lambdas[idx];
  scan.at_edge = idx == 0 || idx + 1 == scan.lambdas.size();
  return scan;
}

std::vector<double> default_lambda_grid(const SpectralFunction& sf, std::size_t count) {
  std::vector<double> out;
  const auto comps = sf.components();
  const std::size_t per = std::max<std::size_t>(2, count / std::max<std::size_t>(1, comps.size()));
  for (const Interval& c : comps) {
    const double hi = std::isfinite(c.hi) ? c.hi : std::max(1e4, 1e4 * c.lo);
    const bool geometric = c.lo > 0.0 && hi / c.lo > 10.0;
    for (std::size_t i = 0; i < per; ++i) {
      const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(per);
      out.push_back(geometric ? c.lo * std::pow(hi / c.lo, t) : c.lo + t * (hi - c.lo));
    }
  }
  return out;
}

AprioriReport apriori_check(const OperatorModel& model, const SpectralFunction& sf, WeightExponent s,
                            const GridFunction& phi, const AprioriOptions& options) {
  AprioriReport r;
  const auto scan = weighted_density_sup(model, sf, s, default_lambda_grid(sf, options.sup_points));
  r.sup_factor = scan.value;
  r.projected_norm = std::sqrt(std::max(spectral_mass(model, sf.window, phi, phi).real(), 0.0));
  r.bound = std::sqrt(2.0 * kPi) * r.sup_factor * r.projected_norm;
  r.lhs = options.time_side ? identity_dual(model, sf, phi, s, options.identity).lhs
                            : dual_spectral_side(model, sf, phi, s, options.identity.lambda_tolerance);
  r.pass = r.lhs <= r.bound * (1.0 + options.slack) + 1e-300;
  return r;
}

AprioriBatch apriori_batch(const OperatorModel& model, const SpectralFunction& sf, WeightExponent s,
                           const std::vector<GridFunction>& batch, double slack, std::size_t sup_points) {
  AprioriBatch out;
  out.sup_factor = weighted_density_sup(model, sf, s, default_lambda_grid(sf, sup_points)).value;
  out.bound_constant = std::sqrt(2.0 * kPi) * out.sup_factor;
  struct Item {
    double lhs, projected;
  };
  const auto items = parallel_map<Item>(batch.size(), [&](std::size_t i) {
    return Item{dual_spectral_side(model, sf, batch[i], s, 1e-8),
                std::sqrt(std::max(spectral_mass(model, sf.window, batch[i], batch[i], 1e-10).real(), 0.0))};
  });
  for (const Item& it : items) {
    const double ratio = it.projected > 0.0 ? it.lhs / it.projected : 0.0;
    out.ratios.push_back(ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
    if (it.lhs <= out.bound_constant * it.projected * (1.0 + slack) + 1e-300) ++out.passed;
  }
  out.pass = out.passed == batch.size();
  return out;
}

std::vector<GridFunction> random_wavepackets(const SpatialGrid& grid, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<GridFunction> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const int terms = 1 + static_cast<int>(uniform() * 3.0);
    CVector v = CVector::Zero(static_cast<Eigen::Index>(grid.size()));
    for (int t = 0; t < terms; ++t) {
      const double c = -1.5 + 3.0 * uniform(), w = 0.5 + 0.7 * uniform(), xi = -3.0 + 6.0 * uniform();
      const cplx amp = std::polar(0.5 + uniform(), 2.0 * kPi * uniform());
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double y = (grid.node(j) - c) / w;
        v[static_cast<Eigen::Index>(j)] += amp * std::exp(-0.5 * y * y) * std::polar(1.0, xi * grid.node(j));
      }
    }
    out.emplace_back(grid, std::move(v));
  }
  return out;
}

}  // namespace smoothlab
