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
#include <smoothlab/spectral_density.hpp>

#include "quadrature.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace smoothlab {

double weight_fourier_transform(double q, double s) {
  require(s > 0.5, ErrorCode::OutOfDomain, "weight too weak for LAP norm (need s > 1/2)");
  const double nu = s - 0.5;
  if (q == 0.0) return std::sqrt(kPi) * std::tgamma(nu) / std::tgamma(s);
  const double aq = std::abs(q);
  if (aq > 700.0) return 0.0;
  // 2 int_0^inf cos(qx) (1+x^2)^{-s} dx = 2 sqrt(pi)/Gamma(s) (q/2)^{s-1/2} K_{s-1/2}(q)
  return 2.0 * std::sqrt(kPi) / std::tgamma(s) * std::pow(0.5 * aq, nu) * boost::math::cyl_bessel_k(nu, aq);
}

RankKFactored free_density_factored(const SpatialGrid& grid, double lambda) {
  require(lambda > 0.0, ErrorCode::OutOfDomain, "free density needs lambda > 0");
  const double k = std::sqrt(lambda);
  const auto n = static_cast<Eigen::Index>(grid.size());
  CMatrix u(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.node(static_cast<std::size_t>(i));
    u(i, 0) = std::polar(1.0 / kSqrt2Pi, k * x);
    u(i, 1) = std::polar(1.0 / kSqrt2Pi, -k * x);
  }
  CMatrix c = CMatrix::Identity(2, 2) / (2.0 * k);
  return RankKFactored::make_symmetric(grid, std::move(u), std::move(c));
}

double smoothing_width(const OperatorModel& model, double lambda) {
  const auto* e = std::get_if<EpsilonSmoothed>(&model.route());
  require(e != nullptr, ErrorCode::InvalidArgument,
          std::string("model '") + to_string(model.kind()) + "' has pure point spectrum; use the smoothed route");
  return e->epsilon > 0.0 ? e->epsilon : model.default_epsilon(lambda);
}

namespace {

// Lorentzian weights (eps/pi) / ((lambda_k - lambda)^2 + eps^2) of the smoothed density.
RVector lorentz_weights(const RVector& ev, double lambda, double eps) {
  RVector w(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const double d = ev[k] - lambda;
    w[k] = eps / (kPi * (d * d + eps * eps));
  }
  return w;
}

bool is_line_model(const OperatorModel& model) {
  return model.kind() == ModelKind::FreeLaplacian1D || model.kind() == ModelKind::PerturbedSchrodinger1D;
}

}  // namespace

CMatrix smoothed_density_matrix(const OperatorModel& model, double lambda, double epsilon) {
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "smoothing width must be positive");
  const Eigensystem& eig = model.eigensystem();
  const RVector w = lorentz_weights(eig.values, lambda, epsilon);
  return eig.vectors * w.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

DensityRep density_rep(const OperatorModel& model, double lambda) {
  switch (model.kind()) {
    case ModelKind::FreeLaplacian1D:
      return {lambda, free_density_factored(model.grid(), lambda), model.route()};
    case ModelKind::PerturbedSchrodinger1D:
      return {lambda, perturbed_density_factored(model, lambda), model.route()};
    default: {
      const double eps = smoothing_width(model, lambda);
      return {lambda, make_self_adjoint_matrix(smoothed_density_matrix(model, lambda, eps)), EpsilonSmoothed{eps}};
    }
  }
}

cplx density_pairing(const OperatorModel& model, double lambda, const GridFunction& phi, const GridFunction& psi) {
  require(phi.grid() == model.grid() && psi.grid() == model.grid(), ErrorCode::InvalidArgument,
          "functions and model live on different grids");
  if (model.kind() == ModelKind::FreeLaplacian1D) {
    require(lambda > 0.0, ErrorCode::OutOfDomain, "free density needs lambda > 0");
    const double k = std::sqrt(lambda);
    const cplx a = fourier_at(phi, k) * std::conj(fourier_at(psi, k));
    const cplx b = fourier_at(phi, -k) * std::conj(fourier_at(psi, -k));
    return (a + b) / (2.0 * k);
  }
  if (model.kind() == ModelKind::PerturbedSchrodinger1D) return inner(density_apply(model, lambda, phi), psi);
  const double eps = smoothing_width(model, lambda);
  const Eigensystem& eig = model.eigensystem();
  const RVector w = lorentz_weights(eig.values, lambda, eps);
  const CVector c = eig.vectors.adjoint() * phi.values();
  const CVector d = eig.vectors.adjoint() * psi.values();
  cplx acc = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) acc += w[k] * c[k] * std::conj(d[k]);
  return acc * model.grid().spacing();
}

GridFunction density_apply(const OperatorModel& model, double lambda, const GridFunction& phi) {
  require(phi.grid() == model.grid(), ErrorCode::InvalidArgument, "function and model live on different grids");
  if (model.kind() == ModelKind::FreeLaplacian1D) {
    require(lambda > 0.0, ErrorCode::OutOfDomain, "free density needs lambda > 0");
    const double k = std::sqrt(lambda);
    const cplx cp = fourier_at(phi, k) / (2.0 * k * kSqrt2Pi);
    const cplx cm = fourier_at(phi, -k) / (2.0 * k * kSqrt2Pi);
    CVector v(static_cast<Eigen::Index>(phi.size()));
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double x = phi.node(i);
      v[static_cast<Eigen::Index>(i)] = cp * std::polar(1.0, k * x) + cm * std::polar(1.0, -k * x);
    }
    return GridFunction(phi.grid(), std::move(v));
  }
  if (model.kind() == ModelKind::PerturbedSchrodinger1D)
    return smoothlab::apply(OperatorRep(perturbed_density_factored(model, lambda)), phi);
  const double eps = smoothing_width(model, lambda);
  const Eigensystem& eig = model.eigensystem();
  const RVector w = lorentz_weights(eig.values, lambda, eps);
  CVector c = eig.vectors.adjoint() * phi.values();
  c = c.cwiseProduct(w.cast<cplx>());
  return GridFunction(phi.grid(), eig.vectors * c);
}

namespace {

CMatrix free_gram(double lambda, WeightExponent s) {
  const double k = std::sqrt(lambda);
  const double c0 = weight_fourier_transform(0.0, s.s) / (2.0 * kPi);
  const double c2 = weight_fourier_transform(2.0 * k, s.s) / (2.0 * kPi);
  CMatrix g(2, 2);
  g << c0, c2, c2, c0;
  return g;
}

}  // namespace

FreeMaximizer free_density_maximizer(double lambda, WeightExponent s) {
  require(s.s > 0.5, ErrorCode::OutOfDomain, "weight too weak for LAP norm (need s > 1/2)");
  require(lambda > 0.0, ErrorCode::OutOfDomain, "free density needs lambda > 0");
  const CMatrix c = CMatrix::Identity(2, 2) / (2.0 * std::sqrt(lambda));
  const FormMaximum fm = form_maximum_from_gram(c, free_gram(lambda, s));
  // Normalize so that ||f||_{0,s}^2 = beta^* Gamma beta = 1.
  const CMatrix g = free_gram(lambda, s);
  const double norm2 = std::real(fm.coefficients.dot(g * fm.coefficients));
  const CVector beta = fm.coefficients / std::sqrt(norm2);
  return {fm.value, beta[0], beta[1]};
}

double density_norm(const OperatorModel& model, double lambda, WeightExponent s) {
  switch (model.kind()) {
    case ModelKind::FreeLaplacian1D: {
      require(s.s > 0.5, ErrorCode::OutOfDomain, "weight too weak for LAP norm (need s > 1/2)");
      require(lambda > 0.0, ErrorCode::OutOfDomain, "free density needs lambda > 0");
      const CMatrix c = CMatrix::Identity(2, 2) / (2.0 * std::sqrt(lambda));
      return form_maximum_from_gram(c, free_gram(lambda, s)).value;
    }
    case ModelKind::PerturbedSchrodinger1D: {
      require(s.s > 0.5, ErrorCode::OutOfDomain, "weight too weak for LAP norm (need s > 1/2)");
      const ReducedOperator red = reduce_weighted(perturbed_density_factored(model, lambda), s);
      const CMatrix h = 0.5 * (red.matrix + red.matrix.adjoint());
      return std::max(0.0, Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff());
    }
    default: {
      const double eps = smoothing_width(model, lambda);
      const Eigensystem& eig = model.eigensystem();
      const RVector w = lorentz_weights(eig.values, lambda, eps);
      // <x>^{-s} Q W Q^* <x>^{-s}: the largest eigenvalue is the sup of the form.
      const auto n = eig.vectors.rows();
      RVector inv_weight(n);
      for (Eigen::Index i = 0; i < n; ++i) inv_weight[i] = jp_power(model.grid().node(static_cast<std::size_t>(i)), -s.s);
      if (eig.vectors.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::MatrixXd b = inv_weight.asDiagonal() * eig.vectors.real() * w.cwiseSqrt().asDiagonal();
        Eigen::MatrixXd m = b * b.transpose();
        return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
      }
      CMatrix b = inv_weight.cast<cplx>().asDiagonal() * eig.vectors * w.cwiseSqrt().cast<cplx>().asDiagonal();
      CMatrix m = b * b.adjoint();
      return Eigen::SelfAdjointEigenSolver<CMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    }
  }
}

// ---------------------------------------------------------------------------

ResolventRep resolvent(const OperatorModel& model, double lambda, double epsilon, Sign sign) {
  require(epsilon >= 0.0, ErrorCode::InvalidArgument, "resolvent offset must be nonnegative");
  ResolventRep out{lambda, epsilon, sign, DenseMatrix{}};
  if (model.kind() == ModelKind::FreeLaplacian1D) {
    out.rep = free_resolvent_kernel(lambda, sign, model.grid(), epsilon);
    return out;
  }
  if (model.kind() == ModelKind::PerturbedSchrodinger1D) {
    // R~ = R0 (I + V R0)^{-1}, as a kernel: K0 (I + V K0 dx)^{-1}.
    IntegralKernel k0 = free_resolvent_kernel(lambda, sign, model.grid(), epsilon);
    const auto n = k0.kernel.rows();
    CMatrix m = CMatrix::Identity(n, n) + model.potential_on_grid().matrix * k0.kernel * model.grid().spacing();
    Eigen::PartialPivLU<CMatrix> lu(m.transpose());
    CMatrix kernel = lu.solve(k0.kernel.transpose()).transpose();
    out.rep = IntegralKernel{model.grid(), std::move(kernel)};
    return out;
  }
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "matrix models need a positive resolvent offset");
  const Eigensystem& eig = model.eigensystem();
  const cplx z(lambda, sign_value(sign) * epsilon);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  CVector d(eig.values.size());
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    const cplx gap = eig.values[k] - z;
    if (std::abs(gap) <= 1e-14 * scale) {
      std::ostringstream msg;
      msg << "resolvent is singular: z = " << lambda << " hits an eigenvalue";
      fail(ErrorCode::Singular, msg.str());
    }
    d[k] = 1.0 / gap;
  }
  out.rep = DenseMatrix{eig.vectors * d.asDiagonal() * eig.vectors.adjoint(), false};
  return out;
}

double resolvent_residual(const OperatorModel& model, const ResolventRep& r, int samples) {
  const CMatrix& h = model.matrix().matrix;
  const cplx z(r.lambda, sign_value(r.sign) * r.epsilon);
  std::mt19937_64 rng(0xC0FFEE);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    CVector v(h.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(normal(rng), normal(rng));
    const CVector rv = smoothlab::apply(r.rep, v);
    const CVector back = h * rv - z * rv;
    worst = std::max(worst, (back - v).norm() / v.norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "fit needs paired samples");
  require(x.size() >= 4, ErrorCode::InvalidArgument, "degenerate fit: fewer than 4 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i]), ErrorCode::InvalidArgument,
            "degenerate fit: nonpositive or non-finite sample");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  require(denom > 0.0, ErrorCode::InvalidArgument, "degenerate fit: abscissae coincide");
  PowerLawFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - f.slope * sx) / n;
  f.constant = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log(y[i]) - intercept - f.slope * std::log(x[i]);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

AgmonScan agmon_scan(const OperatorModel& model, WeightExponent s, const std::vector<double>& lambdas) {
  require(lambdas.size() >= 4, ErrorCode::InvalidArgument, "degenerate fit: fewer than 4 points");
  AgmonScan scan;
  scan.lambdas = lambdas;
  scan.norms = parallel_map<double>(lambdas.size(), [&](std::size_t i) { return density_norm(model, lambdas[i], s); });
  scan.fit = fit_power_law(scan.lambdas, scan.norms);
  return scan;
}

AgmonScan envelope_fit(const AgmonScan& scan, double window) {
  require(window > 0.0 && !scan.lambdas.empty(), ErrorCode::InvalidArgument, "envelope needs a positive window");
  AgmonScan env;
  const double start = scan.lambdas.front();
  long current = -1;
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i) {
    const long bin = static_cast<long>(std::floor((scan.lambdas[i] - start) / window));
    if (bin != current) {
      env.lambdas.push_back(scan.lambdas[i]);
      env.norms.push_back(scan.norms[i]);
      current = bin;
    } else if (scan.norms[i] > env.norms.back()) {
      env.lambdas.back() = scan.lambdas[i];
      env.norms.back() = scan.norms[i];
    }
  }
  env.fit = fit_power_law(env.lambdas, env.norms);
  return env;
}

cplx spectral_mass(const OperatorModel& model, Interval window, const GridFunction& phi, const GridFunction& psi,
                   double tolerance) {
  if (is_line_model(model)) {
    require(window.lo >= 0.0, ErrorCode::OutOfDomain, "line models integrate over positive energies");
    // lambda = k^2: <A(k^2) phi, psi> 2k dk removes the k^{-1} singularity at 0.
    auto integrand = [&](double k) -> cplx {
      if (k <= 0.0) return 0.0;
      return 2.0 * k * density_pairing(model, k * k, phi, psi);
    };
    return detail::integrate_complex(integrand, std::sqrt(window.lo), std::sqrt(window.hi), tolerance);
  }
  // Lorentzian weights integrate in closed form over the window.
  const double eps = smoothing_width(model, 0.5 * (window.lo + window.hi));
  const Eigensystem& eig = model.eigensystem();
  const CVector c = eig.vectors.adjoint() * phi.values();
  const CVector d = eig.vectors.adjoint() * psi.values();
  cplx acc = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double mass = (std::atan((window.hi - eig.values[k]) / eps) - std::atan((window.lo - eig.values[k]) / eps)) / kPi;
    acc += mass * c[k] * std::conj(d[k]);
  }
  return acc * model.grid().spacing();
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  require(lo > 0.0 && hi > lo && count >= 2, ErrorCode::InvalidArgument, "log grid needs 0 < lo < hi and 2 points");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  out.back() = hi;
  return out;
}

std::vector<double> lin_spaced(double lo, double hi, std::size_t count) {
  require(hi > lo && count >= 2, ErrorCode::InvalidArgument, "linear grid needs lo < hi and 2 points");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

}  // namespace smoothlab
