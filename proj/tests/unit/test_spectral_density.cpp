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

#include "test_support.hpp"

#include <smoothlab/spectral_density.hpp>

#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/erf.hpp>

using namespace smoothlab;
using testing::gaussian;

namespace {

double weight_transform_oracle(double q, double s) {
  auto f = [s](double x) { return std::pow(1.0 + x * x, -s); };
  if (q == 0.0) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return 2.0 * integrator.integrate(f);
  }
  boost::math::quadrature::ooura_fourier_cos<double> cosine;
  return 2.0 * cosine.integrate(f, q).first;
}

// sqrt(lambda) * sup-form of the free density for s = 1, from c(q) = pi e^{-|q|}.
double free_norm_closed_form(double lambda) { return 0.25 * (1.0 + std::exp(-2.0 * std::sqrt(lambda))); }

}  // namespace

TEST_CASE("weight Fourier transform") {
  for (double s : {0.75, 1.0, 1.5, 2.5}) {
    for (double q : {0.0, 0.01, 0.5, 2.0, 7.0}) {
      CAPTURE(s);
      CAPTURE(q);
      CHECK(weight_fourier_transform(q, s) == doctest::Approx(weight_transform_oracle(q, s)).epsilon(1e-8));
    }
  }
  CHECK(weight_fourier_transform(3.0, 1.0) == doctest::Approx(kPi * std::exp(-3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(weight_fourier_transform(1.0, 0.5), Error);
}

TEST_CASE("free density norm closed form") {
  const auto model = make_free_laplacian(SpatialGrid(16.0, 256));
  for (double lambda : log_spaced(1e-3, 1e3, 25)) {
    CAPTURE(lambda);
    CHECK(std::sqrt(lambda) * density_norm(model, lambda, WeightExponent{1.0}) ==
          doctest::Approx(free_norm_closed_form(lambda)).epsilon(1e-6));
  }
  CHECK(std::sqrt(1.0) * density_norm(model, 1.0, WeightExponent{1.0}) == doctest::Approx(0.283834).epsilon(1e-5));
  CHECK_THROWS_AS(density_norm(model, 1.0, WeightExponent{0.5}), Error);

  // Same factored form on a long grid, normed by dense power iteration.
  const SpatialGrid wide(200.0, 4000);
  const auto rep = free_density_factored(wide, 1.0);
  const double dense = op_norm_weighted(rep, WeightExponent{-1.0}, WeightExponent{-1.0}).norm;
  CHECK(dense == doctest::Approx(dual_norm_rank_k(rep, WeightExponent{1.0})).epsilon(1e-6));
  CHECK(dense == doctest::Approx(free_norm_closed_form(1.0)).epsilon(1e-2));
}

TEST_CASE("free density pairing") {
  const SpatialGrid g(12.0, 512);
  const auto model = make_free_laplacian(g);
  const auto phi = gaussian(g);

  // d/dlambda of int_{xi^2 < lambda} e^{-xi^2} dxi = sqrt(pi) erf(sqrt(lambda)).
  const double h = 1e-4;
  auto measure = [](double l) { return std::sqrt(kPi) * boost::math::erf(std::sqrt(l)); };
  const double derivative = (measure(1.0 + h) - measure(1.0 - h)) / (2.0 * h);
  const cplx pairing = density_pairing(model, 1.0, phi, phi);
  CHECK(std::abs(pairing.imag()) < 1e-14);
  CHECK(pairing.real() == doctest::Approx(derivative).epsilon(1e-6));

  // Frequency content confined to 1 < |xi| < 2: nothing at sqrt(lambda) = 0.5.
  const SpatialGrid wide(60.0, 2048);
  CVector bump(static_cast<Eigen::Index>(wide.size()));
  for (std::size_t m = 0; m < wide.size(); ++m) {
    const double a = std::abs(wide.frequency(m));
    bump[static_cast<Eigen::Index>(m)] = (a > 1.0 && a < 2.0) ? std::exp(-1.0 / ((a - 1.0) * (2.0 - a))) : 0.0;
  }
  const auto band = inverse_fourier(GridFunction(wide, bump, Domain::Frequency));
  const auto wide_model = make_free_laplacian(wide);
  CHECK(std::abs(density_pairing(wide_model, 0.25, band, band)) < 1e-8);
  CHECK(density_pairing(wide_model, 2.25, band, band).real() > 1e-4);
  CHECK_THROWS_AS(density_pairing(model, 0.0, phi, phi), Error);
  CHECK_THROWS_AS(density_pairing(model, -1.0, phi, phi), Error);
}

TEST_CASE("density forms are Hermitian, nonnegative and consistent") {
  std::mt19937_64 rng(99);
  const SpatialGrid g(8.0, 128);
  const auto free = make_free_laplacian(g);
  const auto stark = make_stark_fd(g);
  const auto generic = make_generic_hermitian(g, testing::random_hermitian(rng, 128));
  struct Case {
    const OperatorModel* model;
    double lambda;
  };
  for (Case c : {Case{&free, 0.7}, Case{&free, 9.0}, Case{&stark, 3.0}, Case{&generic, 0.5}}) {
    CAPTURE(to_string(c.model->kind()));
    const double nrm = density_norm(*c.model, c.lambda, WeightExponent{1.0});
    for (int trial = 0; trial < 20; ++trial) {
      const auto phi = testing::random_packet(g, rng);
      const auto psi = testing::random_packet(g, rng);
      const cplx pp = density_pairing(*c.model, c.lambda, phi, phi);
      const cplx qq = density_pairing(*c.model, c.lambda, psi, psi);
      const cplx pq = density_pairing(*c.model, c.lambda, phi, psi);
      const cplx qp = density_pairing(*c.model, c.lambda, psi, phi);
      const double scale = weighted_norm(phi, WeightExponent{1.0}) * weighted_norm(psi, WeightExponent{1.0});
      CHECK(pp.real() >= -1e-12 * scale);
      CHECK(std::abs(pp.imag()) <= 1e-12 * scale);
      CHECK(std::abs(pq - std::conj(qp)) <= 1e-12 * scale);
      CHECK(std::abs(pq) <= std::sqrt(std::max(pp.real(), 0.0) * std::max(qq.real(), 0.0)) * (1 + 1e-10) + 1e-14);
      const auto applied = density_apply(*c.model, c.lambda, phi);
      CHECK(std::abs(inner(applied, psi) - pq) <= 1e-8 * std::max(std::abs(pq), scale * 1e-3));
      const double xn = weighted_norm(phi, WeightExponent{1.0});
      CHECK(pp.real() / (xn * xn) <= nrm * (1 + 1e-10));
    }
    CHECK(weighted_norm(density_apply(*c.model, c.lambda, GridFunction::zero(g)), WeightExponent{0.0}) == 0.0);
  }
}

TEST_CASE("free maximizer attains the density norm") {
  const SpatialGrid g(40.0, 2048);
  for (double lambda : {0.05, 1.0, 20.0}) {
    const auto m = free_density_maximizer(lambda, WeightExponent{1.0});
    CHECK(m.value == doctest::Approx(density_norm(make_free_laplacian(g), lambda, WeightExponent{1.0})).epsilon(1e-12));
    CHECK(std::norm(m.beta_plus) + std::norm(m.beta_minus) > 0.0);
  }
}

TEST_CASE("resolvents") {
  const SpatialGrid g2(1.0, 2);
  CMatrix d = CMatrix::Zero(2, 2);
  d.diagonal() << 1.0, 2.0;
  const auto diag = make_generic_hermitian(g2, d);
  // z = 3 + i: (H - z)^{-1} = diag(1/(-2 - i), 1/(-1 - i)).
  const auto r = resolvent(diag, 3.0, 1.0, Sign::Plus);
  const auto& rm = std::get<DenseMatrix>(r.rep).matrix;
  CHECK(std::abs(rm(0, 0) - 1.0 / cplx(-2.0, -1.0)) < 1e-14);
  CHECK(std::abs(rm(1, 1) - 1.0 / cplx(-1.0, -1.0)) < 1e-14);
  CHECK(std::abs(rm(0, 1)) < 1e-14);
  CHECK_THROWS_AS(resolvent(diag, 1.0, 0.0, Sign::Plus), Error);

  std::mt19937_64 rng(1);
  const SpatialGrid g(6.0, 64);
  const auto model = make_generic_hermitian(g, testing::random_hermitian(rng, 64));
  const auto rp = resolvent(model, 0.3, 0.05, Sign::Plus);
  const auto rmi = resolvent(model, 0.3, 0.05, Sign::Minus);
  CHECK(resolvent_residual(model, rp) < 1e-8);
  const CMatrix& a = std::get<DenseMatrix>(rp.rep).matrix;
  const CMatrix& b = std::get<DenseMatrix>(rmi.rep).matrix;
  const CMatrix stone = (a - b) / cplx(0.0, 2.0 * kPi);
  CHECK(hermiticity_defect(stone) < 1e-12);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (stone + stone.adjoint()));
  CHECK(es.eigenvalues().minCoeff() > -1e-12 * es.eigenvalues().maxCoeff());
  CHECK((stone - smoothed_density_matrix(model, 0.3, 0.05)).norm() < 1e-10 * stone.norm());

  // First resolvent identity R(z1) - R(z2) = (z1 - z2) R(z1) R(z2).
  const auto r2 = resolvent(model, -0.7, 0.2, Sign::Minus);
  const CMatrix& c = std::get<DenseMatrix>(r2.rep).matrix;
  const cplx z1(0.3, 0.05), z2(-0.7, -0.2);
  CHECK((a - c - (z1 - z2) * a * c).norm() < 1e-8 * a.norm());
}

TEST_CASE("Agmon decay of the free density") {
  const auto model = make_free_laplacian(SpatialGrid(16.0, 256));
  const auto scan = agmon_scan(model, WeightExponent{1.0}, log_spaced(10.0, 1000.0, 24));
  CHECK(scan.fit.slope == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(std::abs(scan.fit.slope + 0.5) < 0.05);
  CHECK(scan.fit.constant == doctest::Approx(0.25).epsilon(0.05));
  CHECK_THROWS_AS(fit_power_law({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}), Error);
  CHECK_THROWS_AS(fit_power_law({1.0, 2.0, 3.0, 4.0}, {0.0, 0.0, 0.0, 0.0}), Error);
}

TEST_CASE("spectral measure reconstruction") {
  const SpatialGrid g(12.0, 512);
  const auto model = make_free_laplacian(g);
  std::mt19937_64 rng(12);
  // Oracle: int_{sqrt(lo) < |k| < sqrt(hi)} |phi^(k)|^2 dk by a fine midpoint rule.
  auto oracle = [](const GridFunction& f, Interval j) {
    const int n = 20000;
    const double a = std::sqrt(j.lo), b = std::sqrt(j.hi), h = (b - a) / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = a + (i + 0.5) * h;
      sum += (std::norm(fourier_at(f, k)) + std::norm(fourier_at(f, -k))) * h;
    }
    return sum;
  };
  const Interval j{0.5, 9.0};
  for (int trial = 0; trial < 3; ++trial) {
    const auto phi = testing::random_packet(g, rng);
    CHECK(spectral_mass(model, j, phi, phi).real() == doctest::Approx(oracle(phi, j)).epsilon(1e-7));
    // The projector is sampled on frequency cells, so it only agrees to cell resolution.
    const double projected = std::pow(weighted_norm(spectral_projector(model, j, phi), WeightExponent{0.0}), 2);
    CHECK(std::abs(spectral_mass(model, j, phi, phi).real() - projected) < 0.15 * projected);
  }

  // Matrix models integrate the smoothed density in closed form.
  std::mt19937_64 rng2(5);
  const auto generic = make_generic_hermitian(SpatialGrid(4.0, 32), testing::random_hermitian(rng2, 32))
                           .with_route(EpsilonSmoothed{0.01});
  const auto psi = testing::random_function(SpatialGrid(4.0, 32), rng2);
  const auto ev = generic.eigensystem().values;
  const Interval all{ev.minCoeff() - 1e4, ev.maxCoeff() + 1e4};
  const double n2 = std::pow(weighted_norm(psi, WeightExponent{0.0}), 2);
  CHECK(spectral_mass(generic, all, psi, psi).real() == doctest::Approx(n2).epsilon(1e-5));
}

TEST_CASE("smoothed density of a fine periodic Laplacian matches the Lorentz-smoothed free density") {
  const SpatialGrid g(40.0, 512);
  const auto periodic = make_generic_hermitian(g, spectral_laplacian_matrix(g));
  const auto phi = gaussian(g, 0.0, 1.0, 0.5);
  // Oracle: int eps/pi / ((xi^2 - 1)^2 + eps^2) |phi^(xi)|^2 dxi by a fine midpoint rule.
  for (double eps : {0.8, 0.4, 0.2}) {
    const int n = 40000;
    const double lim = 10.0, h = 2.0 * lim / n;
    double oracle = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = -lim + (i + 0.5) * h;
      const double d = xi * xi - 1.0;
      oracle += eps / (kPi * (d * d + eps * eps)) * std::norm(fourier_at(phi, xi)) * h;
    }
    const double v = density_pairing(periodic.with_route(EpsilonSmoothed{eps}), 1.0, phi, phi).real();
    CHECK(v == doctest::Approx(oracle).epsilon(1e-4));
  }
}

TEST_CASE("Stark smoothed density is nonnegative") {
  const auto stark = make_stark_fd(SpatialGrid(20.0, 400));
  for (double lambda : {1.0, 5.0, 20.0}) {
    const CMatrix m = smoothed_density_matrix(stark, lambda, smoothing_width(stark, lambda));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
    CHECK(es.eigenvalues().minCoeff() > -1e-12 * es.eigenvalues().maxCoeff());
  }
}
