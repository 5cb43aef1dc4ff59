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

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace smoothlab;

namespace {

// sqrt(lambda) ||A(lambda)||_{1,-1} = (1 + e^{-2 sqrt(lambda)}) / 4 on the free line.
double free_factor(double lambda) { return std::sqrt((1.0 + std::exp(-2.0 * std::sqrt(lambda))) / 4.0); }

}  // namespace

TEST_CASE("rhs sup on the free line approaches sqrt(pi) at the left edge") {
  const auto model = make_free_laplacian(SpatialGrid(200.0, 2048));
  const auto sf = power_spectral_function(0.25, 1.0, {1e-4, 1e4});
  const auto sup = rhs_sup(model, sf, WeightExponent{1.0}, sup_grid(sf, 64));
  CHECK(sup.value == doctest::Approx(std::sqrt(kPi)).epsilon(0.01));
  CHECK(sup.value <= std::sqrt(kPi));
  CHECK(sup.value == doctest::Approx(kSqrt2Pi * free_factor(sup.argmax)).epsilon(1e-9));
  CHECK(sup.at_edge);
  CHECK(sup.argmax < 2e-4);
  CHECK(sup.lambdas.size() > 64 + 2 * 8);
  // The refined argmax moves by less than one coarse cell.
  for (std::size_t r = 1; r < sup.round_argmax.size(); ++r)
    CHECK(std::abs(sup.round_argmax[r] - sup.round_argmax[0]) <= sup.coarse_cell);
  CHECK_THROWS_AS(rhs_sup(model, sf, WeightExponent{1.0}, sup_grid(sf, 16)), Error);
}

TEST_CASE("rhs sup scaling") {
  const auto model = make_free_laplacian(SpatialGrid(40.0, 512));
  const Interval j{1.0, 2.0};
  const auto base = rhs_sup(model, power_spectral_function(0.0, 1.0, j), WeightExponent{1.0}, sup_grid(power_spectral_function(0.0, 1.0, j)));
  // a = 2 lambda: a' = 2 divides the sup by sqrt(2).
  const auto doubled = power_spectral_function(0.0, 1.0, j, 1.0, 2.0);
  CHECK(rhs_sup(model, doubled, WeightExponent{1.0}, sup_grid(doubled)).value ==
        doctest::Approx(base.value / std::sqrt(2.0)).epsilon(1e-12));
  const auto zero = power_spectral_function(0.0, 1.0, j, 0.0);
  CHECK(rhs_sup(model, zero, WeightExponent{1.0}, sup_grid(zero)).value == 0.0);
  // sigma = 1, a = lambda: the sup is sqrt(2 pi) max density_norm^{1/2}, here at the left end.
  double best = 0.0;
  for (double l : base.lambdas) best = std::max(best, std::sqrt(density_norm(model, l, WeightExponent{1.0})));
  CHECK(base.value == doctest::Approx(kSqrt2Pi * best).epsilon(1e-12));
}

TEST_CASE("wave packets are normalized and spectrally localized") {
  const SpatialGrid g(40.0, 1024);
  const auto model = make_free_laplacian(g);
  std::mt19937_64 rng(2);
  const auto psi = testing::random_packet(g, rng);
  const Interval d{1.0, 1.5};
  const auto p = wavepacket(model, d, psi);
  CHECK(weighted_norm(p, WeightExponent{0.0}) == doctest::Approx(1.0).epsilon(1e-10));
  const auto again = spectral_projector(model, d, p);
  CHECK((again.values() - p.values()).norm() < 1e-10 * p.values().norm());
  // Already inside D and normalized: unchanged. Homogeneous in psi.
  CHECK((wavepacket(model, d, p).values() - p.values()).norm() < 1e-10 * p.values().norm());
  CHECK((wavepacket(model, d, psi.scaled(2.0)).values() - p.values()).norm() < 1e-10 * p.values().norm());
  // ||E(D) psi||^2 from the density, against a direct k-quadrature of |psi^|^2.
  const int n = 20000;
  const double a = 1.0, b = std::sqrt(1.5), h = (b - a) / n;
  double oracle = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = a + (i + 0.5) * h;
    oracle += (std::norm(fourier_at(psi, k)) + std::norm(fourier_at(psi, -k))) * h;
  }
  CHECK(spectral_mass(model, d, psi, psi).real() == doctest::Approx(oracle).epsilon(1e-6));
  CHECK_THROWS_AS(wavepacket(model, {400.0, 401.0}, testing::gaussian(g, 0.0, 2.0)), Error);
}

TEST_CASE("near maximizer attains the density norm") {
  const SpatialGrid g(400.0, 8192);
  const auto model = make_free_laplacian(g);
  for (double lambda : {0.3, 2.0}) {
    const auto psi = density_near_maximizer(model, lambda, WeightExponent{1.0});
    CHECK(weighted_norm(psi, WeightExponent{1.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(density_pairing(model, lambda, psi, psi).real() ==
          doctest::Approx(density_norm(model, lambda, WeightExponent{1.0})).epsilon(2e-2));
  }
  // Matrix model: top eigenvector of the weighted smoothed density.
  std::mt19937_64 rng(9);
  const auto generic = make_generic_hermitian(SpatialGrid(4.0, 24), testing::random_hermitian(rng, 24))
                           .with_route(EpsilonSmoothed{0.3});
  const auto psi = density_near_maximizer(generic, 0.5, WeightExponent{0.5});
  CHECK(density_pairing(generic, 0.5, psi, psi).real() ==
        doctest::Approx(density_norm(generic, 0.5, WeightExponent{0.5})).epsilon(1e-6));
}

TEST_CASE("packet lower bound converges to the sup") {
  const auto model = make_free_laplacian(SpatialGrid(200.0, 2048));
  const auto sf = power_spectral_function(0.25, 1.0, {1e-4, 1e4});
  const auto r = certify(model, sf, WeightExponent{1.0});
  CHECK(r.pass);
  CHECK(r.upper_respected);
  CHECK(r.gap < 0.05);
  CHECK(r.gap > -0.01);
  CHECK(r.lower.h.size() == 7);
  CHECK(r.lower.k.back() == doctest::Approx(r.lower.extrapolated).epsilon(0.01));
  CHECK(r.lower.k.back() == doctest::Approx(r.lower.limit).epsilon(1e-3));
  bool flagged = false;
  for (const auto& n : r.notes) flagged = flagged || n == "sup not attained in grid interior";
  CHECK(flagged);

  // Interior argmax: sigma = 1, a = lambda on (1, 2).
  const auto flat = power_spectral_function(0.0, 1.0, {1.0, 2.0});
  const auto r2 = certify(make_free_laplacian(SpatialGrid(200.0, 2048)), flat, WeightExponent{1.0});
  CHECK(r2.pass);
  CHECK(r2.gap < 0.05);

  // sigma = 0 gives zero on both sides.
  const auto zero = power_spectral_function(0.0, 1.0, {1.0, 2.0}, 0.0);
  const auto r3 = certify(model, zero, WeightExponent{1.0});
  CHECK(r3.lhs_best == 0.0);
  for (double k : r3.lower.k) CHECK(k == 0.0);

  CertifyOptions narrow;
  narrow.h_min = 1e-3;
  CHECK_THROWS_AS(certify(model, power_spectral_function(0.0, 1.0, {1.0, 1.0005}), WeightExponent{1.0}, narrow), Error);
}

TEST_CASE("packet values are phase invariant and never exceed the sup") {
  const auto model = make_free_laplacian(SpatialGrid(100.0, 1024));
  const auto sf = power_spectral_function(0.25, 1.0, {0.1, 10.0});
  const auto sup = rhs_sup(model, sf, WeightExponent{1.0}, sup_grid(sf));
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double l0 = 0.5 + 5.0 * u(rng);
    const auto psi = testing::random_packet(model.grid(), rng);
    const GridFunction unit = psi.scaled(1.0 / weighted_norm(psi, WeightExponent{1.0}));
    const std::vector<double> hs{0.4, 0.2, 0.1};
    const auto a = lhs_lower(model, sf, l0, hs, unit);
    const auto b = lhs_lower(model, sf, l0, hs, unit.scaled(std::polar(1.0, 2.0 * kPi * u(rng))));
    for (std::size_t i = 0; i < hs.size(); ++i) {
      CHECK(a.k[i] == doctest::Approx(b.k[i]).epsilon(1e-10));
      CHECK(kSqrt2Pi * a.k[i] <= sup.value * 1.01);
    }
  }
}

TEST_CASE("epsilon route is reported as a surrogate") {
  std::mt19937_64 rng(13);
  const auto generic = make_generic_hermitian(SpatialGrid(4.0, 24), testing::random_hermitian(rng, 24))
                           .with_route(EpsilonSmoothed{0.5});
  const auto sf = power_spectral_function(0.0, 1.0, {-2.0, 2.0});
  const auto r = certify(generic, sf, WeightExponent{0.5});
  CHECK(r.tolerance == 0.2);
  CHECK(r.upper_respected);
  bool surrogate = false;
  for (const auto& n : r.notes) surrogate = surrogate || n.find("surrogate") != std::string::npos;
  CHECK(surrogate);
}
