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

#include <doctest.h>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

using namespace smoothlab;
using testing::gaussian;
using testing::random_function;
using testing::random_vector;

namespace {

// Independent Riemann sum for int <x>^{2s} |f|^2 on a grid of its own.
double riemann_weighted_sq(double x_max, std::size_t n, const std::function<double(double)>& f2, double s) {
  const double dx = 2.0 * x_max / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = -x_max + (static_cast<double>(j) + 0.5) * dx;
    acc += std::pow(1.0 + x * x, s) * f2(x);
  }
  return acc * dx;
}

// c(q) = int (1+x^2)^{-s} e^{iqx} dx by Ooura's method for q > 0.
double lorentz_transform(double q, double s) {
  boost::math::quadrature::ooura_fourier_cos<double> cosine;
  auto [value, err] = cosine.integrate([s](double x) { return std::pow(1.0 + x * x, -s); }, q);
  return 2.0 * value;
}

}  // namespace

TEST_CASE("grid layout and Fourier consistency") {
  const SpatialGrid g(8.0, 64);
  CHECK(g.node(0) == doctest::Approx(-g.node(63)).epsilon(1e-15));
  CHECK(g.frequency_spacing() * g.spacing() * 64 == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK_THROWS_AS(SpatialGrid(8.0, 63), Error);
  CHECK_THROWS_AS(SpatialGrid(-1.0, 64), Error);
}

TEST_CASE("weighted_norm") {
  const SpatialGrid g(4.0, 400);
  CHECK(weighted_norm(GridFunction::zero(g), WeightExponent{3.0}) == 0.0);

  const auto box = GridFunction(g, g.nodes().unaryExpr([](double x) { return cplx(std::abs(x) <= 1.0 ? 1.0 : 0.0); }));
  CHECK(std::abs(weighted_norm(box, WeightExponent{0.0}) - std::sqrt(2.0)) <= g.spacing());

  const SpatialGrid wide(12.0, 240);
  const double value = weighted_norm(gaussian(wide), WeightExponent{1.0});
  const double fine = riemann_weighted_sq(12.0, 2400, [](double x) { return std::exp(-x * x); }, 1.0);
  CHECK(value * value == doctest::Approx(fine).epsilon(1e-10));
  CHECK(value * value == doctest::Approx(1.5 * std::sqrt(kPi)).epsilon(1e-10));
}

TEST_CASE("sampling rejects functions that leak past the truncated line") {
  const SpatialGrid g(3.0, 128);
  CHECK_THROWS_AS(GridFunction::sample(g, [](double x) { return cplx(std::exp(-0.05 * x * x)); }), Error);
  CHECK_NOTHROW(GridFunction::sample(g, [](double x) { return cplx(std::exp(-4.0 * x * x)); }));
}

TEST_CASE("fourier transform") {
  const SpatialGrid g(12.0, 256);
  CHECK(weighted_norm(fourier(GridFunction::zero(g)), WeightExponent{0.0}) == 0.0);

  const auto fhat = fourier(gaussian(g));
  double err = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double xi = g.frequency(m);
    err = std::max(err, std::abs(fhat[m] - std::exp(-0.5 * xi * xi)));
  }
  CHECK(err < 1e-6);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_function(g, rng);
    const auto h = fourier(f);
    CHECK(h.domain() == Domain::Frequency);
    const double n0 = weighted_norm(f, WeightExponent{0.0});
    CHECK(std::abs(weighted_norm(h, WeightExponent{0.0}) - n0) <= 1e-10 * n0);
    CHECK((inverse_fourier(h).values() - f.values()).norm() <= 1e-10 * f.values().norm());
  }

  // Off-grid evaluation agrees with the FFT at grid frequencies.
  const auto f = testing::random_packet(g, rng);
  const auto F = fourier(f);
  for (std::size_t m : {std::size_t{3}, std::size_t{100}, std::size_t{128}, std::size_t{200}}) {
    CHECK(std::abs(fourier_at(f, g.frequency(m)) - F[m]) < 1e-10);
  }
}

TEST_CASE("weighted norm properties on random inputs") {
  const SpatialGrid g(6.0, 96);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> us(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_function(g, rng);
    const auto h = random_function(g, rng);
    const double s1 = us(rng), s2 = us(rng);
    const double lo = std::min(s1, s2), hi = std::max(s1, s2);
    CHECK(weighted_norm(f, WeightExponent{lo}) <= weighted_norm(f, WeightExponent{hi}) * (1 + 1e-14));
    CHECK(std::abs(inner(f, h)) <=
          weighted_norm(f, WeightExponent{-s1}) * weighted_norm(h, WeightExponent{s1}) * (1 + 1e-12));
  }
}

TEST_CASE("dual_norm_rank_k") {
  const SpatialGrid g(50.0, 2000);
  const CVector x = g.nodes().cast<cplx>();
  const WeightExponent s{1.0};

  CMatrix u1(g.size(), 1);
  u1.col(0) = (cplx(0, 1) * x).array().exp() / kSqrt2Pi;
  CHECK(dual_norm_rank_k(RankKFactored::make_symmetric(g, u1, CMatrix::Zero(1, 1)), s) == 0.0);

  // Rank one: value is (2 pi)^{-1} sum <x>^{-2} dx, which tends to 1/2 as x_max grows.
  const auto r1 = RankKFactored::make_symmetric(g, u1, CMatrix::Identity(1, 1));
  const double v1 = dual_norm_rank_k(r1, s);
  const double lorentz = riemann_weighted_sq(50.0, 2000, [](double) { return 1.0; }, -1.0);
  CHECK(v1 == doctest::Approx(lorentz / (2.0 * kPi)).epsilon(1e-12));
  CHECK(v1 == doctest::Approx(0.5).epsilon(2e-2));
  CHECK(op_norm_weighted(r1, WeightExponent{-1.0}, WeightExponent{-1.0}).norm == doctest::Approx(v1).epsilon(1e-6));

  // Rank two with frequencies +-k: (c(0) + |c(2k)|) / (2 pi).
  const double k = 0.7;
  CMatrix u2(g.size(), 2);
  u2.col(0) = (cplx(0, k) * x).array().exp() / kSqrt2Pi;
  u2.col(1) = (cplx(0, -k) * x).array().exp() / kSqrt2Pi;
  const auto r2 = RankKFactored::make_symmetric(g, u2, CMatrix::Identity(2, 2));
  const double v2 = dual_norm_rank_k(r2, s);
  cplx c2 = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) c2 += std::exp(cplx(0, 2 * k * g.node(j))) / (1.0 + g.node(j) * g.node(j));
  c2 *= g.spacing();
  CHECK(v2 == doctest::Approx((lorentz + std::abs(c2)) / (2.0 * kPi)).epsilon(1e-10));
  CHECK(op_norm_weighted(r2, WeightExponent{-1.0}, WeightExponent{-1.0}).norm == doctest::Approx(v2).epsilon(1e-6));
  // Full-line limit through an independent oscillatory quadrature of c(q).
  CHECK(lorentz_transform(2 * k, 1.0) == doctest::Approx(kPi * std::exp(-2 * k)).epsilon(1e-8));
  CHECK(v2 == doctest::Approx((kPi + kPi * std::exp(-2 * k)) / (2.0 * kPi)).epsilon(2e-2));

  CMatrix bad = CMatrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(dual_norm_rank_k(RankKFactored::make_symmetric(g, u2, bad), s), Error);
}

TEST_CASE("op_norm_weighted") {
  const SpatialGrid g(4.0, 32);
  const CMatrix id = CMatrix::Identity(32, 32);
  CHECK(op_norm_weighted(DenseMatrix{id, true}, WeightExponent{-1.0}, WeightExponent{1.0}).norm ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(op_norm_weighted(IntegralKernel{g, id / g.spacing()}, WeightExponent{-1.0}, WeightExponent{1.0}).norm ==
        doctest::Approx(1.0).epsilon(1e-8));

  CMatrix d = CMatrix::Identity(32, 32);
  d(0, 0) = 3.0;
  CHECK(op_norm_weighted(DenseMatrix{d, true}, WeightExponent{0.0}, WeightExponent{0.0}).norm ==
        doctest::Approx(3.0).epsilon(1e-8));

  std::mt19937_64 rng(5);
  const auto h = testing::random_hermitian(rng, 32);
  const auto rep = DenseMatrix{h, true};
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const double expected = es.eigenvalues().cwiseAbs().maxCoeff();
  CHECK(op_norm_weighted(rep, WeightExponent{0.0}, WeightExponent{0.0}).norm == doctest::Approx(expected).epsilon(1e-6));
  CHECK_THROWS_AS(make_self_adjoint_matrix(h + CMatrix::Identity(32, 32) * cplx(0, 1e-3)), Error);
}

TEST_CASE("factored rank-k agrees with dense power iteration on random forms") {
  const SpatialGrid g(8.0, 128);
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix u(g.size(), 3);
    for (int c = 0; c < 3; ++c) u.col(c) = testing::random_packet(g, rng).values();
    CMatrix b(3, 3);
    for (int c = 0; c < 3; ++c) b.col(c) = random_vector(rng, 3);
    const CMatrix coeff = b * b.adjoint();
    const auto rep = RankKFactored::make_symmetric(g, u, coeff);
    const double form = dual_norm_rank_k(rep, WeightExponent{1.0});
    const double dense = op_norm_weighted(rep, WeightExponent{-1.0}, WeightExponent{-1.0}).norm;
    CHECK(form == doctest::Approx(dense).epsilon(1e-6));

    const auto max = dual_norm_rank_k_maximizer(rep, WeightExponent{1.0});
    CHECK(max.value == doctest::Approx(form).epsilon(1e-12));
  }
}
