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

#include <smoothlab/models.hpp>

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace smoothlab;
using testing::gaussian;
using testing::random_function;

TEST_CASE("generic Hermitian model") {
  const SpatialGrid g(2.0, 4);
  CMatrix d = CMatrix::Zero(4, 4);
  d.diagonal() << 1.0, 2.0, 3.0, 4.0;
  const auto model = make_generic_hermitian(g, d);
  CHECK(model.eigensystem().values[0] == 1.0);
  CHECK(model.eigensystem().values[1] == 2.0);
  CHECK(model.eigensystem().values[2] == 3.0);
  CHECK(model.eigensystem().values[3] == 4.0);

  CMatrix nh = d;
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(make_generic_hermitian(g, nh), Error);
  CHECK_THROWS_AS(make_generic_hermitian(SpatialGrid(2.0, 6), d), Error);

  // g(lambda) = lambda multiplies eigen-coefficients by the eigenvalue.
  const CVector c = (CVector(4) << cplx(1, 2), cplx(-1, 0.5), 0.0, 0.0).finished();
  const auto out = apply_function(model, [](double l) { return cplx(l); }, GridFunction(g, c));
  CHECK(std::abs(out[0] - c[0]) < 1e-15);
  CHECK(std::abs(out[1] - 2.0 * c[1]) < 1e-15);
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices") {
  std::mt19937_64 rng(3);
  const SpatialGrid g(4.0, 40);
  const auto h = testing::random_hermitian(rng, 40);
  const auto model = make_generic_hermitian(g, h);
  const auto& e = model.eigensystem();
  const CMatrix rebuilt = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
  CHECK((rebuilt - h).norm() <= 1e-10 * h.norm());
}

TEST_CASE("free Laplacian acts as -d^2/dx^2") {
  const SpatialGrid g(12.0, 1024);
  const auto model = make_free_laplacian(g);
  const auto phi = gaussian(g, 0.3, 1.0, 2.0);
  const auto out = apply_function(model, [](double l) { return cplx(l); }, phi);
  const double h = g.spacing();
  double err = 0.0, scale = 0.0;
  for (std::size_t j = 1; j + 1 < g.size(); ++j) {
    const cplx fd = -(phi[j + 1] - 2.0 * phi[j] + phi[j - 1]) / (h * h);
    err = std::max(err, std::abs(out[j] - fd));
    scale = std::max(scale, std::abs(fd));
  }
  // Second differences carry an h^2 f''''/12 error; |f''''| stays below 60 for this packet.
  CHECK(err <= 60.0 * h * h / 12.0);
  CHECK(err >= 0.0);
  CHECK(scale > 1.0);
}

TEST_CASE("Stark finite-difference model") {
  const SpatialGrid g(20.0, 800);
  const auto model = make_stark_fd(g);
  CHECK(hermiticity_defect(model.matrix().matrix) <= 1e-12);
  const auto& e = model.eigensystem();
  CHECK(e.values.size() == 800);
  for (Eigen::Index i = 1; i < e.values.size(); ++i) CHECK(e.values[i] >= e.values[i - 1]);
  CHECK_FALSE(model.exact_route());
  CHECK(model.default_epsilon(10.0) > 0.0);
}

TEST_CASE("functional calculus identities") {
  std::mt19937_64 rng(8);
  const SpatialGrid g(8.0, 128);
  const auto free = make_free_laplacian(g);
  const auto stark = make_stark_fd(SpatialGrid(8.0, 128));
  const auto generic = make_generic_hermitian(g, testing::random_hermitian(rng, 128));
  for (const OperatorModel* model : {&free, &stark, &generic}) {
    CAPTURE(to_string(model->kind()));
    const auto phi = random_function(g, rng);
    const double n0 = weighted_norm(phi, WeightExponent{0.0});
    const auto same = apply_function(*model, [](double) { return cplx(1.0); }, phi);
    CHECK((same.values() - phi.values()).norm() <= 1e-12 * phi.values().norm());

    for (double t : {0.3, 2.0, 17.0}) {
      const auto u = apply_function(*model, [t](double l) { return std::polar(1.0, t * l); }, phi);
      CHECK(std::abs(weighted_norm(u, WeightExponent{0.0}) - n0) <= 1e-10 * n0);
    }

    auto g1 = [](double l) { return cplx(std::cos(l), 1.0 / (1.0 + l * l)); };
    auto g2 = [](double l) { return cplx(std::exp(-0.01 * l * l), l); };
    const auto composed = apply_function(*model, g1, apply_function(*model, g2, phi));
    const auto product = apply_function(*model, [&](double l) { return g1(l) * g2(l); }, phi);
    CHECK((composed.values() - product.values()).norm() <= 1e-10 * product.values().norm());

    const Interval j{0.5, 6.0};
    const auto p1 = spectral_projector(*model, j, phi);
    const auto p2 = spectral_projector(*model, j, p1);
    CHECK((p2.values() - p1.values()).norm() <= 1e-12 * phi.values().norm());
    const auto pg = spectral_projector(*model, j, apply_function(*model, g1, phi));
    const auto gp = apply_function(*model, g1, p1);
    CHECK((pg.values() - gp.values()).norm() <= 1e-10 * phi.values().norm());
    // Self-adjoint: (E phi, psi) = (phi, E psi).
    const auto psi = random_function(g, rng);
    CHECK(std::abs(inner(p1, psi) - inner(phi, spectral_projector(*model, j, psi))) <= 1e-10 * n0 * n0);

    const auto all = spectral_projector(*model, Interval{-1e9, 1e9}, phi);
    CHECK((all.values() - phi.values()).norm() <= 1e-12 * phi.values().norm());
  }
  CHECK_THROWS_AS(apply_function(free, [](double l) { return cplx(1.0 / (l - l)); }, random_function(g, rng)), Error);
}

TEST_CASE("free spectral projector is a frequency mask") {
  const SpatialGrid g(10.0, 256);
  std::mt19937_64 rng(4);
  const auto phi = testing::random_packet(g, rng);
  const auto p = fourier(spectral_projector(make_free_laplacian(g), Interval{1.0, 4.0}, phi));
  const auto f = fourier(phi);
  double err = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double xi2 = g.frequency(m) * g.frequency(m);
    const cplx expected = (xi2 > 1.0 && xi2 < 4.0) ? f[m] : cplx(0.0);
    err = std::max(err, std::abs(p[m] - expected));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("spectral functions") {
  const auto sf = power_spectral_function(0.25, 1.0, Interval{0.01, 100.0});
  CHECK_NOTHROW(sf.validate());
  CHECK(sf.sigma(16.0) == doctest::Approx(2.0));
  CHECK(sf.a_prime(3.0) == doctest::Approx(1.0));
  CHECK(sf.max_abs_a() == doctest::Approx(100.0).epsilon(1e-2));

  SpectralFunction dec = sf;
  dec.a = [](double l) { return -l; };
  dec.a_prime = [](double) { return -1.0; };
  CHECK_THROWS_AS(dec.validate(), Error);

  SpectralFunction kinked = sf;
  kinked.breakpoints = {1.0};
  const auto comps = kinked.components();
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].hi == doctest::Approx(1.0 - 1e-6));
  CHECK(comps[1].lo == doctest::Approx(1.0 + 1e-6));
  CHECK_FALSE(kinked.admissible(1.0));
  CHECK(kinked.admissible(1.1));
}

TEST_CASE("short-range check") {
  const SpatialGrid g(64.0, 2048);
  const auto zero = shortrange_check(PotentialSpec::multiplicative([](double) { return 0.0; }), g);
  CHECK(zero.short_range);
  CHECK(zero.constant == 0.0);

  const auto lorentz = shortrange_check(PotentialSpec::multiplicative([](double x) { return 1.0 / (1.0 + x * x); }, 1.0), g);
  CHECK(lorentz.short_range);
  CHECK(lorentz.constant == doctest::Approx(1.0).epsilon(1e-12));

  const auto slow = shortrange_check(PotentialSpec::multiplicative([](double x) { return 1.0 / (1.0 + std::abs(x)); }, 0.5), g);
  CHECK_FALSE(slow.short_range);
  CHECK(slow.growth_slope == doctest::Approx(0.5).epsilon(0.1));

  CHECK(shortrange_check(PotentialSpec::factored_pseudo(0.25, 1.0), g).short_range);
  CHECK_THROWS_AS(PotentialSpec::factored_pseudo(0.5, 1.0), Error);
}

TEST_CASE("potential file loader") {
  const std::string path = "smoothlab_test_potential.txt";
  {
    std::ofstream out(path);
    out << "# x V\n-1 0\n0 2.0\n\n1 0   # trailing comment\n";
  }
  const auto v = load_potential_file(path);
  CHECK(v.v(-0.5) == doctest::Approx(1.0));
  CHECK(v.v(0.25) == doctest::Approx(1.5));
  CHECK(v.v(3.0) == 0.0);
  {
    std::ofstream out(path);
    out << "0 1\n1 oops\n";
  }
  try {
    load_potential_file(path);
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Configuration);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_potential_file("/nonexistent/potential.txt"), Error);

  const SpatialGrid g(4.0, 16);
  const auto pm = potential_matrix(PotentialSpec::factored_pseudo(0.25, 1.0), g);
  CHECK(hermiticity_defect(pm.matrix) < 1e-12);
}
