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
#include <smoothlab/perturbation.hpp>
#include <smoothlab/spectral_density.hpp>

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace smoothlab;

namespace {

PotentialSpec bump(double amplitude) {
  return PotentialSpec::multiplicative([amplitude](double x) { return amplitude * std::exp(-x * x); });
}

}  // namespace

TEST_CASE("free resolvent kernels") {
  const SpatialGrid g(10.0, 128);
  const double lambda = 2.3, k = std::sqrt(lambda);
  const auto kp = free_resolvent_kernel(lambda, Sign::Plus, g);
  const auto km = free_resolvent_kernel(lambda, Sign::Minus, g);
  CHECK((km.kernel - kp.kernel.conjugate()).cwiseAbs().maxCoeff() < 1e-15);
  // Stone: (K+ - K-) / (2 pi i) is the density kernel cos(k (x - y)) / (2 pi k).
  const CMatrix stone = (kp.kernel - km.kernel) / cplx(0.0, 2.0 * kPi);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); i += 7)
    for (std::size_t j = 0; j < g.size(); j += 5)
      err = std::max(err, std::abs(stone(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                   std::cos(k * (g.node(i) - g.node(j))) / (2.0 * kPi * k)));
  CHECK(err < 1e-14);
  // Applied to a Gaussian, R(lambda + i eps) agrees with the Fourier multiplier
  // 1 / (xi^2 - lambda - i eps); the kink of the kernel makes the grid sum O(dx^2).
  auto kernel_error = [&](std::size_t n) {
    const SpatialGrid big(40.0, n);
    const auto phi = testing::gaussian(big, 0.0, 0.8);
    const double eps = 2.0;  // decay e^{-0.6 |x|} keeps the periodic FFT wrap negligible
    const GridFunction via_kernel = smoothlab::apply(OperatorRep(free_resolvent_kernel(lambda, Sign::Plus, big, eps)), phi);
    const auto fhat = fourier(phi);
    CVector m(fhat.values().size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double xi = big.frequency(static_cast<std::size_t>(i));
      m[i] = fhat.values()[i] / cplx(xi * xi - lambda, -eps);
    }
    const GridFunction via_fft = inverse_fourier(GridFunction(big, m, Domain::Frequency));
    return (via_kernel.values() - via_fft.values()).cwiseAbs().maxCoeff() / via_fft.values().cwiseAbs().maxCoeff();
  };
  const double coarse = kernel_error(512), fine = kernel_error(1024);
  CHECK(coarse < 1e-2);
  CHECK(fine < coarse / 3.5);
}

TEST_CASE("Agmon decay of the free resolvent and density") {
  const SpatialGrid g(20.0, 1024);
  const auto lambdas = log_spaced(10.0, 1000.0, 8);
  std::vector<double> norms;
  for (double l : lambdas) norms.push_back(free_resolvent_norm(l, Sign::Plus, g, WeightExponent{1.0}));
  CHECK(fit_power_law(lambdas, norms).slope == doctest::Approx(-0.5).epsilon(0.1));
  const auto scan = agmon_scan(make_free_laplacian(g), WeightExponent{1.0}, lambdas);
  CHECK(std::abs(scan.fit.slope + 0.5) < 0.05);
}

TEST_CASE("Lippmann-Schwinger inversion") {
  const SpatialGrid g(6.0, 160);
  // V = 0: identity.
  const auto zero = assemble_vr(PotentialSpec::multiplicative([](double) { return 0.0; }), g, 3.0, Sign::Plus,
                                WeightExponent{1.0});
  CHECK(zero.support.empty());
  CHECK(zero.inv_norm_s == 1.0);
  std::mt19937_64 rng(5);
  const CVector f = testing::random_vector(rng, static_cast<Eigen::Index>(g.size()));
  CHECK((zero.apply_inverse(f) - f).norm() == 0.0);

  // Small V: Neumann series oracle and the geometric bound.
  const DenseMatrix v = potential_matrix(bump(0.3), g);
  const auto st = assemble_vr(v, g, 4.0, Sign::Plus, WeightExponent{0.0});
  const CMatrix vr = v.matrix * free_resolvent_kernel(4.0, Sign::Plus, g).kernel * g.spacing();
  const double vr_norm = Eigen::JacobiSVD<CMatrix>(vr).singularValues()(0);
  REQUIRE(vr_norm < 0.3);
  CHECK(st.vr_norm_s == doctest::Approx(vr_norm).epsilon(1e-10));
  CHECK(st.inv_norm_s <= 1.0 / (1.0 - vr_norm) + 1e-12);
  CVector term = f, neumann = f;
  for (int k = 1; k <= 25; ++k) {
    term = -(vr * term);
    neumann += term;
  }
  CHECK((st.apply_inverse(f) - neumann).norm() < 1e-8 * f.norm());
  CHECK(st.block_residual < 1e-12);
  // Inverse norm in the weighted space against a dense computation.
  const auto ws = assemble_vr(v, g, 4.0, Sign::Minus, WeightExponent{1.0});
  RVector w(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = jp_power(g.node(static_cast<std::size_t>(i)), 1.0);
  const CMatrix vr_minus = v.matrix * free_resolvent_kernel(4.0, Sign::Minus, g).kernel * g.spacing();
  const CMatrix inv = (CMatrix::Identity(vr.rows(), vr.cols()) + vr_minus).inverse();
  const CMatrix weighted = w.asDiagonal() * inv * w.cwiseInverse().asDiagonal();
  CHECK(ws.inv_norm_s == doctest::Approx(Eigen::JacobiSVD<CMatrix>(weighted).singularValues()(0)).epsilon(1e-9));
}

TEST_CASE("perturbed density at V = 0 is the free density") {
  const SpatialGrid g(8.0, 128);
  const DenseMatrix v{CMatrix::Zero(128, 128), true};
  const auto pd = perturbed_density(v, g, 2.0, WeightExponent{1.0});
  CHECK(pd.ratio == doctest::Approx(1.0).epsilon(1e-12));
  std::mt19937_64 rng(1);
  const auto phi = testing::random_function(g, rng);
  const auto a = smoothlab::apply(OperatorRep(pd.rep), phi);
  const auto b = smoothlab::apply(OperatorRep(free_density_factored(g, 2.0)), phi);
  CHECK((a.values() - b.values()).norm() < 1e-12 * b.values().norm());
}

TEST_CASE("perturbed density is Hermitian, nonnegative and complete") {
  const SpatialGrid g(10.0, 256);
  const DenseMatrix v = potential_matrix(bump(0.3), g);
  for (double lambda : {0.5, 2.0, 10.0}) {
    const auto pd = perturbed_density(v, g, lambda, WeightExponent{1.0});
    CHECK(pd.hermiticity_defect < 1e-8);
    CHECK(pd.min_eigenvalue > -1e-8);
    CHECK(pd.norm > 0.0);
  }
  // A repulsive bump has no bound states, so the densities integrate to the
  // identity (up to the O(dx^2) kernel quadrature).
  const auto model = make_perturbed_schrodinger(g, bump(0.3));
  const auto phi = testing::gaussian(g, 0.5, 1.0, 2.0);
  const double mass = spectral_mass(model, {1e-6, 400.0}, phi, phi, 1e-9).real();
  CHECK(mass == doctest::Approx(std::pow(weighted_norm(phi, WeightExponent{0.0}), 2)).epsilon(1e-3));
  // Reflection symmetry for an even potential.
  CVector reflected = phi.values().reverse();
  const GridFunction rphi(g, reflected);
  CHECK(density_pairing(model, 3.0, rphi, rphi).real() ==
        doctest::Approx(density_pairing(model, 3.0, phi, phi).real()).epsilon(1e-10));
}

TEST_CASE("resolvent algebra of the perturbed density at fixed epsilon") {
  std::mt19937_64 rng(64);
  const CMatrix h = testing::random_hermitian(rng, 64);
  const CMatrix v = 0.3 * testing::random_hermitian(rng, 64);
  const auto check = perturbed_density_matrix(h, v, 0.7, 1e-2);
  CHECK(check.relative_error < 1e-10);
  CHECK(check.intermediate_error < 1e-8);
  CHECK(check.literal_relative_error > 1e-3);
  const auto zero = perturbed_density_matrix(h, CMatrix::Zero(64, 64), 0.7, 1e-2);
  CHECK(zero.relative_error < 1e-12);
  CHECK_THROWS_AS(perturbed_density_matrix(h, v, 0.7, 0.0), Error);
}

TEST_CASE("limiting absorption scan") {
  const SpatialGrid g(6.0, 128);
  const auto lambdas = log_spaced(0.1, 100.0, 12);
  const auto zero = lap_condition_scan(PotentialSpec::multiplicative([](double) { return 0.0; }), g,
                                       WeightExponent{1.0}, lambdas);
  CHECK(zero.sup_inv_norm == doctest::Approx(1.0));
  CHECK(zero.limsup_ok);
  const auto small = lap_condition_scan(bump(0.3), g, WeightExponent{1.0}, lambdas);
  CHECK(std::isfinite(small.sup_inv_norm));
  CHECK(small.exclusions.empty());
  CHECK(small.limsup_ok);
  // Deep well: bound states show up as determinant roots below zero, and
  // match the negative eigenvalues of the grid Hamiltonian.
  const SpatialGrid fine(6.0, 512);
  auto neg = log_spaced(0.5, 12.0, 60);
  for (double& l : neg) l = -l;
  std::sort(neg.begin(), neg.end());
  const auto deep = lap_condition_scan(bump(-10.0), fine, WeightExponent{1.0}, neg);
  const auto model = make_perturbed_schrodinger(fine, bump(-10.0));
  std::vector<double> bound;
  for (Eigen::Index i = 0; i < model.eigensystem().values.size(); ++i) {
    const double e = model.eigensystem().values[i];
    if (e < -0.5 && e > -12.0) bound.push_back(e);
  }
  REQUIRE(!bound.empty());
  CHECK(deep.determinant_roots.size() == bound.size());
  for (std::size_t i = 0; i < std::min(bound.size(), deep.determinant_roots.size()); ++i)
    CHECK(deep.determinant_roots[i] == doctest::Approx(bound[i]).epsilon(1e-2));
  CHECK(!deep.exclusions.empty());
}

TEST_CASE("perturbed smoothing batch") {
  const SpatialGrid g(16.0, 256);
  SpectralFunction sf = power_spectral_function(0.25, 1.0, {0.1, 100.0});
  sf.sigma = [](double l) { return std::pow(1.0 + l, 0.25); };
  const auto batch = random_wavepackets(g, 8, 3);
  const auto r = perturbed_smoothing_check(bump(0.3), g, sf, WeightExponent{1.0}, batch);
  CHECK(r.pass);
  CHECK(r.empirical_constant > 0.0);
  // V = 0 reduces to the free constant.
  const auto free = perturbed_smoothing_check(PotentialSpec::multiplicative([](double) { return 0.0; }), g, sf,
                                              WeightExponent{1.0}, batch);
  double sup = 0.0;
  for (double l : log_spaced(0.1 * (1 + 1e-9), 100.0 * (1 - 1e-9), 64))
    sup = std::max(sup, std::pow(1.0 + l, 0.25) * std::sqrt(dual_norm_rank_k(free_density_factored(g, l), WeightExponent{1.0})));
  CHECK(free.sup_bound == doctest::Approx(kSqrt2Pi * sup).epsilon(1e-3));
  CHECK(free.max_norm_ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(free.pass);
}
