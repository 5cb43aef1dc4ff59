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

// Seeded generators and small oracles shared by the unit tests.

#pragma once

#include <smoothlab/core_spaces.hpp>

#include <cmath>
#include <random>

namespace testing {

using namespace smoothlab;

inline CVector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(normal(rng), normal(rng));
  return v;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  CMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m.col(j) = random_vector(rng, n);
  return 0.5 * (m + m.adjoint());
}

inline GridFunction gaussian(const SpatialGrid& g, double center = 0.0, double width = 1.0, double freq = 0.0) {
  return GridFunction::sample(g, [=](double x) {
    const double y = (x - center) / width;
    return std::exp(-0.5 * y * y) * std::polar(1.0, freq * x);
  });
}

/// One to three modulated Gaussians with seeded centers, widths, frequencies and amplitudes.
inline GridFunction random_packet(const SpatialGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int terms = 1 + static_cast<int>(u(rng) * 3.0) % 3;
  CVector v = CVector::Zero(static_cast<Eigen::Index>(g.size()));
  for (int t = 0; t < terms; ++t) {
    const double c = -1.5 + 3.0 * u(rng), w = 0.5 + 0.7 * u(rng), xi = -3.0 + 6.0 * u(rng);
    const cplx amp = std::polar(0.5 + u(rng), 2.0 * kPi * u(rng));
    v += amp * gaussian(g, c, w, xi).values();
  }
  return GridFunction(g, v);
}

inline GridFunction random_function(const SpatialGrid& g, std::mt19937_64& rng) {
  return GridFunction(g, random_vector(rng, static_cast<Eigen::Index>(g.size())));
}

}  // namespace testing
