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

#include "time_transform.hpp"

#include "dft.hpp"

#include <smoothlab/spectral_density.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

namespace smoothlab::detail {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// e^{i x} after reducing x modulo 2 pi, for large phases.
cplx unit_phase(double x) { return std::polar(1.0, std::remainder(x, 2.0 * kPi)); }

}  // namespace

std::vector<double> gregory_weights(std::size_t n) {
  require(n >= 14, ErrorCode::InvalidArgument, "Gregory rule needs at least 14 nodes");
  static constexpr std::array<double, 6> gamma = {1.0 / 12.0,        1.0 / 24.0,       19.0 / 720.0,
                                                  3.0 / 160.0,       863.0 / 60480.0,  275.0 / 24192.0};
  std::vector<double> w(n, 1.0);
  w.front() = w.back() = 0.5;
  // -gamma_k (nabla^k f_{n-1} + (-1)^k Delta^k f_0)
  for (int k = 1; k <= 6; ++k) {
    const double g = gamma[static_cast<std::size_t>(k - 1)];
    for (int i = 0; i <= k; ++i) {
      const double c = binomial(k, i);
      const double sign_back = (i % 2 == 0) ? 1.0 : -1.0;          // nabla^k: (-1)^i C(k,i) f_{n-1-i}
      const double sign_front = ((k - i) % 2 == 0) ? 1.0 : -1.0;   // Delta^k: (-1)^{k-i} C(k,i) f_i
      const double parity = (k % 2 == 0) ? 1.0 : -1.0;
      w[n - 1 - static_cast<std::size_t>(i)] -= g * sign_back * c;
      w[static_cast<std::size_t>(i)] -= g * parity * sign_front * c;
    }
  }
  return w;
}

ChirpZ::ChirpZ(std::size_t n_in, std::size_t m_out, double eta0, double deta, double t0, double dt)
    : n_(n_in), m_(m_out) {
  require(n_in > 0 && m_out > 0, ErrorCode::InvalidArgument, "chirp-z needs nonempty grids");
  p_ = std::bit_ceil(n_in + m_out - 1);
  const double theta = dt * deta;
  // t_j eta_n = t_j eta0 + t0 n deta + theta (j^2 + n^2 - (j - n)^2) / 2
  pre_.resize(static_cast<Eigen::Index>(n_));
  for (std::size_t n = 0; n < n_; ++n) {
    const double nn = static_cast<double>(n);
    pre_[static_cast<Eigen::Index>(n)] = unit_phase(t0 * deta * nn) * unit_phase(0.5 * theta * nn * nn);
  }
  post_.resize(static_cast<Eigen::Index>(m_));
  for (std::size_t j = 0; j < m_; ++j) {
    const double jj = static_cast<double>(j);
    post_[static_cast<Eigen::Index>(j)] = unit_phase((t0 + jj * dt) * eta0) * unit_phase(0.5 * theta * jj * jj);
  }
  CVector chirp = CVector::Zero(static_cast<Eigen::Index>(p_));
  for (std::size_t k = 0; k < m_; ++k) {
    const double kk = static_cast<double>(k);
    chirp[static_cast<Eigen::Index>(k)] = unit_phase(-0.5 * theta * kk * kk);
  }
  for (std::size_t k = 1; k < n_; ++k) {
    const double kk = static_cast<double>(k);
    chirp[static_cast<Eigen::Index>(p_ - k)] = unit_phase(-0.5 * theta * kk * kk);
  }
  chirp_hat_ = dft(chirp, true) / static_cast<double>(p_);
}

CVector ChirpZ::apply(const CVector& c) const {
  require(static_cast<std::size_t>(c.size()) == n_, ErrorCode::InvalidArgument, "chirp-z input size mismatch");
  CVector a = CVector::Zero(static_cast<Eigen::Index>(p_));
  a.head(static_cast<Eigen::Index>(n_)) = c.cwiseProduct(pre_);
  CVector y = dft(dft(a, true).cwiseProduct(chirp_hat_), false);
  return y.head(static_cast<Eigen::Index>(m_)).cwiseProduct(post_);
}

TailBins::TailBins(double t_max) : t_max_(t_max), sum_(kBins, 0.0), count_(kBins, 0.0) {}

void TailBins::add(double t, double value) {
  const double a = std::abs(t);
  if (a < 0.1 * t_max_ || a > t_max_) return;
  int b = static_cast<int>(std::floor(kBins * std::log10(a / (0.1 * t_max_))));
  b = std::clamp(b, 0, kBins - 1);
  sum_[static_cast<std::size_t>(b)] += value;
  count_[static_cast<std::size_t>(b)] += 1.0;
}

void TailBins::merge(const TailBins& other) {
  for (int b = 0; b < kBins; ++b) {
    // Both sides sampled the same times; values add, counts do not.
    sum_[static_cast<std::size_t>(b)] += other.sum_[static_cast<std::size_t>(b)];
    count_[static_cast<std::size_t>(b)] = std::max(count_[static_cast<std::size_t>(b)], other.count_[static_cast<std::size_t>(b)]);
  }
}

TailFit TailBins::fit() const {
  // Counts include both signs of t, so the mean per sample is the two-sided
  // average; the profile of |F(t)|^2 + |F(-t)|^2 is twice that.
  std::vector<double> ts, vs;
  for (int b = 0; b < kBins; ++b) {
    const auto i = static_cast<std::size_t>(b);
    if (count_[i] == 0.0 || !(sum_[i] > 0.0)) continue;
    ts.push_back(0.1 * t_max_ * std::pow(10.0, (b + 0.5) / kBins));
    vs.push_back(2.0 * sum_[i] / count_[i]);
  }
  TailFit out;
  if (ts.size() < 4) return out;
  const PowerLawFit f = fit_power_law(ts, vs);
  out.exponent = -f.slope;
  if (out.exponent <= 1.0) return out;
  out.tail = f.constant * std::pow(t_max_, 1.0 - out.exponent) / (out.exponent - 1.0);
  out.ok = std::isfinite(out.tail);
  return out;
}

}  // namespace smoothlab::detail
