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

// Building blocks for time signals F(t) = int e^{it eta} g(eta) d(eta) on
// uniform eta and t grids.

#pragma once

#include <smoothlab/core_spaces.hpp>

#include <vector>

namespace smoothlab::detail {

/// Unit-spacing weights of the trapezoid rule with Gregory end corrections
/// through sixth differences. Needs at least 14 nodes.
std::vector<double> gregory_weights(std::size_t n);

/// F_j = sum_n c_n e^{i t_j eta_n} for t_j = t0 + j dt (j < m) and
/// eta_n = eta0 + n deta (n < n_in), by Bluestein's chirp-z convolution.
class ChirpZ {
 public:
  ChirpZ(std::size_t n_in, std::size_t m_out, double eta0, double deta, double t0, double dt);
  CVector apply(const CVector& c) const;
  std::size_t fft_size() const { return p_; }

 private:
  std::size_t n_, m_, p_;
  CVector pre_, post_, chirp_hat_;
};

/// Power-law tail of a sampled |F(t)|^2 profile beyond the last time node.
struct TailFit {
  double tail = 0.0;      // int_{|t| > T} of the fitted profile
  double exponent = 0.0;  // profile ~ t^{-p}
  bool ok = false;
};

/// Accumulates |F|^2 over log-spaced bins of |t| in [T/10, T] (both signs).
class TailBins {
 public:
  static constexpr int kBins = 16;
  explicit TailBins(double t_max);
  void add(double t, double value);
  /// Adds a signal sampled on the same times (e.g. another spatial node).
  void merge(const TailBins& other);
  TailFit fit() const;

 private:
  double t_max_;
  std::vector<double> sum_;
  std::vector<double> count_;
};

}  // namespace smoothlab::detail
