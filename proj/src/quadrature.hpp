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

// Globally adaptive 31-point Gauss-Kronrod integration of complex-valued
// integrands, built on the Boost node and weight tables. Boost's own driver
// integrates one real function at a time with a purely relative stopping
// rule, which never terminates on an identically zero imaginary part.

#pragma once

#include <smoothlab/core_spaces.hpp>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <queue>
#include <sstream>
#include <type_traits>
#include <vector>

namespace smoothlab::detail {

inline double l1_norm(cplx v) { return std::abs(v); }
inline double l1_norm(const CVector& v) { return v.cwiseAbs().sum(); }

template <class V>
struct Panel {
  double a = 0.0, b = 0.0;
  V value;
  double l1 = 0.0;
  double error = 0.0;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
auto gk31_panel(F& f, double a, double b) {
  using V = std::decay_t<decltype(f(a))>;
  using K = boost::math::quadrature::gauss_kronrod<double, 31>;
  using G = boost::math::quadrature::gauss<double, 15>;
  const auto& x = K::abscissa();
  const auto& wk = K::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const V f0 = f(c);
  V kron = wk[0] * f0, gauss = wg[0] * f0;
  double l1 = wk[0] * l1_norm(f0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const V lo = f(c - h * x[i]), hi = f(c + h * x[i]);
    kron += wk[i] * (lo + hi);
    if (i % 2 == 0) gauss += wg[i / 2] * (lo + hi);
    l1 += wk[i] * (l1_norm(lo) + l1_norm(hi));
  }
  V value = h * kron;
  const double error = std::abs(h) * l1_norm(V(kron - gauss));
  return Panel<V>{a, b, std::move(value), std::abs(h) * l1, error};
}

/// int f over the union of [cuts[i], cuts[i+1]] to relative accuracy `tolerance`
/// measured against int |f| (entrywise 1-norm for vector integrands). Throws
/// NonConvergence past `max_panels`. f returns cplx or CVector.
template <class F>
auto integrate_complex(F&& f, const std::vector<double>& cuts, double tolerance, std::size_t max_panels = 4000) {
  using V = std::decay_t<decltype(f(0.0))>;
  std::priority_queue<Panel<V>> heap;
  V total{};
  bool first = true;
  double l1 = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    auto p = gk31_panel(f, cuts[i], cuts[i + 1]);
    if (first) {
      total = p.value;
      first = false;
    } else {
      total += p.value;
    }
    l1 += p.l1;
    error += p.error;
    heap.push(p);
  }
  while (!heap.empty() && error > tolerance * l1 && error > 1e-300) {
    if (heap.size() >= max_panels) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge: estimated error " << error << " against scale " << l1;
      fail(ErrorCode::NonConvergence, msg.str());
    }
    auto p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;  // panel at floating-point resolution
    auto left = gk31_panel(f, p.a, mid), right = gk31_panel(f, mid, p.b);
    total += left.value + right.value - p.value;
    l1 += left.l1 + right.l1 - p.l1;
    error += left.error + right.error - p.error;
    heap.push(left);
    heap.push(right);
  }
  return total;
}

template <class F>
auto integrate_complex(F&& f, double a, double b, double tolerance, std::size_t max_panels = 4000) {
  return integrate_complex(std::forward<F>(f), std::vector<double>{a, b}, tolerance, max_panels);
}

}  // namespace smoothlab::detail
