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

// Arithmetic expressions in lambda for sigma and a.
//
// Grammar: numbers, lambda (also written λ or l), pi, + - * / ^ (× and ÷
// accepted), and exp, log, abs, sqrt. Power is right associative and binds
// tighter than unary minus, so -lambda^2 = -(lambda^2).

#pragma once

#include <smoothlab/models.hpp>

#include <memory>
#include <string>
#include <vector>

namespace smoothlab {

class Expression {
 public:
  struct Node;

  /// Throws Configuration with the column of the first offending character.
  /// `variable` other than "lambda" renames the free variable (e.g. "x" for potentials).
  static Expression parse(const std::string& text, const std::string& variable = "lambda");
  static Expression constant(double c);

  double operator()(double lambda) const;
  /// Symbolic d/dlambda.
  Expression derivative() const;
  /// Points of the window where the expression or its derivative may fail to
  /// be smooth: zeros of the arguments of abs, sqrt, log, fractional or
  /// negative powers, and of denominators.
  std::vector<double> singular_points(Interval window) const;
  std::string to_string() const;
  const std::string& source() const { return source_; }

 private:
  explicit Expression(std::shared_ptr<const Node> root, std::string source = {});
  std::shared_ptr<const Node> root_;
  std::string source_;
};

/// (sigma, a) from expressions; a' by symbolic differentiation and the
/// breakpoints from singular_points of both.
SpectralFunction spectral_function_from_expressions(const std::string& sigma, const std::string& a, Interval window,
                                                    double breakpoint_margin = 1e-6);

}  // namespace smoothlab
