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

#include <smoothlab/error.hpp>

namespace smoothlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::NotNonnegativeForm: return "not a nonnegative form";
    case ErrorCode::NonConvergence: return "no convergence";
    case ErrorCode::Singular: return "singular system";
    case ErrorCode::OutOfDomain: return "outside the admissible domain";
    case ErrorCode::Truncation: return "truncation error too large";
    case ErrorCode::Configuration: return "configuration error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Inconsistency: return "internal inconsistency";
  }
  return "unknown error";
}

}  // namespace smoothlab
