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

// Internal access to the cached FFTW transforms used by the grid Fourier transform.

#pragma once

#include <smoothlab/core_spaces.hpp>

namespace smoothlab::detail {

/// Unnormalized DFT: forward uses e^{-2 pi i jk/n}, backward e^{+2 pi i jk/n}.
CVector dft(const CVector& in, bool forward);

}  // namespace smoothlab::detail
