// Copyright 2026 The akf Authors
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

#ifndef AKF_BASELINES_HPP_
#define AKF_BASELINES_HPP_

#include <cstddef>

#include "akf/numerics.hpp"

namespace akf {

struct SavgolSpec {
  std::size_t window = 5;  ///< odd
  std::size_t degree = 2;  ///< < window

  void validate() const;
};

/// Centered smoothing kernel (length = window).
Vector savgol_kernel(const SavgolSpec& spec);

/// Weights over the last `window` samples (oldest first) that evaluate the
/// least-squares polynomial at the newest sample.
Vector savgol_causal_kernel(const SavgolSpec& spec);

/// Smooths a series with the centered kernel. Edges are padded by point
/// reflection about the end samples (2 x_0 - x_j), which keeps the length
/// and reproduces straight lines exactly.
Vector savgol_filter(const SavgolSpec& spec, const Vector& series);

/// The raw measurement as its own estimate.
inline Vector passive_step(const Vector& z) { return z; }

}  // namespace akf

#endif  // AKF_BASELINES_HPP_
