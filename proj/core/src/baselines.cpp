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

#include "akf/baselines.hpp"

#include <string>

#include "akf/error.hpp"

namespace akf {
namespace {

// Row of the least-squares polynomial smoother that evaluates the fit at `at`.
Vector poly_fit_weights(const Vector& positions, std::size_t degree, double at) {
  const auto cols = static_cast<Eigen::Index>(degree + 1);
  Matrix J(positions.size(), cols);
  for (Eigen::Index i = 0; i < positions.size(); ++i) {
    double p = 1.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      J(i, j) = p;
      p *= positions(i);
    }
  }
  Vector basis(cols);
  double p = 1.0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    basis(j) = p;
    p *= at;
  }
  // w^T = basis^T (J^T J)^-1 J^T
  const Matrix gram = J.transpose() * J;
  return J * gram.ldlt().solve(basis);
}

}  // namespace

void SavgolSpec::validate() const {
  if (window < 1 || window % 2 == 0) throw ValueError("savgol window must be odd, got " + std::to_string(window));
  if (degree >= window) throw ValueError("savgol degree must be below the window length");
}

Vector savgol_kernel(const SavgolSpec& spec) {
  spec.validate();
  const auto half = static_cast<double>(spec.window / 2);
  return poly_fit_weights(Vector::LinSpaced(static_cast<Eigen::Index>(spec.window), -half, half), spec.degree, 0.0);
}

Vector savgol_causal_kernel(const SavgolSpec& spec) {
  spec.validate();
  const auto span = static_cast<double>(spec.window - 1);
  return poly_fit_weights(Vector::LinSpaced(static_cast<Eigen::Index>(spec.window), -span, 0.0), spec.degree, 0.0);
}

Vector savgol_filter(const SavgolSpec& spec, const Vector& series) {
  spec.validate();
  const auto n = series.size();
  const auto d = static_cast<Eigen::Index>(spec.window);
  if (n < d) {
    throw InsufficientDataError("savgol needs at least " + std::to_string(d) + " samples, got " + std::to_string(n));
  }
  const Vector kernel = savgol_kernel(spec);
  const Eigen::Index half = d / 2;
  Vector padded(n + 2 * half);
  padded.segment(half, n) = series;
  for (Eigen::Index j = 1; j <= half; ++j) {
    padded(half - j) = 2.0 * series(0) - series(j);
    padded(half + n - 1 + j) = 2.0 * series(n - 1) - series(n - 1 - j);
  }
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = kernel.dot(padded.segment(i, d));
  return out;
}

}  // namespace akf
