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

#include "akf/trace.hpp"

#include <cmath>
#include <string>

#include "akf/error.hpp"

namespace akf {

void Trace::push_back(double timestamp, const Vector& value) {
  if (!std::isfinite(timestamp)) throw ValidationError("trace timestamp is not finite");
  if (value.size() == 0) throw DimensionError("trace value is empty");
  if (!value.allFinite()) {
    throw ValidationError("trace value at index " + std::to_string(times_.size()) + " is not finite");
  }
  if (!times_.empty()) {
    if (timestamp <= times_.back()) {
      throw ValidationError("trace timestamps must be strictly increasing (index " + std::to_string(times_.size()) +
                            ")");
    }
    if (static_cast<std::size_t>(value.size()) != dim()) throw DimensionError("trace value length changed");
  }
  times_.push_back(timestamp);
  values_.push_back(value);
}

void Trace::push_back(double timestamp, double value) { push_back(timestamp, Vector::Constant(1, value)); }

void Trace::reserve(std::size_t n) {
  times_.reserve(n);
  values_.reserve(n);
}

std::size_t Trace::dim() const noexcept {
  return values_.empty() ? 0 : static_cast<std::size_t>(values_.front().size());
}

Vector Trace::column(std::size_t j) const {
  if (!empty() && j >= dim()) throw DimensionError("trace column out of range");
  Vector out(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) out(static_cast<Eigen::Index>(i)) = values_[i](static_cast<Eigen::Index>(j));
  return out;
}

Trace Trace::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw DimensionError("trace slice out of range");
  Trace out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    out.times_.push_back(times_[i]);
    out.values_.push_back(values_[i]);
  }
  return out;
}

Trace Trace::from_series(const Vector& values, double dt, double t0) {
  if (!(dt > 0.0)) throw ValueError("trace spacing must be positive");
  Trace out;
  out.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) out.push_back(t0 + dt * static_cast<double>(i), values(i));
  return out;
}

}  // namespace akf
