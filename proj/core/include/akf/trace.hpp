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

#ifndef AKF_TRACE_HPP_
#define AKF_TRACE_HPP_

#include <cstddef>
#include <vector>

#include "akf/numerics.hpp"

namespace akf {

/// Timestamped series of measurement vectors. Timestamps are seconds and
/// strictly increasing; every value is finite and of the same length.
class Trace {
 public:
  Trace() = default;

  void push_back(double timestamp, const Vector& value);
  void push_back(double timestamp, double value);
  void reserve(std::size_t n);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  std::size_t dim() const noexcept;

  double time(std::size_t i) const { return times_.at(i); }
  const Vector& value(std::size_t i) const { return values_.at(i); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<Vector>& values() const noexcept { return values_; }

  /// Component j of every value.
  Vector column(std::size_t j = 0) const;
  /// Points [begin, end).
  Trace slice(std::size_t begin, std::size_t end) const;

  /// Unit-spaced timestamps 0, 1, 2, ... for a scalar series.
  static Trace from_series(const Vector& values, double dt = 1.0, double t0 = 0.0);

 private:
  std::vector<double> times_;
  std::vector<Vector> values_;
};

}  // namespace akf

#endif  // AKF_TRACE_HPP_
