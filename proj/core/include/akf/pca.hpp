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

#ifndef AKF_PCA_HPP_
#define AKF_PCA_HPP_

#include <cstddef>
#include <deque>

#include "akf/numerics.hpp"

namespace akf {

struct WindowEntry {
  double timestamp = 0.0;
  Vector value;
};

/// Fixed-capacity sliding window of timestamped measurements, oldest first.
class MeasurementWindow {
 public:
  explicit MeasurementWindow(std::size_t capacity);

  /// Appends a measurement, evicting the oldest entry when full. Timestamps
  /// must be non-decreasing and every value must have the same length.
  void push(double timestamp, const Vector& value);
  void clear() { entries_.clear(); }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool full() const noexcept { return entries_.size() == capacity_; }
  /// Measurement length, 0 while empty.
  std::size_t dim() const noexcept;

  const WindowEntry& operator[](std::size_t i) const { return entries_[i]; }
  const WindowEntry& latest() const;
  const std::deque<WindowEntry>& entries() const noexcept { return entries_; }

  /// Measurements as columns (d x size), oldest first.
  Matrix matrix() const;

 private:
  std::size_t capacity_;
  std::deque<WindowEntry> entries_;
};

struct PcaModel {
  double threshold = 0.0;
  Matrix components;  ///< d x c, orthonormal columns, descending eigenvalue
  Vector eigenvalues; ///< length c
  Vector mean;        ///< length d

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(components.cols()); }

  /// Pass-through model used before the first fit: zero mean, all axes kept.
  static PcaModel identity(std::size_t d);
};

/// Fits on samples stored as columns. Components with eigenvalue > threshold
/// are kept; when none qualify the largest one is kept anyway.
PcaModel pca_fit(const Matrix& samples, double threshold);
PcaModel pca_fit(const MeasurementWindow& window, double threshold);

Vector pca_project(const PcaModel& model, const Vector& z);

/// V^T R V for the retained components.
Matrix pca_project_covariance(const PcaModel& model, const Matrix& R);

}  // namespace akf

#endif  // AKF_PCA_HPP_
