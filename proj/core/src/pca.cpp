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

#include "akf/pca.hpp"

#include <string>

#include "akf/error.hpp"

namespace akf {

MeasurementWindow::MeasurementWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ValueError("measurement window capacity must be >= 1");
}

std::size_t MeasurementWindow::dim() const noexcept {
  return entries_.empty() ? 0 : static_cast<std::size_t>(entries_.front().value.size());
}

void MeasurementWindow::push(double timestamp, const Vector& value) {
  if (value.size() == 0) throw DimensionError("window measurement is empty");
  if (!entries_.empty()) {
    if (static_cast<std::size_t>(value.size()) != dim()) {
      throw DimensionError("window measurement length " + std::to_string(value.size()) + " != " +
                           std::to_string(dim()));
    }
    if (timestamp < entries_.back().timestamp) {
      throw ValidationError("window timestamps must be non-decreasing");
    }
  }
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(WindowEntry{timestamp, value});
}

const WindowEntry& MeasurementWindow::latest() const {
  if (entries_.empty()) throw InsufficientDataError("measurement window is empty");
  return entries_.back();
}

Matrix MeasurementWindow::matrix() const {
  Matrix out(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(entries_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = entries_[i].value;
  return out;
}

PcaModel PcaModel::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  PcaModel m;
  m.components = Matrix::Identity(n, n);
  m.eigenvalues = Vector::Ones(n);
  m.mean = Vector::Zero(n);
  return m;
}

PcaModel pca_fit(const Matrix& samples, double threshold) {
  if (samples.cols() < 2) throw InsufficientDataError("pca_fit needs at least 2 samples");
  if (!(threshold >= 0.0)) throw ValueError("pca threshold must be >= 0");
  require_finite(samples, "pca samples");

  PcaModel m;
  m.threshold = threshold;
  m.mean = samples.rowwise().mean();
  const Matrix centered = samples.colwise() - m.mean;
  const Matrix C = centered * centered.transpose() / static_cast<double>(samples.cols());
  const SymmetricEigen eig = eig_sym(symmetrize(C));

  Eigen::Index keep = 0;
  while (keep < eig.values.size() && eig.values(keep) > threshold) ++keep;
  if (keep == 0) keep = 1;
  m.components = eig.vectors.leftCols(keep);
  m.eigenvalues = eig.values.head(keep);
  return m;
}

PcaModel pca_fit(const MeasurementWindow& window, double threshold) {
  return pca_fit(window.matrix(), threshold);
}

Vector pca_project(const PcaModel& model, const Vector& z) {
  if (z.size() != model.mean.size()) {
    throw DimensionError("pca_project: measurement length " + std::to_string(z.size()) + " != model dimension " +
                         std::to_string(model.mean.size()));
  }
  return model.components.transpose() * (z - model.mean);
}

Matrix pca_project_covariance(const PcaModel& model, const Matrix& R) {
  if (R.rows() != model.mean.size() || R.cols() != model.mean.size()) {
    throw DimensionError("pca_project_covariance: R does not match the model dimension");
  }
  return symmetrize(model.components.transpose() * R * model.components);
}

}  // namespace akf
