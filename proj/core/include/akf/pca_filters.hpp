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

#ifndef AKF_PCA_FILTERS_HPP_
#define AKF_PCA_FILTERS_HPP_

#include <cstddef>
#include <optional>
#include <string>

#include "akf/filters.hpp"
#include "akf/pca.hpp"

namespace akf {

/// Filter state plus the short history the PCA update rules need.
struct PcaFilterState {
  StateEstimate estimate;
  std::optional<Vector> previous_measurement;  ///< raw z of the last correction
  std::optional<Matrix> observation;           ///< last least-squares observation matrix
  Vector innovation;                           ///< component space
  std::size_t corrections = 0;

  static PcaFilterState start(StateEstimate estimate);
};

/// pca_project(h(x)).
VectorFn composed_measurement(const NonlinearModel& model, const PcaModel& pca);

/// Least-squares fusion: the observation matrix is re-solved each step from
/// the previous projected measurement and the previous posterior state.
PcaFilterState kfpca_step_ls(const PcaFilterState& state, const NonlinearModel& model, const PcaModel& pca,
                             const Vector& z);

/// Linearization fusion: Jacobian of pca_project(h(.)) at the previous
/// posterior (the current prior for the first two corrections).
PcaFilterState kfpca_step_lin(const PcaFilterState& state, const NonlinearModel& model, const PcaModel& pca,
                              const Vector& z);

/// Unscented propagation of the prior through pca_project(h(.)).
PcaFilterState ukfpca_step(const PcaFilterState& state, const NonlinearModel& model, const PcaModel& pca,
                           const UkfConfig& cfg, const Vector& z);

enum class Branch { kFilter, kPca };

struct JointOptions {
  bool unscented = false;  ///< UKF + UKF-PCA instead of EKF + EKF-PCA
  UkfConfig ukf;
};

struct JointEstimate {
  StateEstimate branch_filter;
  PcaFilterState branch_pca;
  Branch selected = Branch::kFilter;
  Vector eps_filter;
  Vector eps_pca;
  std::optional<std::string> failure;  ///< set when a branch failed this step

  const StateEstimate& estimate() const {
    return selected == Branch::kFilter ? branch_filter : branch_pca.estimate;
  }

  static JointEstimate start(const StateEstimate& estimate);
};

/// Advances both branches on the same raw measurement and selects the one
/// whose prior explains z better (ties go to the plain filter branch).
JointEstimate joint_step(const JointEstimate& state, const NonlinearModel& model, const PcaModel& pca,
                         const Vector& z, const JointOptions& options = {});

/// Same, but the PCA branch observes its own measurement vector through its
/// own model (e.g. a delay embedding of z). Both innovations are taken in the
/// filter branch's measurement space so they stay comparable.
JointEstimate joint_step(const JointEstimate& state, const NonlinearModel& filter_model, const Vector& z,
                         const NonlinearModel& pca_model, const PcaModel& pca, const Vector& pca_z,
                         const JointOptions& options = {});

}  // namespace akf

#endif  // AKF_PCA_FILTERS_HPP_
