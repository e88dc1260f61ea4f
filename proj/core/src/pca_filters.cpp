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

#include "akf/pca_filters.hpp"

#include <algorithm>
#include <limits>

#include "akf/error.hpp"

namespace akf {
namespace {

PcaFilterState finish(const PcaFilterState& state, const Correction& corr, const Vector& z,
                      std::optional<Matrix> observation) {
  PcaFilterState out;
  out.estimate = corr.posterior;
  out.previous_measurement = z;
  out.observation = std::move(observation);
  out.innovation = corr.innovation;
  out.corrections = state.corrections + 1;
  return out;
}

}  // namespace

PcaFilterState PcaFilterState::start(StateEstimate estimate) {
  PcaFilterState s;
  s.estimate = std::move(estimate);
  return s;
}

VectorFn composed_measurement(const NonlinearModel& model, const PcaModel& pca) {
  return [h = model.h, pca](const Vector& x) -> Vector { return pca_project(pca, h(x)); };
}

PcaFilterState kfpca_step_ls(const PcaFilterState& state, const NonlinearModel& model, const PcaModel& pca,
                             const Vector& z) {
  const StateEstimate prior = ekf_predict(state.estimate, model);
  const Vector zp = pca_project(pca, z);
  const Matrix Rp = pca_project_covariance(pca, model.R);

  const Vector& x_prev = state.estimate.x;
  const Vector zp_prev = pca_project(pca, state.previous_measurement.value_or(z));
  Matrix h;
  try {
    // A near-zero state makes the fitted gain explode; treat it as singular.
    if (x_prev.norm() < 1e-6 * std::max(1.0, zp_prev.norm())) throw NumericError("ls design near zero");
    h = least_squares(x_prev, zp_prev);
  } catch (const NumericError&) {
    if (state.observation && state.observation->rows() == zp.size() && state.observation->cols() == prior.x.size()) {
      h = *state.observation;
    } else {
      h = jacobian_fd(composed_measurement(model, pca), prior.x);
    }
  }
  const Correction corr = linearized_correct(prior, h, h * prior.x, Rp, zp);
  return finish(state, corr, z, h);
}

PcaFilterState kfpca_step_lin(const PcaFilterState& state, const NonlinearModel& model, const PcaModel& pca,
                              const Vector& z) {
  const StateEstimate prior = ekf_predict(state.estimate, model);
  const Vector zp = pca_project(pca, z);
  const Matrix Rp = pca_project_covariance(pca, model.R);

  const VectorFn g = composed_measurement(model, pca);
  const Vector x_lin = state.corrections < 2 ? prior.x : state.estimate.x;
  const Matrix H = jacobian_fd(g, x_lin);
  // First-order expansion of g about x_lin, evaluated at the prior.
  const Vector z_pred = g(x_lin) + H * (prior.x - x_lin);
  const Correction corr = linearized_correct(prior, H, z_pred, Rp, zp);
  return finish(state, corr, z, std::nullopt);
}

PcaFilterState ukfpca_step(const PcaFilterState& state, const NonlinearModel& model, const PcaModel& pca,
                           const UkfConfig& cfg, const Vector& z) {
  const StateEstimate prior = ukf_predict(state.estimate, model, cfg);
  const Vector zp = pca_project(pca, z);
  const Matrix Rp = pca_project_covariance(pca, model.R);
  const Correction corr =
      sample_correct(prior, unscented_points(prior.x, prior.P, cfg), composed_measurement(model, pca), Rp, zp);
  return finish(state, corr, z, std::nullopt);
}

JointEstimate JointEstimate::start(const StateEstimate& estimate) {
  JointEstimate j;
  j.branch_filter = estimate;
  j.branch_pca = PcaFilterState::start(estimate);
  return j;
}

JointEstimate joint_step(const JointEstimate& state, const NonlinearModel& model, const PcaModel& pca,
                         const Vector& z, const JointOptions& options) {
  return joint_step(state, model, z, model, pca, z, options);
}

JointEstimate joint_step(const JointEstimate& state, const NonlinearModel& model, const Vector& z,
                         const NonlinearModel& pca_model, const PcaModel& pca, const Vector& pca_z,
                         const JointOptions& options) {
  JointEstimate out;
  const auto failed = Vector::Constant(z.size(), std::numeric_limits<double>::infinity());
  std::string failure;

  bool filter_ok = true;
  try {
    StateEstimate prior;
    if (options.unscented) {
      prior = ukf_predict(state.branch_filter, model, options.ukf);
      out.eps_filter = z - model.h(prior.x);
      out.branch_filter = ukf_correct(prior, model, options.ukf, z).posterior;
    } else {
      prior = ekf_predict(state.branch_filter, model);
      out.eps_filter = z - model.h(prior.x);
      out.branch_filter = ekf_correct(prior, model, z).posterior;
    }
  } catch (const NumericError& e) {
    filter_ok = false;
    failure = std::string("filter branch: ") + e.what();
    out.eps_filter = failed;
  }

  bool pca_ok = true;
  try {
    const StateEstimate prior = options.unscented ? ukf_predict(state.branch_pca.estimate, pca_model, options.ukf)
                                                  : ekf_predict(state.branch_pca.estimate, pca_model);
    out.eps_pca = z - model.h(prior.x);
    out.branch_pca = options.unscented ? ukfpca_step(state.branch_pca, pca_model, pca, options.ukf, pca_z)
                                       : kfpca_step_lin(state.branch_pca, pca_model, pca, pca_z);
  } catch (const NumericError& e) {
    pca_ok = false;
    failure += (failure.empty() ? "" : "; ") + std::string("pca branch: ") + e.what();
    out.eps_pca = failed;
  }

  if (!filter_ok && !pca_ok) throw NumericError("joint estimator: both branches failed (" + failure + ")");
  if (!filter_ok) {
    out.branch_filter = out.branch_pca.estimate;
  } else if (!pca_ok) {
    out.branch_pca = PcaFilterState::start(out.branch_filter);
    out.branch_pca.previous_measurement = pca_z;
    out.branch_pca.corrections = state.branch_pca.corrections + 1;
  }
  if (!failure.empty()) out.failure = failure;

  out.selected = out.eps_filter.norm() <= out.eps_pca.norm() ? Branch::kFilter : Branch::kPca;
  return out;
}

}  // namespace akf
