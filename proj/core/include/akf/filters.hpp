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

#ifndef AKF_FILTERS_HPP_
#define AKF_FILTERS_HPP_

#include <cstddef>
#include <string_view>
#include <vector>

#include "akf/numerics.hpp"

namespace akf {

/// Filter mean and covariance after `k` steps.
struct StateEstimate {
  Vector x;
  Matrix P;
  std::size_t k = 0;

  std::size_t dim() const { return static_cast<std::size_t>(x.size()); }
  /// Throws if P is not a square, finite, symmetric match for x.
  void validate() const;
};

/// x_k = A x_{k-1} + B v_{k-1} + w_k,  z_k = H x_k + u_k.
struct LinearModel {
  Matrix A;
  Matrix B;  ///< may be empty when no state-noise input is used
  Matrix H;
  Matrix Q;
  Matrix R;

  void validate(std::size_t state_dim) const;
};

/// x_k = f(x_{k-1}) + w_k,  z_k = h(x_k) + u_k.
///
/// Jacobians are taken by central differences unless the analytic ones are
/// supplied.
struct NonlinearModel {
  VectorFn f;
  VectorFn h;
  Matrix Q;
  Matrix R;
  JacobianFn f_jacobian;
  JacobianFn h_jacobian;

  Matrix transition_jacobian(const Vector& x) const;
  Matrix measurement_jacobian(const Vector& x) const;
  void validate(std::size_t state_dim) const;

  static NonlinearModel from_linear(const LinearModel& linear);
};

/// Scaled unscented transform parameters.
struct UkfConfig {
  double alpha = 0.5;
  double beta = 2.0;
  double kappa = 0.0;

  double lambda(std::size_t n) const;
  void validate(std::size_t n) const;
};

/// Deterministic sample set with its mean and covariance weights.
struct SigmaSet {
  std::vector<Vector> points;
  Vector mean_weights;
  Vector cov_weights;
};

/// Result of a measurement update.
struct Correction {
  StateEstimate posterior;
  Vector innovation;      ///< z - predicted measurement
  Matrix innovation_cov;  ///< S
};

/// Lower Cholesky factor of P. On failure P is jittered by 1e-9 I once; a
/// second failure throws NumericError naming `what`.
Matrix cholesky_lower(const Matrix& P, std::string_view what);

/// 2n+1 points x +/- columns of chol((n + lambda) P).
SigmaSet unscented_points(const Vector& x, const Matrix& P, const UkfConfig& cfg);

/// 2n equal-weight spherical-radial points x +/- columns of chol(n P).
SigmaSet cubature_points(const Vector& x, const Matrix& P);

/// Kalman update for a linearized measurement: predicted measurement `z_pred`
/// and observation matrix `H`.
Correction linearized_correct(const StateEstimate& prior, const Matrix& H, const Vector& z_pred,
                              const Matrix& R, const Vector& z);

/// Kalman update with the predicted measurement and cross covariance taken
/// from a sample set propagated through `h`.
Correction sample_correct(const StateEstimate& prior, const SigmaSet& set, const VectorFn& h,
                          const Matrix& R, const Vector& z);

/// Time update through `f` using a sample set drawn from `state`.
StateEstimate sample_predict(const StateEstimate& state, const SigmaSet& set, const VectorFn& f,
                             const Matrix& Q);

// Linear Kalman filter.
StateEstimate kf_predict(const StateEstimate& state, const LinearModel& model);
StateEstimate kf_predict(const StateEstimate& state, const LinearModel& model, const Vector& input);
Correction kf_correct(const StateEstimate& prior, const LinearModel& model, const Vector& z);
StateEstimate kf_step(const StateEstimate& state, const LinearModel& model, const Vector& z);

// Extended Kalman filter.
StateEstimate ekf_predict(const StateEstimate& state, const NonlinearModel& model);
Correction ekf_correct(const StateEstimate& prior, const NonlinearModel& model, const Vector& z);
StateEstimate ekf_step(const StateEstimate& state, const NonlinearModel& model, const Vector& z);

// Unscented Kalman filter.
StateEstimate ukf_predict(const StateEstimate& state, const NonlinearModel& model, const UkfConfig& cfg);
Correction ukf_correct(const StateEstimate& prior, const NonlinearModel& model, const UkfConfig& cfg,
                       const Vector& z);
StateEstimate ukf_step(const StateEstimate& state, const NonlinearModel& model, const UkfConfig& cfg,
                       const Vector& z);

// Cubature Kalman filter.
StateEstimate ckf_predict(const StateEstimate& state, const NonlinearModel& model);
Correction ckf_correct(const StateEstimate& prior, const NonlinearModel& model, const Vector& z);
StateEstimate ckf_step(const StateEstimate& state, const NonlinearModel& model, const Vector& z);

}  // namespace akf

#endif  // AKF_FILTERS_HPP_
