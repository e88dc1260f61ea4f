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

#include "akf/filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "akf/error.hpp"

namespace akf {
namespace {

std::string dims(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, std::string_view what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(what) + " must be " + std::to_string(rows) + "x" + std::to_string(cols) +
                         ", got " + dims(m));
  }
}

StateEstimate advanced(Vector x, const Matrix& P, std::size_t k) {
  return StateEstimate{std::move(x), symmetrize(P), k};
}

}  // namespace

void StateEstimate::validate() const {
  if (x.size() == 0) throw DimensionError("state vector is empty");
  require_shape(P, x.size(), x.size(), "state covariance P");
  require_finite(x, "state vector");
  require_finite(P, "state covariance P");
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ValueError("state covariance P is not symmetric");
  }
}

void LinearModel::validate(std::size_t state_dim) const {
  const auto n = static_cast<Eigen::Index>(state_dim);
  require_shape(A, n, n, "transition matrix A");
  if (H.cols() != n || H.rows() == 0) throw DimensionError("observation matrix H must have " + std::to_string(n) + " columns");
  require_shape(Q, n, n, "process noise Q");
  require_shape(R, H.rows(), H.rows(), "measurement noise R");
  if (B.size() != 0 && B.rows() != n) throw DimensionError("state-noise input B must have " + std::to_string(n) + " rows");
  require_finite(A, "A");
  require_finite(H, "H");
  require_finite(Q, "Q");
  require_finite(R, "R");
}

Matrix NonlinearModel::transition_jacobian(const Vector& x) const {
  return f_jacobian ? f_jacobian(x) : jacobian_fd(f, x);
}

Matrix NonlinearModel::measurement_jacobian(const Vector& x) const {
  return h_jacobian ? h_jacobian(x) : jacobian_fd(h, x);
}

void NonlinearModel::validate(std::size_t state_dim) const {
  if (!f || !h) throw ValueError("nonlinear model requires both f and h");
  const auto n = static_cast<Eigen::Index>(state_dim);
  require_shape(Q, n, n, "process noise Q");
  require_square(R, "measurement noise R");
  require_finite(Q, "Q");
  require_finite(R, "R");
}

NonlinearModel NonlinearModel::from_linear(const LinearModel& linear) {
  NonlinearModel m;
  m.f = [A = linear.A](const Vector& x) -> Vector { return A * x; };
  m.h = [H = linear.H](const Vector& x) -> Vector { return H * x; };
  m.f_jacobian = [A = linear.A](const Vector&) -> Matrix { return A; };
  m.h_jacobian = [H = linear.H](const Vector&) -> Matrix { return H; };
  m.Q = linear.Q;
  m.R = linear.R;
  return m;
}

double UkfConfig::lambda(std::size_t n) const {
  const double dn = static_cast<double>(n);
  return alpha * alpha * (kappa + dn) - dn;
}

void UkfConfig::validate(std::size_t n) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValueError("UKF alpha must lie in (0, 1]");
  if (n == 0) throw DimensionError("UKF state dimension must be >= 1");
  const double lam = lambda(n);
  if (!std::isfinite(lam) || !std::isfinite(beta)) throw ValueError("UKF lambda/beta must be finite");
  if (!(static_cast<double>(n) + lam > 0.0)) throw ValueError("UKF requires n + lambda > 0");
}

Matrix cholesky_lower(const Matrix& P, std::string_view what) {
  Eigen::LLT<Matrix> llt(P);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::LLT<Matrix> jittered(P + 1e-9 * Matrix::Identity(P.rows(), P.cols()));
  if (jittered.info() == Eigen::Success) return jittered.matrixL();
  throw NumericError("Cholesky factorization of " + std::string(what) + " failed (not positive definite)");
}

SigmaSet unscented_points(const Vector& x, const Matrix& P, const UkfConfig& cfg) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  cfg.validate(n);
  const double lam = cfg.lambda(n);
  const double spread = static_cast<double>(n) + lam;
  const Matrix L = cholesky_lower(spread * P, "(n + lambda) P");

  SigmaSet set;
  set.points.reserve(2 * n + 1);
  set.points.push_back(x);
  for (std::size_t i = 0; i < n; ++i) set.points.push_back(x + L.col(static_cast<Eigen::Index>(i)));
  for (std::size_t i = 0; i < n; ++i) set.points.push_back(x - L.col(static_cast<Eigen::Index>(i)));

  const auto count = static_cast<Eigen::Index>(2 * n + 1);
  set.mean_weights = Vector::Constant(count, 1.0 / (2.0 * spread));
  set.cov_weights = set.mean_weights;
  set.mean_weights(0) = lam / spread;
  set.cov_weights(0) = lam / spread + 1.0 - cfg.alpha * cfg.alpha + cfg.beta;
  return set;
}

SigmaSet cubature_points(const Vector& x, const Matrix& P) {
  const auto n = x.size();
  if (n == 0) throw DimensionError("cubature points need a non-empty state");
  const Matrix L = cholesky_lower(static_cast<double>(n) * P, "n P");
  SigmaSet set;
  set.points.reserve(static_cast<std::size_t>(2 * n));
  for (Eigen::Index i = 0; i < n; ++i) set.points.push_back(x + L.col(i));
  for (Eigen::Index i = 0; i < n; ++i) set.points.push_back(x - L.col(i));
  set.mean_weights = Vector::Constant(2 * n, 1.0 / (2.0 * static_cast<double>(n)));
  set.cov_weights = set.mean_weights;
  return set;
}

Correction linearized_correct(const StateEstimate& prior, const Matrix& H, const Vector& z_pred,
                              const Matrix& R, const Vector& z) {
  const auto n = prior.x.size();
  const auto m = z.size();
  require_shape(H, m, n, "observation matrix H");
  require_shape(R, m, m, "measurement noise R");
  if (z_pred.size() != m) throw DimensionError("predicted measurement has the wrong length");
  require_finite(z, "measurement z");

  const Matrix S = symmetrize(H * prior.P * H.transpose() + R);
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite()) {
    throw NumericError("innovation covariance S = H P- H^T + R is not positive definite");
  }
  const Matrix K = llt.solve(H * prior.P).transpose();
  Correction out;
  out.innovation = z - z_pred;
  out.innovation_cov = S;
  const Matrix I = Matrix::Identity(n, n);
  out.posterior = advanced(prior.x + K * out.innovation, (I - K * H) * prior.P, prior.k);
  return out;
}

StateEstimate sample_predict(const StateEstimate& state, const SigmaSet& set, const VectorFn& f,
                             const Matrix& Q) {
  std::vector<Vector> moved;
  moved.reserve(set.points.size());
  for (const auto& p : set.points) moved.push_back(f(p));
  Vector mean = Vector::Zero(moved.front().size());
  for (std::size_t i = 0; i < moved.size(); ++i) mean += set.mean_weights(static_cast<Eigen::Index>(i)) * moved[i];
  Matrix P = Q;
  require_shape(P, mean.size(), mean.size(), "process noise Q");
  for (std::size_t i = 0; i < moved.size(); ++i) {
    const Vector d = moved[i] - mean;
    P += set.cov_weights(static_cast<Eigen::Index>(i)) * d * d.transpose();
  }
  return advanced(std::move(mean), P, state.k + 1);
}

Correction sample_correct(const StateEstimate& prior, const SigmaSet& set, const VectorFn& h,
                          const Matrix& R, const Vector& z) {
  std::vector<Vector> zs;
  zs.reserve(set.points.size());
  for (const auto& p : set.points) zs.push_back(h(p));
  const auto m = zs.front().size();
  if (z.size() != m) throw DimensionError("measurement z has the wrong length");
  require_shape(R, m, m, "measurement noise R");
  require_finite(z, "measurement z");

  Vector z_pred = Vector::Zero(m);
  for (std::size_t i = 0; i < zs.size(); ++i) z_pred += set.mean_weights(static_cast<Eigen::Index>(i)) * zs[i];
  Matrix S = R;
  Matrix cross = Matrix::Zero(prior.x.size(), m);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double w = set.cov_weights(static_cast<Eigen::Index>(i));
    const Vector dz = zs[i] - z_pred;
    S += w * dz * dz.transpose();
    cross += w * (set.points[i] - prior.x) * dz.transpose();
  }
  S = symmetrize(S);
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite()) {
    throw NumericError("innovation covariance S (sample transform) is not positive definite");
  }
  const Matrix K = llt.solve(cross.transpose()).transpose();
  Correction out;
  out.innovation = z - z_pred;
  out.innovation_cov = S;
  out.posterior = advanced(prior.x + K * out.innovation, prior.P - K * S * K.transpose(), prior.k);
  return out;
}

StateEstimate kf_predict(const StateEstimate& state, const LinearModel& model) {
  state.validate();
  model.validate(state.dim());
  return advanced(model.A * state.x, model.A * state.P * model.A.transpose() + model.Q, state.k + 1);
}

StateEstimate kf_predict(const StateEstimate& state, const LinearModel& model, const Vector& input) {
  StateEstimate prior = kf_predict(state, model);
  if (model.B.size() == 0 || model.B.cols() != input.size()) {
    throw DimensionError("state-noise input v does not match B");
  }
  prior.x += model.B * input;
  return prior;
}

Correction kf_correct(const StateEstimate& prior, const LinearModel& model, const Vector& z) {
  return linearized_correct(prior, model.H, model.H * prior.x, model.R, z);
}

StateEstimate kf_step(const StateEstimate& state, const LinearModel& model, const Vector& z) {
  return kf_correct(kf_predict(state, model), model, z).posterior;
}

StateEstimate ekf_predict(const StateEstimate& state, const NonlinearModel& model) {
  state.validate();
  model.validate(state.dim());
  const Matrix F = model.transition_jacobian(state.x);
  require_shape(F, state.x.size(), state.x.size(), "transition Jacobian");
  Vector x = model.f(state.x);
  require_finite(x, "f(x)");
  return advanced(std::move(x), F * state.P * F.transpose() + model.Q, state.k + 1);
}

Correction ekf_correct(const StateEstimate& prior, const NonlinearModel& model, const Vector& z) {
  const Vector z_pred = model.h(prior.x);
  return linearized_correct(prior, model.measurement_jacobian(prior.x), z_pred, model.R, z);
}

StateEstimate ekf_step(const StateEstimate& state, const NonlinearModel& model, const Vector& z) {
  return ekf_correct(ekf_predict(state, model), model, z).posterior;
}

StateEstimate ukf_predict(const StateEstimate& state, const NonlinearModel& model, const UkfConfig& cfg) {
  state.validate();
  model.validate(state.dim());
  return sample_predict(state, unscented_points(state.x, state.P, cfg), model.f, model.Q);
}

Correction ukf_correct(const StateEstimate& prior, const NonlinearModel& model, const UkfConfig& cfg,
                       const Vector& z) {
  return sample_correct(prior, unscented_points(prior.x, prior.P, cfg), model.h, model.R, z);
}

StateEstimate ukf_step(const StateEstimate& state, const NonlinearModel& model, const UkfConfig& cfg,
                       const Vector& z) {
  return ukf_correct(ukf_predict(state, model, cfg), model, cfg, z).posterior;
}

StateEstimate ckf_predict(const StateEstimate& state, const NonlinearModel& model) {
  state.validate();
  model.validate(state.dim());
  return sample_predict(state, cubature_points(state.x, state.P), model.f, model.Q);
}

Correction ckf_correct(const StateEstimate& prior, const NonlinearModel& model, const Vector& z) {
  return sample_correct(prior, cubature_points(prior.x, prior.P), model.h, model.R, z);
}

StateEstimate ckf_step(const StateEstimate& state, const NonlinearModel& model, const Vector& z) {
  return ckf_correct(ckf_predict(state, model), model, z).posterior;
}

}  // namespace akf
