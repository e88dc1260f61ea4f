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


#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "akf/error.hpp"
#include "akf/filters.hpp"
#include "akf/rng.hpp"
#include "generators.hpp"

namespace akf {
namespace {

using testing::BatchGaussianOracle;
using testing::covariance_health;
using testing::random_linear_model;
using testing::random_nonlinear_model;
using testing::random_state;
using testing::random_vector;
using testing::simulate_measurements;

LinearModel scalar_model(double a, double h, double q, double r) {
  LinearModel m;
  m.A = Matrix::Constant(1, 1, a);
  m.H = Matrix::Constant(1, 1, h);
  m.Q = Matrix::Constant(1, 1, q);
  m.R = Matrix::Constant(1, 1, r);
  return m;
}

StateEstimate scalar_state(double x, double p) {
  return StateEstimate{Vector::Constant(1, x), Matrix::Constant(1, 1, p), 0};
}

TEST(Kf, ScalarGainIsHalf) {
  const LinearModel m = scalar_model(1.0, 1.0, 0.0, 1.0);
  const Correction c = kf_correct(scalar_state(2.0, 1.0), m, Vector::Constant(1, 4.0));
  EXPECT_NEAR(c.posterior.x(0), 3.0, 1e-15);
  EXPECT_NEAR(c.posterior.P(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(c.innovation(0), 2.0, 1e-15);
  EXPECT_NEAR(c.innovation_cov(0, 0), 2.0, 1e-15);
}

TEST(Kf, TinyMeasurementNoiseTrustsMeasurement) {
  LinearModel m;
  m.A = Matrix::Identity(2, 2);
  m.H = Matrix::Identity(2, 2);
  m.Q = Matrix::Identity(2, 2) * 0.1;
  m.R = Matrix::Identity(2, 2) * 1e-12;
  Vector z(2);
  z << 3.0, -1.0;
  const StateEstimate s = kf_step(StateEstimate{Vector::Zero(2), Matrix::Identity(2, 2), 0}, m, z);
  EXPECT_LE((s.x - z).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(s.k, 1u);
}

TEST(Kf, MatchesBatchGaussianOracle) {
  Rng rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + trial % 3;
    const LinearModel model = random_linear_model(rng, n, 1 + trial % 2);
    const StateEstimate start = random_state(rng, n);
    const std::size_t steps = 20;
    const auto zs = simulate_measurements(model, start, steps, rng);
    const BatchGaussianOracle oracle(model, start, steps);
    StateEstimate s = start;
    for (std::size_t k = 1; k <= steps; ++k) {
      s = kf_step(s, model, zs[k - 1]);
      const StateEstimate ref = oracle.filter(zs, k);
      EXPECT_LE((s.x - ref.x).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LE((s.P - ref.P).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(Kf, NonPositiveDefiniteInnovationNamesMatrix) {
  LinearModel m = scalar_model(1.0, 1.0, 0.0, -2.0);
  try {
    kf_correct(scalar_state(0.0, 1.0), m, Vector::Zero(1));
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("S = H P- H^T + R"), std::string::npos);
  }
}

TEST(Kf, DimensionMismatchThrows) {
  const LinearModel m = scalar_model(1.0, 1.0, 0.1, 1.0);
  EXPECT_THROW(kf_step(scalar_state(0.0, 1.0), m, Vector::Zero(2)), DimensionError);
  EXPECT_THROW(kf_step(StateEstimate{Vector::Zero(2), Matrix::Identity(2, 2), 0}, m, Vector::Zero(1)),
               DimensionError);
}

TEST(Kf, PredictOnlyIncrementsStep) {
  const LinearModel m = scalar_model(0.5, 1.0, 0.1, 1.0);
  const StateEstimate p = kf_predict(scalar_state(2.0, 1.0), m);
  EXPECT_NEAR(p.x(0), 1.0, 1e-15);
  EXPECT_NEAR(p.P(0, 0), 0.35, 1e-15);
  EXPECT_EQ(p.k, 1u);
}

TEST(Kf, ControlInputUsesB) {
  LinearModel m = scalar_model(1.0, 1.0, 0.0, 1.0);
  m.B = Matrix::Constant(1, 1, 2.0);
  const StateEstimate p = kf_predict(scalar_state(1.0, 1.0), m, Vector::Constant(1, 0.5));
  EXPECT_NEAR(p.x(0), 2.0, 1e-15);
}

TEST(Ekf, ScalarSquareLinearization) {
  NonlinearModel m;
  m.f = [](const Vector& x) { return x; };
  m.h = [](const Vector& x) { return Vector::Constant(1, x(0) * x(0)); };
  m.Q = Matrix::Zero(1, 1);
  m.R = Matrix::Constant(1, 1, 1.0);
  const StateEstimate prior = scalar_state(2.0, 0.5);
  EXPECT_NEAR(m.measurement_jacobian(prior.x)(0, 0), 4.0, 1e-5);
  const Correction c = ekf_correct(prior, m, Vector::Constant(1, 5.0));
  EXPECT_NEAR(c.innovation(0), 1.0, 1e-12);
  // K = 0.5 * 4 / (16 * 0.5 + 1)
  EXPECT_NEAR(c.posterior.x(0), 2.0 + 2.0 / 9.0, 1e-6);
}

TEST(Ekf, ConstantStateCovarianceNonIncreasing) {
  NonlinearModel m = NonlinearModel::from_linear(scalar_model(1.0, 1.0, 0.0, 0.5));
  Rng rng(4);
  StateEstimate s = scalar_state(0.0, 10.0);
  double last = s.P.trace();
  // Scalar Riccati oracle: 1/P_k = 1/P_0 + k/R.
  for (int k = 1; k <= 100; ++k) {
    s = ekf_step(s, m, Vector::Constant(1, 3.0 + rng.normal(0.0, 0.7)));
    EXPECT_LE(s.P.trace(), last + 1e-15);
    last = s.P.trace();
    EXPECT_NEAR(s.P(0, 0), 1.0 / (1.0 / 10.0 + k / 0.5), 1e-12);
  }
}

TEST(Ukf, ScalarSigmaPoints) {
  UkfConfig cfg{1.0, 2.0, 2.0};
  EXPECT_DOUBLE_EQ(cfg.lambda(1), 2.0);
  const SigmaSet set = unscented_points(Vector::Constant(1, 1.0), Matrix::Constant(1, 1, 1.0), cfg);
  ASSERT_EQ(set.points.size(), 3u);
  EXPECT_NEAR(set.points[0](0), 1.0, 1e-15);
  EXPECT_NEAR(set.points[1](0), 1.0 + std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(set.points[2](0), 1.0 - std::sqrt(3.0), 1e-12);
}

TEST(Ukf, WeightsFollowScaledTransform) {
  Rng rng(6);
  for (std::size_t n = 1; n <= 6; ++n) {
    const UkfConfig cfg;
    const auto nn = static_cast<Eigen::Index>(n);
    const SigmaSet set = unscented_points(random_vector(rng, nn), testing::random_spd(rng, nn), cfg);
    const double lambda = cfg.alpha * cfg.alpha * (cfg.kappa + n) - n;
    EXPECT_EQ(set.points.size(), 2 * n + 1);
    EXPECT_NEAR(set.mean_weights.sum(), 1.0, 1e-12);
    EXPECT_NEAR(set.mean_weights(0), lambda / (n + lambda), 1e-12);
    EXPECT_NEAR(set.cov_weights(0), lambda / (n + lambda) + 1.0 - cfg.alpha * cfg.alpha + cfg.beta, 1e-12);
    for (Eigen::Index i = 1; i < set.mean_weights.size(); ++i) {
      EXPECT_NEAR(set.mean_weights(i), 1.0 / (2.0 * (n + lambda)), 1e-12);
    }
  }
}

TEST(Ukf, InvalidConfigThrows) {
  EXPECT_THROW(UkfConfig({0.0, 2.0, 0.0}).validate(2), ValueError);
  EXPECT_THROW(UkfConfig({1.5, 2.0, 0.0}).validate(2), ValueError);
}

TEST(Ckf, ScalarPointsAndWeights) {
  const SigmaSet set = cubature_points(Vector::Constant(1, 2.0), Matrix::Constant(1, 1, 4.0));
  ASSERT_EQ(set.points.size(), 2u);
  EXPECT_NEAR(set.points[0](0), 4.0, 1e-12);
  EXPECT_NEAR(set.points[1](0), 0.0, 1e-12);

  Rng rng(7);
  const SigmaSet big = cubature_points(random_vector(rng, 4), testing::random_spd(rng, 4));
  ASSERT_EQ(big.points.size(), 8u);
  for (Eigen::Index i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(big.mean_weights(i), 1.0 / 8.0);
}

TEST(Cholesky, JitterOnceThenFail) {
  // Singular PSD: succeeds after jitter.
  Matrix singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  const Matrix L = cholesky_lower(singular, "P");
  EXPECT_LE((L * L.transpose() - singular).cwiseAbs().maxCoeff(), 1e-8);
  Matrix indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(cholesky_lower(indefinite, "P"), NumericError);
}

// Every nonlinear filter reduces to the linear KF when f and h are linear.
TEST(Reduction, NonlinearFiltersMatchKfOnLinearModels) {
  Rng rng(202);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + trial % 4, m = 1 + trial % 3;
    const LinearModel lin = random_linear_model(rng, n, m);
    const NonlinearModel nl = NonlinearModel::from_linear(lin);
    StateEstimate kf = random_state(rng, n), ekf = kf, ukf = kf, ckf = kf;
    for (int k = 0; k < 10; ++k) {
      const Vector z = random_vector(rng, m);
      kf = kf_step(kf, lin, z);
      ekf = ekf_step(ekf, nl, z);
      ukf = ukf_step(ukf, nl, UkfConfig{}, z);
      ckf = ckf_step(ckf, nl, z);
      for (const StateEstimate* s : {&ekf, &ukf, &ckf}) {
        EXPECT_LE((s->x - kf.x).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_LE((s->P - kf.P).cwiseAbs().maxCoeff(), 1e-6);
      }
    }
  }
}

TEST(Health, CovarianceStaysSymmetricPsd) {
  Rng rng(303);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 1 + trial % 4, m = 1 + trial % 2;
    const NonlinearModel nl = random_nonlinear_model(rng, n, m);
    const LinearModel lin = random_linear_model(rng, n, m);
    StateEstimate kf = random_state(rng, n), ekf = kf, ukf = kf, ckf = kf;
    for (int k = 0; k < 25; ++k) {
      kf = kf_step(kf, lin, random_vector(rng, m));
      const Vector z = random_vector(rng, m);
      ekf = ekf_step(ekf, nl, z);
      ukf = ukf_step(ukf, nl, UkfConfig{}, z);
      ckf = ckf_step(ckf, nl, z);
      for (const StateEstimate* s : {&kf, &ekf, &ukf, &ckf}) {
        const auto h = covariance_health(s->P);
        EXPECT_LE(h.asymmetry, 1e-9);
        EXPECT_GE(h.min_eigenvalue, -1e-9);
      }
    }
  }
}

TEST(Health, PosteriorTraceNeverExceedsPrior) {
  Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + trial % 4, m = 1 + trial % 2;
    const LinearModel lin = random_linear_model(rng, n, m);
    const StateEstimate prior = kf_predict(random_state(rng, n), lin);
    const Correction c = kf_correct(prior, lin, random_vector(rng, m));
    EXPECT_LE(c.posterior.P.trace(), prior.P.trace() + 1e-9);
  }
}

TEST(Determinism, SameInputsBitIdentical) {
  Rng a(9), b(9);
  const NonlinearModel ma = random_nonlinear_model(a, 3, 2);
  const NonlinearModel mb = random_nonlinear_model(b, 3, 2);
  StateEstimate sa = random_state(a, 3), sb = random_state(b, 3);
  for (int k = 0; k < 20; ++k) {
    const Vector za = random_vector(a, 2), zb = random_vector(b, 2);
    sa = ukf_step(ekf_step(sa, ma, za), ma, UkfConfig{}, za);
    sb = ukf_step(ekf_step(sb, mb, zb), mb, UkfConfig{}, zb);
  }
  EXPECT_EQ(sa.x, sb.x);
  EXPECT_EQ(sa.P, sb.P);
}

TEST(StateEstimate, ValidateRejectsBadCovariance) {
  StateEstimate s{Vector::Zero(2), Matrix::Identity(3, 3), 0};
  EXPECT_THROW(s.validate(), DimensionError);
  s.P = Matrix::Identity(2, 2);
  s.P(0, 1) = 1.0;
  EXPECT_THROW(s.validate(), ValueError);
}

}  // namespace
}  // namespace akf
