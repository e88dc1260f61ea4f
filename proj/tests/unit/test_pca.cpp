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
#include <limits>

#include "akf/error.hpp"
#include "akf/pca.hpp"
#include "akf/pca_filters.hpp"
#include "akf/rng.hpp"
#include "akf/series_estimators.hpp"
#include "akf/workloads.hpp"
#include "generators.hpp"

namespace akf {
namespace {

using testing::covariance_health;
using testing::random_matrix;
using testing::random_vector;

TEST(MeasurementWindow, EvictsOldestAndKeepsOrder) {
  MeasurementWindow w(3);
  for (int i = 0; i < 5; ++i) w.push(i, Vector::Constant(2, i));
  ASSERT_EQ(w.size(), 3u);
  EXPECT_TRUE(w.full());
  EXPECT_EQ(w[0].timestamp, 2.0);
  EXPECT_EQ(w.latest().timestamp, 4.0);
  const Matrix m = w.matrix();
  EXPECT_EQ(m.cols(), 3);
  EXPECT_EQ(m(1, 0), 2.0);
  EXPECT_EQ(m(0, 2), 4.0);
}

TEST(MeasurementWindow, RejectsBadInput) {
  EXPECT_THROW(MeasurementWindow(0), ValueError);
  MeasurementWindow w(4);
  EXPECT_THROW(w.latest(), InsufficientDataError);
  w.push(1.0, Vector::Ones(2));
  EXPECT_THROW(w.push(2.0, Vector::Ones(3)), DimensionError);
  EXPECT_THROW(w.push(0.5, Vector::Ones(2)), ValidationError);
}

TEST(Pca, MatchesEigenOracleOnRandomSamples) {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 2 + trial % 5;
    const Matrix samples = random_matrix(rng, d, 40) + random_vector(rng, d).replicate(1, 40);
    const PcaModel m = pca_fit(samples, 0.0);

    const Vector mean = samples.rowwise().mean();
    const Matrix centered = samples.colwise() - mean;
    const Matrix C = centered * centered.transpose() / 40.0;
    Eigen::SelfAdjointEigenSolver<Matrix> oracle(C);
    ASSERT_EQ(m.rank(), static_cast<std::size_t>(d));
    EXPECT_LE((m.mean - mean).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index i = 0; i < d; ++i) {
      EXPECT_NEAR(m.eigenvalues(i), oracle.eigenvalues()(d - 1 - i), 1e-10);
      // Compare up to sign.
      EXPECT_NEAR(std::fabs(m.components.col(i).dot(oracle.eigenvectors().col(d - 1 - i))), 1.0, 1e-8);
    }
    EXPECT_LE((m.components.transpose() * m.components - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Pca, ThresholdDropsSmallComponents) {
  Rng rng(32);
  Matrix samples(3, 200);
  for (Eigen::Index k = 0; k < samples.cols(); ++k) {
    samples(0, k) = rng.normal(0.0, 3.0);
    samples(1, k) = rng.normal(0.0, 1.0);
    samples(2, k) = rng.normal(0.0, 0.01);
  }
  const PcaModel two = pca_fit(samples, 0.1);
  EXPECT_EQ(two.rank(), 2u);
  EXPECT_GT(std::fabs(two.components(0, 0)), 0.99);
  // A threshold above every eigenvalue still keeps the largest component.
  const PcaModel one = pca_fit(samples, 1e6);
  EXPECT_EQ(one.rank(), 1u);
  EXPECT_GT(std::fabs(one.components(0, 0)), 0.99);
}

TEST(Pca, ProjectionRemovesMeanAndRotates) {
  Matrix samples(2, 4);
  samples << 1, 3, 1, 3,
             5, 5, 5, 5;
  const PcaModel m = pca_fit(samples, 0.0);
  Vector z(2);
  z << 4.0, 5.0;
  const Vector p = pca_project(m, z);
  EXPECT_NEAR(std::fabs(p(0)), 2.0, 1e-12);
  EXPECT_THROW(pca_project(m, Vector::Ones(3)), DimensionError);

  const Matrix R = Matrix::Identity(2, 2) * 0.25;
  const Matrix Rp = pca_project_covariance(m, R);
  EXPECT_NEAR(Rp(0, 0), 0.25, 1e-12);
}

TEST(Pca, RejectsTooFewSamplesAndNegativeThreshold) {
  EXPECT_THROW(pca_fit(Matrix::Ones(2, 1), 0.0), InsufficientDataError);
  EXPECT_THROW(pca_fit(Matrix::Ones(2, 3), -1.0), ValueError);
}

TEST(Pca, IdentityIsPassThrough) {
  const PcaModel m = PcaModel::identity(3);
  Vector z(3);
  z << 1, -2, 3;
  EXPECT_EQ(pca_project(m, z), z);
}

NonlinearModel scalar_random_walk(double q, double r) {
  LinearModel m;
  m.A = Matrix::Identity(1, 1);
  m.H = Matrix::Identity(1, 1);
  m.Q = Matrix::Constant(1, 1, q);
  m.R = Matrix::Constant(1, 1, r);
  return NonlinearModel::from_linear(m);
}

TEST(PcaFilters, ConstantStreamConverges) {
  const NonlinearModel model = scalar_random_walk(1e-6, 0.1);
  const PcaModel pca = PcaModel::identity(1);
  PcaFilterState lin = PcaFilterState::start({Vector::Zero(1), Matrix::Identity(1, 1), 0});
  PcaFilterState ls = lin;
  PcaFilterState ukf = lin;
  const Vector z = Vector::Constant(1, 2.5);
  for (int k = 0; k < 2000; ++k) {
    lin = kfpca_step_lin(lin, model, pca, z);
    ls = kfpca_step_ls(ls, model, pca, z);
    ukf = ukfpca_step(ukf, model, pca, UkfConfig{}, z);
  }
  EXPECT_NEAR(lin.estimate.x(0), 2.5, 1e-3);
  EXPECT_NEAR(ukf.estimate.x(0), 2.5, 1e-3);
  EXPECT_EQ(lin.corrections, 2000u);
  // LS explains the measurement through its fitted matrix rather than the state.
  ASSERT_TRUE(ls.observation.has_value());
  EXPECT_NEAR(((*ls.observation) * ls.estimate.x)(0), 2.5, 1e-2);
}

TEST(PcaFilters, LinMatchesEkfWithIdentityPca) {
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const LinearModel lm = testing::random_linear_model(rng, 2, 2);
    const NonlinearModel model = NonlinearModel::from_linear(lm);
    const PcaModel pca = PcaModel::identity(2);
    StateEstimate ekf = testing::random_state(rng, 2);
    PcaFilterState lin = PcaFilterState::start(ekf);
    for (int k = 0; k < 10; ++k) {
      const Vector z = random_vector(rng, 2);
      ekf = ekf_step(ekf, model, z);
      lin = kfpca_step_lin(lin, model, pca, z);
    }
    EXPECT_LE((ekf.x - lin.estimate.x).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((ekf.P - lin.estimate.P).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(PcaFilters, LsFallsBackWhenStateIsZero) {
  const NonlinearModel model = scalar_random_walk(1e-3, 0.1);
  PcaFilterState s = PcaFilterState::start({Vector::Zero(1), Matrix::Identity(1, 1), 0});
  const PcaFilterState out = kfpca_step_ls(s, model, PcaModel::identity(1), Vector::Constant(1, 1.0));
  EXPECT_TRUE(out.estimate.x.allFinite());
  ASSERT_TRUE(out.observation.has_value());
  EXPECT_NEAR((*out.observation)(0, 0), 1.0, 1e-6);
}

// Per-step mean absolute error of one-step forecasts for the LS and LIN
// observation matrices on a noisy level-shifting series.
TEST(PcaFilters, LinBeatsLsOnHighVarianceSeries) {
  CpuSpec spec;
  spec.length = 800;
  const SyntheticSeries s = gen_cpu_synthetic(spec, 5);
  SeriesModelConfig cfg;
  auto lin = make_series_estimator(EstimatorKind::kEkfPca, cfg);
  auto ls = make_series_estimator(EstimatorKind::kEkfPcaLs, cfg);
  double err_lin = 0.0, err_ls = 0.0;
  for (std::size_t k = 0; k + 1 < s.measured.size(); ++k) {
    lin->step(s.measured.time(k), s.measured.value(k)(0));
    ls->step(s.measured.time(k), s.measured.value(k)(0));
    if (k < 20) continue;
    err_lin += std::fabs(lin->forecast() - s.truth.value(k + 1)(0));
    err_ls += std::fabs(ls->forecast() - s.truth.value(k + 1)(0));
  }
  EXPECT_LT(err_lin, err_ls);
}

struct JointRun {
  std::size_t steps = 0;
  std::size_t violations = 0;
  std::size_t pca_selected = 0;
};

// Drives joint_step the way the series estimator does, checking the
// selection rule on every step.
JointRun run_joint(const Trace& measured, bool unscented) {
  SeriesModelConfig cfg;
  const NonlinearModel scalar = series_scalar_model(cfg);
  const NonlinearModel embedded = series_embedded_model(cfg);
  const Trace emb = embed_trace(measured, cfg.embed_dim);
  MeasurementWindow window(cfg.window);
  PcaModel pca = PcaModel::identity(cfg.embed_dim);
  JointOptions options;
  options.unscented = unscented;

  Vector x0(2);
  x0 << measured.value(0)(0), 0.0;
  JointEstimate state = JointEstimate::start({x0, Matrix::Identity(2, 2) * cfg.measurement_noise, 0});
  window.push(emb.time(0), emb.value(0));
  JointRun run;
  for (std::size_t k = 1; k < measured.size(); ++k) {
    window.push(emb.time(k), emb.value(k));
    if ((k + 1) % cfg.window == 0) pca = pca_fit(window, cfg.threshold());
    state = joint_step(state, scalar, measured.value(k), embedded, pca, emb.value(k), options);
    const double sel = state.selected == Branch::kFilter ? state.eps_filter.norm() : state.eps_pca.norm();
    const double other = state.selected == Branch::kFilter ? state.eps_pca.norm() : state.eps_filter.norm();
    if (!(sel <= other)) ++run.violations;
    if (state.selected == Branch::kPca) ++run.pca_selected;
    ++run.steps;
    for (const Matrix* P : {&state.branch_filter.P, &state.branch_pca.estimate.P}) {
      const auto h = covariance_health(*P);
      EXPECT_LE(h.asymmetry, 1e-9);
      EXPECT_GE(h.min_eigenvalue, -1e-9);
    }
  }
  return run;
}

Trace noisy_mg(std::size_t length, std::uint64_t seed) {
  MgSpec spec;
  spec.length = length;
  return add_noise_snr(gen_mackey_glass(spec), 6.0, seed);
}

TEST(Joint, SelectedBranchHasSmallerInnovation) {
  for (const bool unscented : {false, true}) {
    const JointRun run = run_joint(noisy_mg(500, 41), unscented);
    EXPECT_EQ(run.violations, 0u);
    EXPECT_EQ(run.steps, 499u);
    // Both branches win sometimes on a noisy chaotic series.
    EXPECT_GT(run.pca_selected, 0u);
    EXPECT_LT(run.pca_selected, run.steps);
  }
}

TEST(Joint, TiesGoToTheFilterBranch) {
  const NonlinearModel model = scalar_random_walk(1e-3, 0.1);
  JointEstimate s = JointEstimate::start({Vector::Zero(1), Matrix::Identity(1, 1), 0});
  s = joint_step(s, model, PcaModel::identity(1), Vector::Constant(1, 1.0));
  EXPECT_EQ(s.eps_filter.norm(), s.eps_pca.norm());
  EXPECT_EQ(s.selected, Branch::kFilter);
}

TEST(Joint, FailedBranchIsReportedAndSkipped) {
  NonlinearModel model = scalar_random_walk(1e-3, 0.1);
  NonlinearModel broken = model;
  broken.R = Matrix::Constant(1, 1, -10.0);
  JointEstimate s = JointEstimate::start({Vector::Ones(1), Matrix::Identity(1, 1), 0});
  s = joint_step(s, model, Vector::Constant(1, 1.0), broken, PcaModel::identity(1), Vector::Constant(1, 1.0));
  ASSERT_TRUE(s.failure.has_value());
  EXPECT_EQ(s.selected, Branch::kFilter);
  EXPECT_TRUE(std::isinf(s.eps_pca.norm()));
}

double mean_abs_forecast_error(EstimatorKind kind, const Trace& clean, const Trace& noisy) {
  auto est = make_series_estimator(kind, SeriesModelConfig{});
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k + 1 < noisy.size(); ++k) {
    est->step(noisy.time(k), noisy.value(k)(0));
    if (k < 10) continue;
    sum += std::fabs(est->forecast() - clean.value(k + 1)(0));
    ++n;
  }
  return sum / static_cast<double>(n);
}

TEST(Joint, WithinTenPercentOfBetterBranchOnMackeyGlass) {
  MgSpec spec;
  spec.length = 1000;
  const Trace clean = gen_mackey_glass(spec);
  const Trace noisy = add_noise_snr(clean, 6.0, 42);
  const double ekf = mean_abs_forecast_error(EstimatorKind::kEkf, clean, noisy);
  const double pca = mean_abs_forecast_error(EstimatorKind::kEkfPca, clean, noisy);
  const double joint = mean_abs_forecast_error(EstimatorKind::kJointEkfPca, clean, noisy);
  EXPECT_LE(joint, 1.1 * std::min(ekf, pca));
  EXPECT_LT(joint, pca);
}

}  // namespace
}  // namespace akf
