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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "akf/error.hpp"
#include "akf/evalkit.hpp"
#include "akf/rng.hpp"
#include "table_fixture.hpp"

namespace akf {
namespace {

TEST(ErrorStats, HandComputed) {
  Vector est(4), truth(4);
  est << 1.0, 2.0, 3.0, 4.0;
  truth << 0.0, 2.0, 5.0, 4.0;
  const ErrorStats s = error_stats(est, truth);
  // errors 1, 0, -2, 0
  EXPECT_DOUBLE_EQ(s.nu, 0.75);
  EXPECT_DOUBLE_EQ(s.mse, 1.25);
  EXPECT_DOUBLE_EQ(s.rmse, std::sqrt(1.25));
  // mean -0.25; deviations 1.25, .25, -1.75, .25
  EXPECT_DOUBLE_EQ(s.rho, std::sqrt((1.5625 + 0.0625 + 3.0625 + 0.0625) / 4.0));
  EXPECT_THROW(error_stats(est, Vector(Vector::Zero(3))), DimensionError);
}

TEST(Rank, TableOneFixture) {
  const auto t = testing::load_labeled_table(std::string(AKF_FIXTURE_DIR) + "/table1.csv");
  const RankTable r = rank_matrix(t.rows, t.cols, t.values);
  const std::vector<std::string> expected = {"AKF-PCA", "UKF-PCA", "JOINT-EKF-PCA", "EKF-PCA",
                                             "EKF",     "JOINT-UKF-PCA", "UKF"};
  EXPECT_EQ(r.ordering, expected);
  const auto akf = std::find(t.cols.begin(), t.cols.end(), "AKF-PCA") - t.cols.begin();
  EXPECT_EQ(std::round(r.mean_rank(akf) * 1000.0) / 1000.0, 5.333);
  // Points per row are a permutation of 1..7.
  for (Eigen::Index row = 0; row < r.scores.rows(); ++row) EXPECT_DOUBLE_EQ(r.scores.row(row).sum(), 28.0);
}

TEST(Rank, TiesShareAveragePoints) {
  Matrix v(1, 3);
  v << 0.5, 0.5, 0.1;
  const RankTable r = rank_matrix({"x"}, {"a", "b", "c"}, v);
  EXPECT_DOUBLE_EQ(r.scores(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(r.scores(0, 1), 1.5);
  EXPECT_DOUBLE_EQ(r.scores(0, 2), 3.0);
  EXPECT_EQ(r.ordering.front(), "c");
}

TEST(Rank, IdenticalColumnsGetIdenticalScores) {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix v(4, 5);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform();
    v.col(3) = v.col(1);
    const RankTable r = rank_matrix({"a", "b", "c", "d"}, {"p", "q", "r", "s", "t"}, v);
    EXPECT_EQ(r.scores.col(1), r.scores.col(3));
    for (Eigen::Index row = 0; row < 4; ++row) EXPECT_DOUBLE_EQ(r.scores.row(row).sum(), 15.0);
  }
}

TEST(Rank, RejectsNaNAndShapeMismatch) {
  Matrix v(1, 2);
  v << 1.0, std::nan("");
  EXPECT_THROW(rank_matrix({"x"}, {"a", "b"}, v), ValueError);
  EXPECT_THROW(rank_matrix({"x", "y"}, {"a", "b"}, Matrix::Ones(1, 2)), DimensionError);
}

TEST(ResidualVariance, ThreePointFixture) {
  Trace t;
  t.push_back(0.0, 0.0);
  t.push_back(1.0, 1.0);
  t.push_back(2.0, 0.0);
  EXPECT_NEAR(residual_variance(t), 2.0 / 9.0, 1e-15);
}

TEST(ResidualVariance, InvariantToAddedTrend) {
  Rng rng(72);
  for (int trial = 0; trial < 50; ++trial) {
    Trace a, b;
    const double slope = rng.normal(0.0, 10.0), offset = rng.normal(0.0, 10.0);
    for (int i = 0; i < 30; ++i) {
      const double y = rng.normal();
      a.push_back(i, y);
      b.push_back(i, y + slope * i + offset);
    }
    EXPECT_NEAR(residual_variance(a), residual_variance(b), 1e-9 * (1.0 + std::fabs(slope)));
  }
  EXPECT_NEAR(residual_variance(Trace::from_series(Vector::LinSpaced(10, 1.0, 5.0))), 0.0, 1e-20);
}

TEST(ResidualVariance, RejectsShortSeries) {
  EXPECT_THROW(residual_variance(Trace::from_series(Vector::Ones(2))), InsufficientDataError);
  Trace t;
  t.push_back(1.0, 0.0);
  EXPECT_THROW(t.push_back(1.0, 1.0), ValidationError);
}

TEST(RelativeError, HandComputedAndRejectsNonPositiveTruth) {
  Vector truth(2), pred(2);
  truth << 2.0, 4.0;
  pred << 3.0, 3.0;
  EXPECT_DOUBLE_EQ(relative_error(truth, pred), 0.375);
  truth(1) = 0.0;
  EXPECT_THROW(relative_error(truth, pred), ValueError);
}

TEST(ConvergenceLatency, FirstStepWithinTenPercent) {
  Vector truth = Vector::Zero(10), pred = Vector::Zero(10);
  truth.tail(5).setOnes();
  pred.tail(5) << 0.2, 0.6, 0.85, 0.95, 1.0;
  EXPECT_EQ(convergence_latency(pred, truth, 5, 1.0), std::optional<std::size_t>(3));
  pred.tail(5).setZero();
  EXPECT_FALSE(convergence_latency(pred, truth, 5, 1.0).has_value());
}

SignalSpec mg_signal(std::size_t length, double snr_db) {
  SignalSpec s;
  s.name = "mg";
  s.kind = SignalSpec::Kind::kMackeyGlass;
  s.mg.length = length;
  s.snr_db = snr_db;
  return s;
}

TEST(Comparison, NoiselessConstantIsTrackedExactly) {
  SignalSpec s;
  s.name = "flat";
  s.kind = SignalSpec::Kind::kStep;
  s.step.low = s.step.high = 0.5;
  s.step.noise_sd = 0.0;
  const auto report = run_comparison("flat", {s},
                                     std::vector<EstimatorKind>{EstimatorKind::kKf, EstimatorKind::kEkf,
                                                                EstimatorKind::kUkf, EstimatorKind::kEkfPca,
                                                                EstimatorKind::kJointEkfPca},
                                     ComparisonOptions{}, 1);
  for (const auto& r : report.results) {
    ASSERT_FALSE(r.failure.has_value()) << r.name << ": " << *r.failure;
    EXPECT_LT(r.stats.nu, 1e-3) << r.name;
  }
}

TEST(Comparison, DuplicateEstimatorGivesIdenticalColumns) {
  const auto report = run_comparison(
      "dup", {mg_signal(300, 6.0)},
      std::vector<EstimatorKind>{EstimatorKind::kEkf, EstimatorKind::kEkfPca, EstimatorKind::kEkf},
      ComparisonOptions{}, 3);
  ASSERT_EQ(report.results.size(), 3u);
  EXPECT_EQ(report.results[0].stats.nu, report.results[2].stats.nu);
  EXPECT_EQ(report.rank.scores.col(0), report.rank.scores.col(2));
}

TEST(Comparison, JointBeatsPcaOnNoisyMackeyGlass) {
  const auto report = run_comparison(
      "mg", {mg_signal(1000, 6.0)},
      std::vector<EstimatorKind>{EstimatorKind::kEkf, EstimatorKind::kEkfPca, EstimatorKind::kJointEkfPca,
                                 EstimatorKind::kEkfPcaLs, EstimatorKind::kPassive},
      ComparisonOptions{}, 1);
  const double ekf = report.results[0].stats.nu, pca = report.results[1].stats.nu;
  const double joint = report.results[2].stats.nu, ls = report.results[3].stats.nu;
  EXPECT_LT(joint, pca);
  EXPECT_LE(joint, 1.1 * std::min(ekf, pca));
  EXPECT_LT(pca, ls);
  EXPECT_LT(ekf, report.results[4].stats.nu);
}

TEST(Comparison, DeterministicReportAndHeldOutSteps) {
  ComparisonOptions opt;
  opt.train_fraction = 0.5;
  opt.epochs = 5;
  const std::vector<EstimatorKind> kinds{EstimatorKind::kAkfPca, EstimatorKind::kEkf};
  const auto a = run_comparison("det", {mg_signal(200, 6.0)}, kinds, opt, 9);
  const auto b = run_comparison("det", {mg_signal(200, 6.0)}, kinds, opt, 9);
  EXPECT_EQ(report_to_json(a), report_to_json(b));
  EXPECT_EQ(steps_to_csv(a.results[0]), steps_to_csv(b.results[0]));
  // Metrics cover only the held-out half.
  EXPECT_EQ(a.results[0].steps.size(), 100u);
  EXPECT_EQ(a.results[0].steps.front().t, 100.0);
}

TEST(Comparison, StepSignalReportsConvergenceLatency) {
  SignalSpec s;
  s.name = "step";
  s.kind = SignalSpec::Kind::kStep;
  const auto report =
      run_comparison("step", {s}, std::vector<EstimatorKind>{EstimatorKind::kEkf}, ComparisonOptions{}, 2);
  ASSERT_TRUE(report.results[0].convergence_latency.has_value());
  EXPECT_LT(*report.results[0].convergence_latency, 50u);
}

TEST(Comparison, RejectsBadOptions) {
  ComparisonOptions opt;
  opt.train_fraction = 1.0;
  EXPECT_THROW(run_comparison("x", {mg_signal(100, 6.0)}, std::vector<EstimatorKind>{EstimatorKind::kEkf}, opt, 1),
               ValueError);
  EXPECT_THROW(parse_signal_kind("sine"), ValidationError);
}

}  // namespace
}  // namespace akf
