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

#ifndef AKF_EVALKIT_HPP_
#define AKF_EVALKIT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "akf/attention.hpp"
#include "akf/series_estimators.hpp"
#include "akf/trace.hpp"
#include "akf/workloads.hpp"

namespace akf {

struct ErrorStats {
  double nu = 0.0;   ///< mean |error|
  double rho = 0.0;  ///< population standard deviation of error
  double mse = 0.0;
  double rmse = 0.0;
};

ErrorStats error_stats(const Vector& estimates, const Vector& truth);
/// All components of every point contribute one error sample.
ErrorStats error_stats(const Trace& estimates, const Trace& truth);

struct RankTable {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  Matrix scores;           ///< rows x cols rank points, best = cols.size()
  Vector mean_rank;        ///< r_j per column
  std::vector<std::string> ordering;  ///< best first
};

/// Lower values are better. Within each row the best cell scores n points
/// and the worst 1; tied cells share the average of their points. Equal
/// mean ranks are ordered by comparing each column's scores sorted in
/// descending order, then by column position.
RankTable rank_matrix(const std::vector<std::string>& rows, const std::vector<std::string>& cols,
                      const Matrix& values);

/// Mean squared residual about the least-squares line through
/// (timestamp, value).
double residual_variance(const Trace& series);

/// mean(|prediction - truth| / truth); truth must be positive.
double relative_error(const Vector& truth, const Vector& predictions);

/// predictions(k) is the estimator's forecast of sample k made after
/// sample k-1 (NaN for k = 0); estimates(k) is its estimate after sample k.
struct SeriesRun {
  Vector predictions;
  Vector estimates;
};
SeriesRun run_series(SeriesEstimator& estimator, const Trace& measured);

/// First k >= step_at with |prediction - truth| < 10% of the step height,
/// returned as k - step_at.
std::optional<std::size_t> convergence_latency(const Vector& predictions, const Vector& truth,
                                               std::size_t step_at, double step_height);

struct SignalSpec {
  enum class Kind { kMackeyGlass, kCpu, kLossCurve, kStep, kCounts, kTrace };
  std::string name;
  Kind kind = Kind::kMackeyGlass;
  MgSpec mg;
  double snr_db = 6.0;  ///< Mackey-Glass and trace noise
  CpuSpec cpu;
  LossCurveSpec loss;
  StepSpec step;
  CountProfile counts;
  std::string trace_path;  ///< kTrace: CSV file, used as both truth and measurement
  SeriesModelConfig model; ///< shared by every estimator on this signal
};

std::string_view to_string(SignalSpec::Kind kind) noexcept;
SignalSpec::Kind parse_signal_kind(std::string_view name);

/// Clean truth and the noisy measurement the estimators see.
SyntheticSeries make_signal(const SignalSpec& spec, std::uint64_t seed);

struct ComparisonOptions {
  std::size_t burn_in = 10;
  /// Leading fraction of each signal used to train attention; metrics use the rest.
  double train_fraction = 0.0;
  std::size_t epochs = 200;
  double lr = 1e-2;

  void validate() const;
};

struct StepRecord {
  double t = 0.0;
  double truth = 0.0;
  double estimate = 0.0;
  double error = 0.0;
};

struct EstimatorResult {
  std::string name;
  std::string signal;
  ErrorStats stats;
  std::optional<std::size_t> convergence_latency;
  std::optional<std::string> failure;
  std::vector<StepRecord> steps;  ///< evaluated one-step-ahead predictions
};

struct ComparisonReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<EstimatorResult> results;  ///< signal-major
  RankTable rank;                        ///< rows "<signal> nu" / "<signal> rho"
};

/// One column of a comparison. Unset overrides fall back to the signal's
/// shared model; attention, when given, replaces the prefix-trained layer.
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kEkf;
  std::optional<double> pca_threshold;
  std::optional<std::size_t> window;
  std::optional<UkfConfig> ukf;
  std::optional<AttentionParams> attention;
  std::string attention_path;  ///< provenance of `attention`, kept for round-trips
};

ComparisonReport run_comparison(const std::string& experiment, const std::vector<SignalSpec>& signals,
                                const std::vector<EstimatorSpec>& estimators, const ComparisonOptions& options,
                                std::uint64_t seed);
ComparisonReport run_comparison(const std::string& experiment, const std::vector<SignalSpec>& signals,
                                const std::vector<EstimatorKind>& estimators, const ComparisonOptions& options,
                                std::uint64_t seed);

std::string report_to_json(const ComparisonReport& report);
/// Header `t,truth,estimate,error`.
std::string steps_to_csv(const EstimatorResult& result);

}  // namespace akf

#endif  // AKF_EVALKIT_HPP_
