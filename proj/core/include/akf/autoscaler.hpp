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

#ifndef AKF_AUTOSCALER_HPP_
#define AKF_AUTOSCALER_HPP_

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

struct ClusterConfig {
  double service_time_us = 1.0;  ///< deterministic, per message
  std::size_t initial_brokers = 1;

  void validate() const;
};

/// Latency-scale model: microsecond levels, jitter-sized R, undamped trend.
SeriesModelConfig latency_model_defaults();

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::kPassive;
  double update_rate = 0.125;         ///< r: fraction of notifications that correct the estimator
  double threshold_us = 200.0;        ///< scaling fires when the estimate exceeds this
  double scaling_duration_us = 40.0;  ///< d_s: service pause while the broker joins
  double jitter_sd_us = 40.0;         ///< Gaussian noise on each latency notification
  std::size_t warmup = 16;            ///< corrections before the threshold is armed
  SeriesModelConfig model = latency_model_defaults();

  void validate() const;
  /// ceil(1 / r)
  std::size_t update_every() const;
};

struct MessageRecord {
  double send_us = 0.0;
  double deliver_us = 0.0;
  double latency_us = 0.0;   ///< deliver - send
  double measured_us = 0.0;  ///< latency with notification jitter
  double estimate_us = 0.0;  ///< estimator output after this notification
  std::size_t broker = 0;
};

struct ScalingEvent {
  double initiation_us = 0.0;
  double completion_us = 0.0;
  std::size_t request_index = 0;       ///< arrivals seen when scaling fired
  std::size_t notification_index = 0;  ///< 1-based notification that fired it
};

struct ScalingTrace {
  std::size_t iteration = 0;
  std::vector<MessageRecord> messages;  ///< delivery order
  std::optional<ScalingEvent> event;
  std::size_t updates = 0;  ///< notifications that ran a measurement update
  std::size_t brokers = 0;  ///< broker count at the end
};

/// Runs one iteration. Workload timestamps are seconds; every entry is one
/// message. At most one scaling action fires per iteration.
ScalingTrace run_iteration(const Trace& workload, const ClusterConfig& cluster, const EstimatorConfig& cfg,
                           std::uint64_t seed, const AttentionParams* attention = nullptr,
                           std::size_t iteration = 0);

struct WorkloadSpec {
  enum class Kind { kPoisson, kCounts };
  Kind kind = Kind::kPoisson;
  double rate = 5.0e6;       ///< Poisson events per second (5x the default service rate)
  double duration = 8.0e-4;  ///< seconds
  CountProfile counts;       ///< per-bin counts for kCounts
  double bin_seconds = 1.0e-5;  ///< wall-clock span of one count bin

  void validate() const;
};

/// Arrival timestamps for one iteration.
Trace make_workload(const WorkloadSpec& spec, std::uint64_t seed);

struct IterationResult {
  std::size_t iteration = 0;
  std::optional<double> t_i_us;
  std::optional<std::size_t> t_i_requests;
};

struct StabilityResult {
  EstimatorKind kind = EstimatorKind::kPassive;
  std::vector<IterationResult> iterations;
  std::optional<double> sigma_us2;       ///< population variance of t_i
  std::optional<double> sigma_requests;  ///< same, in request counts
  std::size_t excluded = 0;              ///< iterations without a scaling event
};

/// Population variance; nullopt for fewer than two values.
std::optional<double> population_variance(const std::vector<double>& values);

/// Every estimator sees the same workload and jitter seeds in iteration i
/// (common random numbers); iteration seeds are derived from `seed`.
std::vector<StabilityResult> run_stability_experiment(const WorkloadSpec& workload, const ClusterConfig& cluster,
                                                      const std::vector<EstimatorConfig>& estimators,
                                                      std::size_t n_iter, std::uint64_t seed,
                                                      const AttentionParams* attention = nullptr);

/// Latency series (measured and estimated) of the messages delivered before
/// the scaling event, skipping the first `burn_in` notifications.
struct LatencySegment {
  Trace measured;
  Trace estimated;
};
LatencySegment pre_scaling_segment(const ScalingTrace& trace, std::size_t burn_in);

}  // namespace akf

#endif  // AKF_AUTOSCALER_HPP_
