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


#ifndef AKF_CLI_RUN_CONFIG_HPP_
#define AKF_CLI_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "akf/autoscaler.hpp"
#include "akf/evalkit.hpp"

namespace akf::cli {

enum class RunKind { kComparison, kScaleSim };

std::string_view to_string(RunKind kind) noexcept;

/// Estimator entry as written in a config. The attention path is kept
/// verbatim and resolved against the config directory at load time.
struct EstimatorEntry {
  EstimatorKind kind = EstimatorKind::kEkf;
  std::optional<double> pca_threshold;
  std::optional<std::size_t> window;
  std::optional<UkfConfig> ukf;
  std::string attention_params;
};

struct ScaleSimConfig {
  WorkloadSpec workload;
  ClusterConfig cluster;
  std::size_t n_iter = 10;
  double threshold_us = 200.0;
  double update_rate = 0.125;
  double scaling_duration_us = 40.0;
  double jitter_sd_us = 40.0;
  std::size_t warmup = 16;
  SeriesModelConfig model = latency_model_defaults();
};

struct RunConfig {
  RunKind kind = RunKind::kComparison;
  std::string experiment = "experiment";
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::vector<SignalSpec> signals;        ///< comparison only
  std::vector<EstimatorEntry> estimators;
  ComparisonOptions comparison;           ///< comparison only
  ScaleSimConfig scale_sim;               ///< scale-sim only

  void validate() const;
};

/// Strict parse: unknown keys, wrong types and sections that do not belong to
/// the run kind are ValidationErrors naming the offending JSON path.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical form: every field written, fixed key order, two-space indent.
std::string serialize_run_config(const RunConfig& config);

/// Materializes the comparison estimator list, loading attention params
/// relative to `base_dir`.
std::vector<EstimatorSpec> resolve_estimators(const RunConfig& config, const std::filesystem::path& base_dir);

/// One EstimatorConfig per listed estimator for the scale simulation.
std::vector<EstimatorConfig> scale_sim_estimators(const RunConfig& config);

}  // namespace akf::cli

#endif  // AKF_CLI_RUN_CONFIG_HPP_
