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

#ifndef AKF_SERIES_ESTIMATORS_HPP_
#define AKF_SERIES_ESTIMATORS_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "akf/attention.hpp"
#include "akf/baselines.hpp"
#include "akf/filters.hpp"
#include "akf/pca_filters.hpp"

namespace akf {

enum class EstimatorKind {
  kPassive,
  kSavgol,
  kKf,
  kEkf,
  kUkf,
  kCkf,
  kEkfPca,
  kEkfPcaLs,
  kUkfPca,
  kJointEkfPca,
  kJointUkfPca,
  kAkf,
  kAkfPca,
};

std::string_view to_string(EstimatorKind kind) noexcept;
/// Accepts the names printed by to_string ("EKF-PCA", "AKF-PCA", ...).
/// Unknown names raise ValidationError listing the valid ones.
EstimatorKind parse_estimator_kind(std::string_view name);
const std::vector<EstimatorKind>& all_estimator_kinds();
bool uses_attention(EstimatorKind kind) noexcept;

/// Scalar series model shared by every estimator kind. The state is
/// (level, slope) with a damped trend:
///   level' = level + damping * slope,  slope' = damping * slope.
/// Plain filters observe the level. PCA and attention variants observe a
/// delay embedding of the last embed_dim samples, modelled as
/// (level, level - slope, level - 2 slope, ...).
struct SeriesModelConfig {
  double level_noise = 1e-3;        ///< Q(0,0)
  double slope_noise = 1e-5;        ///< Q(1,1)
  double measurement_noise = 1e-2;  ///< R per scalar sample
  double damping = 0.9;
  std::size_t embed_dim = 4;
  std::size_t window = 16;               ///< PCA refit window and attention window
  std::optional<double> pca_threshold;   ///< default 0: keep every non-degenerate component
  UkfConfig ukf;
  SavgolSpec savgol;
  std::uint64_t seed = 0;                ///< attention init when no params are given

  void validate() const;
  double threshold() const { return pca_threshold.value_or(0.0); }
};

LinearModel series_linear_model(const SeriesModelConfig& cfg);
NonlinearModel series_scalar_model(const SeriesModelConfig& cfg);
NonlinearModel series_embedded_model(const SeriesModelConfig& cfg);

class SeriesEstimator {
 public:
  virtual ~SeriesEstimator() = default;

  virtual EstimatorKind kind() const noexcept = 0;
  std::string_view name() const noexcept { return to_string(kind()); }

  /// Feeds the measurement taken at time t. With correct == false only the
  /// time update runs; the sample still enters the history windows.
  virtual void step(double t, double z, bool correct = true) = 0;
  /// Current estimate of the signal.
  virtual double estimate() const = 0;
  /// Prediction of the next sample.
  virtual double forecast() const = 0;

  std::size_t corrections() const noexcept { return corrections_; }
  std::size_t steps() const noexcept { return steps_; }

 protected:
  std::size_t corrections_ = 0;
  std::size_t steps_ = 0;
};

/// `attention` is used by AKF / AKF-PCA; when null an untrained layer
/// (uniform weights) is built from cfg.seed.
std::unique_ptr<SeriesEstimator> make_series_estimator(EstimatorKind kind, const SeriesModelConfig& cfg,
                                                       const AttentionParams* attention = nullptr);

/// Delay-embeds a scalar trace: value k becomes (y_k, y_{k-1}, ...), with the
/// first sample repeated until enough history exists.
Trace embed_trace(const Trace& series, std::size_t embed_dim);

}  // namespace akf

#endif  // AKF_SERIES_ESTIMATORS_HPP_
