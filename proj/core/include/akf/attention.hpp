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

#ifndef AKF_ATTENTION_HPP_
#define AKF_ATTENTION_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "akf/filters.hpp"
#include "akf/numerics.hpp"
#include "akf/pca.hpp"
#include "akf/rng.hpp"
#include "akf/trace.hpp"

namespace akf {

enum class OutputNorm {
  kSoftmax,  ///< s = softmax(l)
  kRatio,    ///< s = l / sum(l); requires sum(l) > 0
};

/// Key-less attention layer weights.
///   W_a: d_h x d_in   W_q: d_h x d_h   W_v: d_h x d_h   W_l: 1 x d_in
struct AttentionParams {
  Matrix W_a;
  Matrix W_q;
  Matrix W_v;
  Matrix W_l;
  std::size_t window = 16;
  OutputNorm output = OutputNorm::kSoftmax;

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(W_a.cols()); }
  std::size_t hidden_dim() const noexcept { return static_cast<std::size_t>(W_a.rows()); }
  void validate() const;

  /// Gaussian init scaled by 1/sqrt(fan_in); W_l starts at zero so the
  /// untrained layer averages the window uniformly.
  static AttentionParams init(std::size_t d_in, std::size_t d_h, std::size_t window, Rng& rng);
};

struct AttentionOutput {
  Vector s;        ///< weights over the window, sum to 1
  Vector scores;   ///< softmax(q.v / sqrt(d_h))
  Matrix b_hat;    ///< d_in x n normalized intermediates
  Vector z_fused;  ///< sum_i s_i z_i
};

/// Convex combination of the window columns.
Vector fuse(const Matrix& window, const Vector& s);

/// window holds measurements as columns (d_in x n), oldest first.
AttentionOutput attn_forward(const AttentionParams& params, const Matrix& window);
AttentionOutput attn_forward(const AttentionParams& params, const MeasurementWindow& window);

struct AttentionGrad {
  Matrix W_a;
  Matrix W_q;
  Matrix W_v;
  Matrix W_l;
};

/// Loss of one window against the next measurement, with its gradient
/// accumulated (added) into grad when grad is non-null.
double attn_sample_loss(const AttentionParams& params, const Matrix& window, const Vector& target,
                        AttentionGrad* grad);

/// Mean sample loss over every (window, next value) pair in the series.
double attn_series_loss(const AttentionParams& params, const Trace& series, AttentionGrad* grad);

struct TrainResult {
  AttentionParams params;
  std::vector<double> loss;  ///< loss at the start of each epoch
};

TrainResult attn_train(const AttentionParams& params, const Trace& series, std::size_t epochs = 200,
                       double lr = 1e-2);

/// Mean over every full window of the series of the population standard
/// deviation of the output weights s.
double attention_weight_spread(const AttentionParams& params, const Trace& series);

/// EKF correction on the attention-fused window.
StateEstimate akf_step(const StateEstimate& state, const NonlinearModel& model, const AttentionParams& params,
                       const MeasurementWindow& window);

std::string attention_params_to_json(const AttentionParams& params);
AttentionParams attention_params_from_json(std::string_view text);

}  // namespace akf

#endif  // AKF_ATTENTION_HPP_
