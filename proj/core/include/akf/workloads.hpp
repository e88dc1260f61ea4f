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

#ifndef AKF_WORKLOADS_HPP_
#define AKF_WORKLOADS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>

#include "akf/trace.hpp"

namespace akf {

/// dx/dt = beta x(t - tau) / (1 + x(t - tau)^n_exp) - gamma x(t), Euler steps
/// of dt with x = x0 on the initial history.
struct MgSpec {
  double tau = 30.0;
  double beta = 0.2;
  double gamma = 0.1;
  double n_exp = 10.0;
  double dt = 1.0;
  double x0 = 1.2;
  std::size_t length = 5000;

  void validate() const;
};

Trace gen_mackey_glass(const MgSpec& spec);

/// Pass as snr_db to leave the trace untouched.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Adds white Gaussian noise with variance = mean(x^2) / 10^(snr_db / 10).
Trace add_noise_snr(const Trace& trace, double snr_db, std::uint64_t seed);

/// Empirical SNR in dB of `noisy` against `clean`.
double measured_snr_db(const Trace& clean, const Trace& noisy);

struct PoissonSpec {
  double rate = 1000.0;     ///< events per second
  double duration = 1.0;    ///< seconds
  std::uint64_t seed = 0;

  void validate() const;
};

/// Event timestamps on [0, duration), value 1 per event.
Trace gen_poisson_arrivals(const PoissonSpec& spec);

/// Per-minute counts: diurnal sinusoid around a base rate, Poisson sampling,
/// and occasional bursts that decay geometrically.
struct CountProfile {
  double base_rate = 200.0;             ///< mean count per minute
  double diurnal_amplitude = 0.5;       ///< fraction of base_rate
  double diurnal_period = 1440.0;       ///< minutes
  double burst_rate = 0.002;            ///< bursts per minute
  double burst_height = 2.0;            ///< peak extra rate, multiple of base_rate
  double burst_decay = 30.0;            ///< minutes (e-folding)
  std::size_t length = 4320;            ///< minutes

  void validate() const;
};

Trace gen_count_series(const CountProfile& profile, std::uint64_t seed);

struct SyntheticSeries {
  Trace truth;
  Trace measured;
};

/// CPU-utilization-like series on [0, 1]: piecewise-constant load regimes with
/// AR(1) wander, observed through white noise and occasional upward spikes.
struct CpuSpec {
  std::size_t length = 2000;
  double regime_length = 400.0;  ///< mean steps between regime switches
  double level_min = 0.15;
  double level_max = 0.85;
  double ar_coeff = 0.95;
  double ar_sd = 0.01;
  double noise_sd = 0.08;
  double spike_prob = 0.05;
  double spike_scale = 0.25;     ///< mean spike height

  void validate() const;
};

SyntheticSeries gen_cpu_synthetic(const CpuSpec& spec, std::uint64_t seed);

/// Training-loss-like series: exponential decay toward a floor, multiplicative
/// noise and heavy-tailed (Pareto) upward spikes.
struct LossCurveSpec {
  std::size_t length = 1000;
  double initial = 2.0;
  double floor = 0.2;
  double decay = 200.0;       ///< steps
  double noise = 0.05;        ///< relative sd
  double spike_prob = 0.02;
  double spike_scale = 0.3;   ///< relative to the current mean
  double spike_tail = 2.5;    ///< Pareto shape

  void validate() const;
};

SyntheticSeries gen_loss_curve(const LossCurveSpec& spec, std::uint64_t seed);

/// Level change from `low` to `high` at index `step_at`, white noise on top.
struct StepSpec {
  std::size_t length = 400;
  std::size_t step_at = 200;
  double low = 0.0;
  double high = 1.0;
  double noise_sd = 0.1;

  void validate() const;
};

SyntheticSeries gen_step_signal(const StepSpec& spec, std::uint64_t seed);

/// CSV with header `timestamp,value` (scalar) or `timestamp,v0,v1,...`.
std::string format_trace_csv(const Trace& trace);
Trace parse_trace_csv(std::string_view text);

void save_trace_csv(const Trace& trace, const std::filesystem::path& path);
Trace load_trace_csv(const std::filesystem::path& path);

}  // namespace akf

#endif  // AKF_WORKLOADS_HPP_
