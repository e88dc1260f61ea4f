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

#include "akf/workloads.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>
#include <vector>

#include "akf/error.hpp"
#include "akf/io.hpp"
#include "akf/rng.hpp"

namespace akf {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValueError(std::string(what) + " must be positive and finite");
}

void require_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValueError(std::string(what) + " must lie in [0, 1]");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(std::string_view field, std::size_t line) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("'" + std::string(field) + "' is not a number", line);
  }
  return v;
}

}  // namespace

void MgSpec::validate() const {
  if (!(tau >= 1.0)) throw ValueError("Mackey-Glass tau must be >= 1");
  require_positive(dt, "Mackey-Glass dt");
  if (!(beta >= 0.0) || !(gamma >= 0.0) || !std::isfinite(n_exp) || !std::isfinite(x0)) {
    throw ValueError("Mackey-Glass beta, gamma must be >= 0 and n_exp, x0 finite");
  }
  if (static_cast<double>(length) < tau) throw ValueError("Mackey-Glass length must be >= tau");
}

Trace gen_mackey_glass(const MgSpec& spec) {
  spec.validate();
  const auto delay = static_cast<std::size_t>(std::lround(spec.tau / spec.dt));
  // history holds x over the last `delay` steps, oldest first
  std::deque<double> history(delay, spec.x0);
  Trace out;
  out.reserve(spec.length);
  double x = spec.x0;
  for (std::size_t k = 0; k < spec.length; ++k) {
    out.push_back(static_cast<double>(k) * spec.dt, x);
    const double lagged = history.front();
    const double dx = spec.beta * lagged / (1.0 + std::pow(lagged, spec.n_exp)) - spec.gamma * x;
    history.pop_front();
    history.push_back(x);
    x += spec.dt * dx;
    if (!std::isfinite(x) || std::fabs(x) > 1e6) {
      throw NumericError("Mackey-Glass integration diverged at step " + std::to_string(k + 1));
    }
  }
  return out;
}

Trace add_noise_snr(const Trace& trace, double snr_db, std::uint64_t seed) {
  if (trace.empty()) throw InsufficientDataError("add_noise_snr needs a non-empty trace");
  if (std::isnan(snr_db)) throw ValueError("snr_db is NaN");
  if (snr_db == kNoNoise) return trace;
  double power = 0.0;
  for (const auto& v : trace.values()) power += v.squaredNorm();
  power /= static_cast<double>(trace.size() * trace.dim());
  if (power == 0.0) {
    warn("add_noise_snr: signal power is zero, trace returned unchanged");
    return trace;
  }
  const double sd = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  Rng rng = Rng::derive(seed, "snr-noise");
  Trace out;
  out.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    Vector v = trace.value(i);
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) += rng.normal(0.0, sd);
    out.push_back(trace.time(i), v);
  }
  return out;
}

double measured_snr_db(const Trace& clean, const Trace& noisy) {
  if (clean.size() != noisy.size() || clean.dim() != noisy.dim()) {
    throw DimensionError("measured_snr_db: traces are not aligned");
  }
  double signal = 0.0;
  double noise = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    signal += clean.value(i).squaredNorm();
    noise += (noisy.value(i) - clean.value(i)).squaredNorm();
  }
  if (noise == 0.0) return kNoNoise;
  return 10.0 * std::log10(signal / noise);
}

void PoissonSpec::validate() const {
  require_positive(rate, "Poisson rate");
  require_positive(duration, "Poisson duration");
}

Trace gen_poisson_arrivals(const PoissonSpec& spec) {
  spec.validate();
  Rng rng = Rng::derive(spec.seed, "poisson-arrivals");
  Trace out;
  out.reserve(static_cast<std::size_t>(spec.rate * spec.duration * 1.1) + 16);
  double t = 0.0;
  while (true) {
    const double next = t + rng.exponential(spec.rate);
    t = next > t ? next : std::nextafter(t, spec.duration + 1.0);
    if (t >= spec.duration) break;
    out.push_back(t, 1.0);
  }
  return out;
}

void CountProfile::validate() const {
  if (!(base_rate >= 0.0) || !std::isfinite(base_rate)) throw ValueError("count base_rate must be >= 0");
  if (!(diurnal_amplitude >= 0.0 && diurnal_amplitude <= 1.0)) {
    throw ValueError("count diurnal_amplitude must lie in [0, 1]");
  }
  require_positive(diurnal_period, "count diurnal_period");
  require_probability(burst_rate, "count burst_rate");
  if (!(burst_height >= 0.0)) throw ValueError("count burst_height must be >= 0");
  require_positive(burst_decay, "count burst_decay");
  if (length < 1) throw ValueError("count length must be >= 1");
}

Trace gen_count_series(const CountProfile& p, std::uint64_t seed) {
  p.validate();
  Rng rng = Rng::derive(seed, "count-series");
  const double keep = std::exp(-1.0 / p.burst_decay);
  double burst = 0.0;
  Trace out;
  out.reserve(p.length);
  for (std::size_t k = 0; k < p.length; ++k) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(k) / p.diurnal_period;
    burst *= keep;
    if (rng.bernoulli(p.burst_rate)) burst += p.burst_height * p.base_rate * rng.exponential(1.0);
    const double rate = std::max(0.0, p.base_rate * (1.0 + p.diurnal_amplitude * std::sin(phase)) + burst);
    out.push_back(60.0 * static_cast<double>(k), static_cast<double>(rng.poisson(rate)));
  }
  return out;
}

void CpuSpec::validate() const {
  if (length < 2) throw ValueError("cpu length must be >= 2");
  if (!(regime_length >= 1.0)) throw ValueError("cpu regime_length must be >= 1");
  if (!(level_min >= 0.0 && level_min <= level_max && level_max <= 1.0)) {
    throw ValueError("cpu levels must satisfy 0 <= level_min <= level_max <= 1");
  }
  if (!(ar_coeff >= 0.0 && ar_coeff < 1.0)) throw ValueError("cpu ar_coeff must lie in [0, 1)");
  if (!(ar_sd >= 0.0) || !(noise_sd >= 0.0) || !(spike_scale >= 0.0)) {
    throw ValueError("cpu noise scales must be >= 0");
  }
  require_probability(spike_prob, "cpu spike_prob");
}

SyntheticSeries gen_cpu_synthetic(const CpuSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng regime_rng = Rng::derive(seed, "cpu-regime");
  Rng wander_rng = Rng::derive(seed, "cpu-wander");
  Rng noise_rng = Rng::derive(seed, "cpu-noise");
  SyntheticSeries out;
  out.truth.reserve(spec.length);
  out.measured.reserve(spec.length);
  double level = regime_rng.uniform(spec.level_min, spec.level_max);
  double wander = 0.0;
  for (std::size_t k = 0; k < spec.length; ++k) {
    if (k > 0 && regime_rng.bernoulli(1.0 / spec.regime_length)) {
      level = regime_rng.uniform(spec.level_min, spec.level_max);
    }
    wander = spec.ar_coeff * wander + wander_rng.normal(0.0, spec.ar_sd);
    const double truth = std::clamp(level + wander, 0.0, 1.0);
    double measured = truth + noise_rng.normal(0.0, spec.noise_sd);
    if (noise_rng.bernoulli(spec.spike_prob)) measured += spec.spike_scale * noise_rng.exponential(1.0);
    const auto t = static_cast<double>(k);
    out.truth.push_back(t, truth);
    out.measured.push_back(t, std::clamp(measured, 0.0, 1.0));
  }
  return out;
}

void LossCurveSpec::validate() const {
  if (length < 2) throw ValueError("loss-curve length must be >= 2");
  if (!(initial >= floor) || !(floor >= 0.0)) throw ValueError("loss-curve needs initial >= floor >= 0");
  require_positive(decay, "loss-curve decay");
  if (!(noise >= 0.0) || !(spike_scale >= 0.0)) throw ValueError("loss-curve noise scales must be >= 0");
  require_probability(spike_prob, "loss-curve spike_prob");
  require_positive(spike_tail, "loss-curve spike_tail");
}

SyntheticSeries gen_loss_curve(const LossCurveSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = Rng::derive(seed, "loss-curve");
  SyntheticSeries out;
  out.truth.reserve(spec.length);
  out.measured.reserve(spec.length);
  for (std::size_t k = 0; k < spec.length; ++k) {
    const auto t = static_cast<double>(k);
    const double mean = spec.floor + (spec.initial - spec.floor) * std::exp(-t / spec.decay);
    double measured = mean * (1.0 + rng.normal(0.0, spec.noise));
    if (rng.bernoulli(spec.spike_prob)) {
      // Pareto(shape) excess over 1
      measured += spec.spike_scale * mean * (std::pow(1.0 - rng.uniform(), -1.0 / spec.spike_tail) - 1.0);
    }
    out.truth.push_back(t, mean);
    out.measured.push_back(t, std::max(0.0, measured));
  }
  return out;
}

void StepSpec::validate() const {
  if (length < 2 || step_at >= length) throw ValueError("step signal needs step_at < length");
  if (!std::isfinite(low) || !std::isfinite(high)) throw ValueError("step levels must be finite");
  if (!(noise_sd >= 0.0)) throw ValueError("step noise_sd must be >= 0");
}

SyntheticSeries gen_step_signal(const StepSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = Rng::derive(seed, "step-signal");
  SyntheticSeries out;
  out.truth.reserve(spec.length);
  out.measured.reserve(spec.length);
  for (std::size_t k = 0; k < spec.length; ++k) {
    const double truth = k < spec.step_at ? spec.low : spec.high;
    out.truth.push_back(static_cast<double>(k), truth);
    out.measured.push_back(static_cast<double>(k), truth + rng.normal(0.0, spec.noise_sd));
  }
  return out;
}

std::string format_trace_csv(const Trace& trace) {
  std::string out = "timestamp";
  if (trace.dim() <= 1) {
    out += ",value";
  } else {
    for (std::size_t j = 0; j < trace.dim(); ++j) out += ",v" + std::to_string(j);
  }
  out += '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += format_double(trace.time(i));
    const Vector& v = trace.value(i);
    for (Eigen::Index j = 0; j < v.size(); ++j) out += "," + format_double(v(j));
    out += '\n';
  }
  return out;
}

Trace parse_trace_csv(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t columns = 0;
  Trace out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (pos >= text.size()) break;
      throw ParseError("blank line", line_no);
    }
    const auto fields = split(line, ',');
    if (line_no == 1) {
      if (fields.size() < 2 || fields[0] != "timestamp") {
        throw ParseError("header must be 'timestamp,value' or 'timestamp,v0,...'", line_no);
      }
      columns = fields.size();
      continue;
    }
    if (fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    const double t = parse_number(fields[0], line_no);
    Vector v(static_cast<Eigen::Index>(columns - 1));
    for (std::size_t j = 1; j < columns; ++j) v(static_cast<Eigen::Index>(j - 1)) = parse_number(fields[j], line_no);
    try {
      out.push_back(t, v);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (line_no == 0) throw ParseError("empty trace file", 1);
  if (out.empty()) throw ParseError("trace file has no data rows", line_no + 1);
  return out;
}

void save_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  write_file_atomic(path, format_trace_csv(trace));
}

Trace load_trace_csv(const std::filesystem::path& path) { return parse_trace_csv(read_file(path)); }

}  // namespace akf
