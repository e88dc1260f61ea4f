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

#include "akf/autoscaler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <string>

#include "akf/error.hpp"
#include "akf/rng.hpp"

namespace akf {
namespace {

enum class EventType { kServiceComplete = 0, kScalingComplete = 1 };

struct Event {
  double t = 0.0;
  EventType type = EventType::kServiceComplete;
  std::size_t seq = 0;
  std::size_t broker = 0;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.type != b.type) return a.type > b.type;
    return a.seq > b.seq;
  }
};

struct Broker {
  std::deque<std::size_t> queue;  // message ids, FIFO
  bool busy = false;
};

}  // namespace

void ClusterConfig::validate() const {
  if (!(service_time_us > 0.0) || !std::isfinite(service_time_us)) {
    throw ValueError("service_time_us must be positive");
  }
  if (initial_brokers < 1) throw ValueError("initial_brokers must be >= 1");
}

void EstimatorConfig::validate() const {
  if (!(update_rate > 0.0 && update_rate <= 1.0)) throw ValueError("update_rate must lie in (0, 1]");
  if (!(threshold_us > 0.0)) throw ValueError("threshold_us must be > 0");
  if (!(scaling_duration_us >= 0.0) || !std::isfinite(scaling_duration_us)) {
    throw ValueError("scaling_duration_us must be >= 0");
  }
  if (!(jitter_sd_us >= 0.0) || !std::isfinite(jitter_sd_us)) throw ValueError("jitter_sd_us must be >= 0");
  model.validate();
}

std::size_t EstimatorConfig::update_every() const {
  return static_cast<std::size_t>(std::ceil(1.0 / update_rate - 1e-12));
}

ScalingTrace run_iteration(const Trace& workload, const ClusterConfig& cluster, const EstimatorConfig& cfg,
                           std::uint64_t seed, const AttentionParams* attention, std::size_t iteration) {
  cluster.validate();
  cfg.validate();
  if (workload.empty()) throw InsufficientDataError("run_iteration needs a non-empty workload");

  const std::size_t every = cfg.update_every();
  const std::size_t total = workload.size();
  auto estimator = make_series_estimator(cfg.kind, cfg.model, attention);
  Rng jitter = Rng::derive(seed, "latency-jitter");

  std::vector<Broker> brokers(cluster.initial_brokers);
  std::priority_queue<Event, std::vector<Event>, Later> events;
  std::size_t seq = 0;
  std::size_t next_arrival = 0;
  std::size_t round_robin = 0;
  bool paused = false;

  ScalingTrace out;
  out.iteration = iteration;
  out.messages.reserve(total);
  std::vector<MessageRecord> in_flight(total);

  auto send_us = [&](std::size_t i) { return workload.time(i) * 1e6; };
  auto try_start = [&](std::size_t b, double now) {
    Broker& broker = brokers[b];
    if (broker.busy || paused || broker.queue.empty()) return;
    broker.busy = true;
    events.push(Event{now + cluster.service_time_us, EventType::kServiceComplete, seq++, b});
  };

  while (next_arrival < total || !events.empty()) {
    const bool arrival_next =
        next_arrival < total && (events.empty() || send_us(next_arrival) < events.top().t);
    if (arrival_next) {
      const double now = send_us(next_arrival);
      const std::size_t b = round_robin++ % brokers.size();
      in_flight[next_arrival].send_us = now;
      in_flight[next_arrival].broker = b;
      brokers[b].queue.push_back(next_arrival);
      ++next_arrival;
      try_start(b, now);
      continue;
    }

    const Event ev = events.top();
    events.pop();
    if (ev.type == EventType::kScalingComplete) {
      paused = false;
      brokers.emplace_back();
      for (std::size_t b = 0; b < brokers.size(); ++b) try_start(b, ev.t);
      continue;
    }

    Broker& broker = brokers[ev.broker];
    const std::size_t id = broker.queue.front();
    broker.queue.pop_front();
    broker.busy = false;

    MessageRecord rec = in_flight[id];
    rec.deliver_us = ev.t;
    rec.latency_us = rec.deliver_us - rec.send_us;
    rec.measured_us = rec.latency_us + (cfg.jitter_sd_us > 0.0 ? jitter.normal(0.0, cfg.jitter_sd_us) : 0.0);
    const std::size_t notification = out.messages.size() + 1;
    const bool correct = notification % every == 0;
    if (correct) ++out.updates;
    estimator->step(ev.t, rec.measured_us, correct);
    rec.estimate_us = estimator->estimate();
    out.messages.push_back(rec);

    if (!out.event && out.updates >= cfg.warmup && rec.estimate_us > cfg.threshold_us) {
      ScalingEvent se;
      se.initiation_us = ev.t;
      se.completion_us = ev.t + cfg.scaling_duration_us;
      se.request_index = next_arrival;
      se.notification_index = notification;
      out.event = se;
      paused = true;
      events.push(Event{se.completion_us, EventType::kScalingComplete, seq++, 0});
    }
    try_start(ev.broker, ev.t);
  }
  out.brokers = brokers.size();
  return out;
}

SeriesModelConfig latency_model_defaults() {
  SeriesModelConfig m;
  m.level_noise = 1e-2;
  m.slope_noise = 1e-4;
  m.measurement_noise = 1600.0;  // 40 us jitter
  m.damping = 1.0;
  return m;
}

void WorkloadSpec::validate() const {
  if (kind == Kind::kPoisson) {
    PoissonSpec{rate, duration, 0}.validate();
  } else {
    counts.validate();
    if (!(bin_seconds > 0.0)) throw ValueError("bin_seconds must be > 0");
  }
}

Trace make_workload(const WorkloadSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (spec.kind == WorkloadSpec::Kind::kPoisson) {
    return gen_poisson_arrivals(PoissonSpec{spec.rate, spec.duration, Rng::derive_seed(seed, "workload")});
  }
  // Each count bin becomes that many arrivals spread uniformly over the bin.
  const Trace counts = gen_count_series(spec.counts, Rng::derive_seed(seed, "workload-counts"));
  Rng place = Rng::derive(seed, "workload-placement");
  std::vector<double> times;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const auto n = static_cast<std::size_t>(counts.value(k)(0));
    for (std::size_t i = 0; i < n; ++i) {
      times.push_back(spec.bin_seconds * (static_cast<double>(k) + place.uniform()));
    }
  }
  std::sort(times.begin(), times.end());
  Trace out;
  out.reserve(times.size());
  for (double t : times) {
    if (!out.empty() && t <= out.times().back()) continue;  // measure-zero collisions
    out.push_back(t, 1.0);
  }
  return out;
}

std::optional<double> population_variance(const std::vector<double>& values) {
  if (values.size() < 2) return std::nullopt;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size());
}

std::vector<StabilityResult> run_stability_experiment(const WorkloadSpec& workload, const ClusterConfig& cluster,
                                                      const std::vector<EstimatorConfig>& estimators,
                                                      std::size_t n_iter, std::uint64_t seed,
                                                      const AttentionParams* attention) {
  if (n_iter < 2) throw ValueError("n_iter must be >= 2");
  if (estimators.empty()) throw ValueError("stability experiment needs at least one estimator");
  std::vector<StabilityResult> results(estimators.size());
  for (std::size_t e = 0; e < estimators.size(); ++e) results[e].kind = estimators[e].kind;

  for (std::size_t i = 0; i < n_iter; ++i) {
    const std::uint64_t iteration_seed = Rng::derive_seed(seed, static_cast<std::uint64_t>(i));
    const Trace arrivals = make_workload(workload, iteration_seed);
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      const ScalingTrace trace = run_iteration(arrivals, cluster, estimators[e], iteration_seed, attention, i);
      IterationResult r;
      r.iteration = i;
      if (trace.event) {
        r.t_i_us = trace.event->initiation_us;
        r.t_i_requests = trace.event->request_index;
      } else {
        ++results[e].excluded;
      }
      results[e].iterations.push_back(r);
    }
  }

  for (auto& res : results) {
    std::vector<double> times;
    std::vector<double> requests;
    for (const auto& r : res.iterations) {
      if (!r.t_i_us) continue;
      times.push_back(*r.t_i_us);
      requests.push_back(static_cast<double>(*r.t_i_requests));
    }
    res.sigma_us2 = population_variance(times);
    res.sigma_requests = population_variance(requests);
  }
  return results;
}

LatencySegment pre_scaling_segment(const ScalingTrace& trace, std::size_t burn_in) {
  const std::size_t end = trace.event ? trace.event->notification_index : trace.messages.size();
  LatencySegment seg;
  for (std::size_t i = burn_in; i < end && i < trace.messages.size(); ++i) {
    const auto t = static_cast<double>(i);
    seg.measured.push_back(t, trace.messages[i].measured_us);
    seg.estimated.push_back(t, trace.messages[i].estimate_us);
  }
  return seg;
}

}  // namespace akf
