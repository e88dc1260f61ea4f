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


#include "akf_cli/run_config.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "akf/error.hpp"
#include "akf/io.hpp"
#include "json.hpp"

namespace akf::cli {
namespace {

using Json = nlohmann::ordered_json;

// Walks one JSON object, remembering which keys were read so that anything
// left over can be reported as unknown.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "." + key; }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number()) throw ValidationError(at(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const Json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number()) throw ValidationError(at(key) + ": expected a number or null");
      out = v->get<double>();
    }
  }
  void count(const std::string& key, std::size_t& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ValidationError(at(key) + ": expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void optional_count(const std::string& key, std::optional<std::size_t>& out) {
    if (const Json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number_unsigned()) throw ValidationError(at(key) + ": expected a non-negative integer or null");
      out = v->get<std::size_t>();
    }
  }
  void seed(const std::string& key, std::uint64_t& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ValidationError(at(key) + ": expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void string(const std::string& key, std::string& out) {
    if (const Json* v = find(key)) {
      if (!v->is_string()) throw ValidationError(at(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  std::string required_string(const std::string& key) {
    if (!has(key)) throw ValidationError(at(key) + ": missing");
    std::string out;
    string(key, out);
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ValidationError(path_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Rewraps library errors so the message names the config path.
template <typename Fn>
void checked(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind("$", 0) == 0) throw;
    throw ValidationError(path + ": " + what);
  }
}

UkfConfig read_ukf(const Json& j, const std::string& path) {
  Fields f(j, path);
  UkfConfig u;
  f.number("alpha", u.alpha);
  f.number("beta", u.beta);
  f.number("kappa", u.kappa);
  f.finish();
  return u;
}

Json write_ukf(const UkfConfig& u) {
  Json j;
  j["alpha"] = u.alpha;
  j["beta"] = u.beta;
  j["kappa"] = u.kappa;
  return j;
}

SeriesModelConfig read_model(const Json& j, const std::string& path, SeriesModelConfig m) {
  Fields f(j, path);
  f.number("level_noise", m.level_noise);
  f.number("slope_noise", m.slope_noise);
  f.number("measurement_noise", m.measurement_noise);
  f.number("damping", m.damping);
  f.count("embed_dim", m.embed_dim);
  f.count("window", m.window);
  f.optional_number("pca_threshold", m.pca_threshold);
  if (const Json* u = f.find("ukf")) m.ukf = read_ukf(*u, f.at("ukf"));
  if (const Json* s = f.find("savgol")) {
    Fields g(*s, f.at("savgol"));
    g.count("window", m.savgol.window);
    g.count("degree", m.savgol.degree);
    g.finish();
  }
  f.seed("seed", m.seed);
  f.finish();
  checked(path, [&] { m.validate(); });
  return m;
}

Json write_model(const SeriesModelConfig& m) {
  Json j;
  j["level_noise"] = m.level_noise;
  j["slope_noise"] = m.slope_noise;
  j["measurement_noise"] = m.measurement_noise;
  j["damping"] = m.damping;
  j["embed_dim"] = m.embed_dim;
  j["window"] = m.window;
  j["pca_threshold"] = m.pca_threshold ? Json(*m.pca_threshold) : Json(nullptr);
  j["ukf"] = write_ukf(m.ukf);
  j["savgol"] = Json{{"window", m.savgol.window}, {"degree", m.savgol.degree}};
  j["seed"] = m.seed;
  return j;
}

CountProfile read_counts(const Json& j, const std::string& path) {
  Fields f(j, path);
  CountProfile c;
  f.number("base_rate", c.base_rate);
  f.number("diurnal_amplitude", c.diurnal_amplitude);
  f.number("diurnal_period", c.diurnal_period);
  f.number("burst_rate", c.burst_rate);
  f.number("burst_height", c.burst_height);
  f.number("burst_decay", c.burst_decay);
  f.count("length", c.length);
  f.finish();
  checked(path, [&] { c.validate(); });
  return c;
}

Json write_counts(const CountProfile& c) {
  Json j;
  j["base_rate"] = c.base_rate;
  j["diurnal_amplitude"] = c.diurnal_amplitude;
  j["diurnal_period"] = c.diurnal_period;
  j["burst_rate"] = c.burst_rate;
  j["burst_height"] = c.burst_height;
  j["burst_decay"] = c.burst_decay;
  j["length"] = c.length;
  return j;
}

// Key of the generator section that belongs to each signal kind.
const char* section_key(SignalSpec::Kind kind) {
  switch (kind) {
    case SignalSpec::Kind::kMackeyGlass:
      return "mackey_glass";
    case SignalSpec::Kind::kCpu:
      return "cpu";
    case SignalSpec::Kind::kLossCurve:
      return "loss_curve";
    case SignalSpec::Kind::kStep:
      return "step";
    case SignalSpec::Kind::kCounts:
      return "counts";
    case SignalSpec::Kind::kTrace:
      return "trace_path";
  }
  return "";
}

SignalSpec read_signal(const Json& j, const std::string& path) {
  Fields f(j, path);
  SignalSpec s;
  s.name = f.required_string("name");
  if (s.name.empty()) throw ValidationError(f.at("name") + ": must not be empty");
  const std::string kind = f.required_string("kind");
  checked(f.at("kind"), [&] { s.kind = parse_signal_kind(kind); });

  const std::string own = section_key(s.kind);
  for (const char* other : {"mackey_glass", "cpu", "loss_curve", "step", "counts", "trace_path"}) {
    if (own != other && f.has(other)) {
      throw ValidationError(f.at(other) + ": not valid for signal kind '" + kind + "'");
    }
  }
  if (s.kind != SignalSpec::Kind::kMackeyGlass && f.has("snr_db")) {
    throw ValidationError(f.at("snr_db") + ": only valid for mackey-glass signals");
  }

  switch (s.kind) {
    case SignalSpec::Kind::kMackeyGlass: {
      std::optional<double> snr = s.snr_db;
      f.optional_number("snr_db", snr);
      s.snr_db = snr.value_or(kNoNoise);
      if (const Json* v = f.find("mackey_glass")) {
        Fields g(*v, f.at("mackey_glass"));
        g.number("tau", s.mg.tau);
        g.number("beta", s.mg.beta);
        g.number("gamma", s.mg.gamma);
        g.number("n_exp", s.mg.n_exp);
        g.number("dt", s.mg.dt);
        g.number("x0", s.mg.x0);
        g.count("length", s.mg.length);
        g.finish();
        checked(g.at("mackey_glass"), [&] { s.mg.validate(); });
      }
      break;
    }
    case SignalSpec::Kind::kCpu:
      if (const Json* v = f.find("cpu")) {
        Fields g(*v, f.at("cpu"));
        g.count("length", s.cpu.length);
        g.number("regime_length", s.cpu.regime_length);
        g.number("level_min", s.cpu.level_min);
        g.number("level_max", s.cpu.level_max);
        g.number("ar_coeff", s.cpu.ar_coeff);
        g.number("ar_sd", s.cpu.ar_sd);
        g.number("noise_sd", s.cpu.noise_sd);
        g.number("spike_prob", s.cpu.spike_prob);
        g.number("spike_scale", s.cpu.spike_scale);
        g.finish();
        checked(f.at("cpu"), [&] { s.cpu.validate(); });
      }
      break;
    case SignalSpec::Kind::kLossCurve:
      if (const Json* v = f.find("loss_curve")) {
        Fields g(*v, f.at("loss_curve"));
        g.count("length", s.loss.length);
        g.number("initial", s.loss.initial);
        g.number("floor", s.loss.floor);
        g.number("decay", s.loss.decay);
        g.number("noise", s.loss.noise);
        g.number("spike_prob", s.loss.spike_prob);
        g.number("spike_scale", s.loss.spike_scale);
        g.number("spike_tail", s.loss.spike_tail);
        g.finish();
        checked(f.at("loss_curve"), [&] { s.loss.validate(); });
      }
      break;
    case SignalSpec::Kind::kStep:
      if (const Json* v = f.find("step")) {
        Fields g(*v, f.at("step"));
        g.count("length", s.step.length);
        g.count("step_at", s.step.step_at);
        g.number("low", s.step.low);
        g.number("high", s.step.high);
        g.number("noise_sd", s.step.noise_sd);
        g.finish();
        checked(f.at("step"), [&] { s.step.validate(); });
      }
      break;
    case SignalSpec::Kind::kCounts:
      if (const Json* v = f.find("counts")) s.counts = read_counts(*v, f.at("counts"));
      break;
    case SignalSpec::Kind::kTrace:
      s.trace_path = f.required_string("trace_path");
      if (s.trace_path.empty()) throw ValidationError(f.at("trace_path") + ": must not be empty");
      break;
  }
  if (const Json* m = f.find("model")) s.model = read_model(*m, f.at("model"), s.model);
  f.finish();
  return s;
}

Json write_signal(const SignalSpec& s) {
  Json j;
  j["name"] = s.name;
  j["kind"] = std::string(to_string(s.kind));
  switch (s.kind) {
    case SignalSpec::Kind::kMackeyGlass:
      j["snr_db"] = std::isfinite(s.snr_db) ? Json(s.snr_db) : Json(nullptr);
      j["mackey_glass"] = Json{{"tau", s.mg.tau},     {"beta", s.mg.beta}, {"gamma", s.mg.gamma},
                               {"n_exp", s.mg.n_exp}, {"dt", s.mg.dt},     {"x0", s.mg.x0},
                               {"length", s.mg.length}};
      break;
    case SignalSpec::Kind::kCpu:
      j["cpu"] = Json{{"length", s.cpu.length},       {"regime_length", s.cpu.regime_length},
                      {"level_min", s.cpu.level_min}, {"level_max", s.cpu.level_max},
                      {"ar_coeff", s.cpu.ar_coeff},   {"ar_sd", s.cpu.ar_sd},
                      {"noise_sd", s.cpu.noise_sd},   {"spike_prob", s.cpu.spike_prob},
                      {"spike_scale", s.cpu.spike_scale}};
      break;
    case SignalSpec::Kind::kLossCurve:
      j["loss_curve"] = Json{{"length", s.loss.length},         {"initial", s.loss.initial},
                             {"floor", s.loss.floor},           {"decay", s.loss.decay},
                             {"noise", s.loss.noise},           {"spike_prob", s.loss.spike_prob},
                             {"spike_scale", s.loss.spike_scale}, {"spike_tail", s.loss.spike_tail}};
      break;
    case SignalSpec::Kind::kStep:
      j["step"] = Json{{"length", s.step.length}, {"step_at", s.step.step_at}, {"low", s.step.low},
                       {"high", s.step.high},     {"noise_sd", s.step.noise_sd}};
      break;
    case SignalSpec::Kind::kCounts:
      j["counts"] = write_counts(s.counts);
      break;
    case SignalSpec::Kind::kTrace:
      j["trace_path"] = s.trace_path;
      break;
  }
  j["model"] = write_model(s.model);
  return j;
}

EstimatorEntry read_estimator(const Json& j, const std::string& path) {
  EstimatorEntry e;
  // Shorthand: a bare kind name.
  if (j.is_string()) {
    checked(path, [&] { e.kind = parse_estimator_kind(j.get<std::string>()); });
    return e;
  }
  Fields f(j, path);
  const std::string kind = f.required_string("kind");
  checked(f.at("kind"), [&] { e.kind = parse_estimator_kind(kind); });
  f.optional_number("pca_threshold", e.pca_threshold);
  if (e.pca_threshold && !(*e.pca_threshold >= 0.0)) {
    throw ValidationError(f.at("pca_threshold") + ": must be >= 0");
  }
  f.optional_count("window", e.window);
  if (e.window && *e.window < 2) throw ValidationError(f.at("window") + ": must be >= 2");
  if (const Json* u = f.find("ukf")) {
    if (!u->is_null()) e.ukf = read_ukf(*u, f.at("ukf"));
  }
  f.string("attention_params", e.attention_params);
  if (!e.attention_params.empty() && !uses_attention(e.kind)) {
    throw ValidationError(f.at("attention_params") + ": estimator " + kind + " does not use attention");
  }
  f.finish();
  return e;
}

Json write_estimator(const EstimatorEntry& e) {
  Json j;
  j["kind"] = std::string(to_string(e.kind));
  j["pca_threshold"] = e.pca_threshold ? Json(*e.pca_threshold) : Json(nullptr);
  j["window"] = e.window ? Json(*e.window) : Json(nullptr);
  j["ukf"] = e.ukf ? write_ukf(*e.ukf) : Json(nullptr);
  j["attention_params"] = e.attention_params;
  return j;
}

WorkloadSpec read_workload(const Json& j, const std::string& path) {
  Fields f(j, path);
  WorkloadSpec w;
  const std::string kind = f.required_string("kind");
  if (kind == "poisson") {
    w.kind = WorkloadSpec::Kind::kPoisson;
    for (const char* k : {"bin_seconds", "counts"}) {
      if (f.has(k)) throw ValidationError(f.at(k) + ": not valid for a poisson workload");
    }
    f.number("rate", w.rate);
    f.number("duration", w.duration);
  } else if (kind == "counts") {
    w.kind = WorkloadSpec::Kind::kCounts;
    for (const char* k : {"rate", "duration"}) {
      if (f.has(k)) throw ValidationError(f.at(k) + ": not valid for a counts workload");
    }
    f.number("bin_seconds", w.bin_seconds);
    if (const Json* c = f.find("counts")) w.counts = read_counts(*c, f.at("counts"));
  } else {
    throw ValidationError(f.at("kind") + ": unknown workload '" + kind + "' (valid: poisson, counts)");
  }
  f.finish();
  checked(path, [&] { w.validate(); });
  return w;
}

Json write_workload(const WorkloadSpec& w) {
  Json j;
  if (w.kind == WorkloadSpec::Kind::kPoisson) {
    j["kind"] = "poisson";
    j["rate"] = w.rate;
    j["duration"] = w.duration;
  } else {
    j["kind"] = "counts";
    j["bin_seconds"] = w.bin_seconds;
    j["counts"] = write_counts(w.counts);
  }
  return j;
}

ScaleSimConfig read_scale_sim(const Json& j, const std::string& path) {
  Fields f(j, path);
  ScaleSimConfig s;
  if (const Json* w = f.find("workload")) s.workload = read_workload(*w, f.at("workload"));
  if (const Json* c = f.find("cluster")) {
    Fields g(*c, f.at("cluster"));
    g.number("service_time_us", s.cluster.service_time_us);
    g.count("initial_brokers", s.cluster.initial_brokers);
    g.finish();
    checked(f.at("cluster"), [&] { s.cluster.validate(); });
  }
  f.count("n_iter", s.n_iter);
  f.number("threshold_us", s.threshold_us);
  f.number("update_rate", s.update_rate);
  f.number("scaling_duration_us", s.scaling_duration_us);
  f.number("jitter_sd_us", s.jitter_sd_us);
  f.count("warmup", s.warmup);
  if (const Json* m = f.find("model")) s.model = read_model(*m, f.at("model"), s.model);
  f.finish();
  if (s.n_iter < 2) throw ValidationError(f.at("n_iter") + ": need at least 2 iterations for a variance");
  EstimatorConfig probe;
  probe.update_rate = s.update_rate;
  probe.threshold_us = s.threshold_us;
  probe.scaling_duration_us = s.scaling_duration_us;
  probe.jitter_sd_us = s.jitter_sd_us;
  probe.warmup = s.warmup;
  probe.model = s.model;
  checked(path, [&] { probe.validate(); });
  return s;
}

Json write_scale_sim(const ScaleSimConfig& s) {
  Json j;
  j["workload"] = write_workload(s.workload);
  j["cluster"] = Json{{"service_time_us", s.cluster.service_time_us},
                      {"initial_brokers", s.cluster.initial_brokers}};
  j["n_iter"] = s.n_iter;
  j["threshold_us"] = s.threshold_us;
  j["update_rate"] = s.update_rate;
  j["scaling_duration_us"] = s.scaling_duration_us;
  j["jitter_sd_us"] = s.jitter_sd_us;
  j["warmup"] = s.warmup;
  j["model"] = write_model(s.model);
  return j;
}

SeriesModelConfig with_overrides(SeriesModelConfig m, const EstimatorEntry& e) {
  if (e.pca_threshold) m.pca_threshold = e.pca_threshold;
  if (e.window) m.window = *e.window;
  if (e.ukf) m.ukf = *e.ukf;
  return m;
}

}  // namespace

std::string_view to_string(RunKind kind) noexcept {
  return kind == RunKind::kComparison ? "comparison" : "scale-sim";
}

void RunConfig::validate() const {
  if (experiment.empty()) throw ValidationError("experiment: must not be empty");
  if (output_dir.empty()) throw ValidationError("output_dir: must not be empty");
  if (estimators.empty()) throw ValidationError("estimators: need at least one estimator");
  if (kind == RunKind::kComparison) {
    if (signals.empty()) throw ValidationError("signals: need at least one signal");
    std::set<std::string> names;
    for (const auto& s : signals) {
      if (!names.insert(s.name).second) throw ValidationError("signals: duplicate name '" + s.name + "'");
    }
    checked("comparison", [&] { comparison.validate(); });
  }
}

RunConfig parse_run_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports a byte offset; turn it into a line number.
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) line += text[i] == '\n';
    throw ParseError(e.what(), line);
  }
  Fields f(j, "$");
  RunConfig c;
  const std::string kind = f.required_string("kind");
  if (kind == "comparison") {
    c.kind = RunKind::kComparison;
    if (f.has("scale_sim")) throw ValidationError("$.scale_sim: not valid for a comparison run");
  } else if (kind == "scale-sim") {
    c.kind = RunKind::kScaleSim;
    for (const char* k : {"signals", "comparison"}) {
      if (f.has(k)) throw ValidationError(f.at(k) + ": not valid for a scale-sim run");
    }
  } else {
    throw ValidationError("$.kind: unknown run kind '" + kind + "' (valid: comparison, scale-sim)");
  }
  f.string("experiment", c.experiment);
  f.seed("seed", c.seed);
  f.string("output_dir", c.output_dir);
  if (const Json* s = f.find("signals")) {
    if (!s->is_array()) throw ValidationError("$.signals: expected an array");
    for (std::size_t i = 0; i < s->size(); ++i) {
      c.signals.push_back(read_signal((*s)[i], "$.signals[" + std::to_string(i) + "]"));
    }
  }
  if (const Json* e = f.find("estimators")) {
    if (!e->is_array()) throw ValidationError("$.estimators: expected an array");
    for (std::size_t i = 0; i < e->size(); ++i) {
      c.estimators.push_back(read_estimator((*e)[i], "$.estimators[" + std::to_string(i) + "]"));
    }
  }
  if (const Json* o = f.find("comparison")) {
    Fields g(*o, "$.comparison");
    g.count("burn_in", c.comparison.burn_in);
    g.number("train_fraction", c.comparison.train_fraction);
    g.count("epochs", c.comparison.epochs);
    g.number("lr", c.comparison.lr);
    g.finish();
  }
  if (const Json* s = f.find("scale_sim")) c.scale_sim = read_scale_sim(*s, "$.scale_sim");
  f.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_file(path)); }

std::string serialize_run_config(const RunConfig& c) {
  Json j;
  j["kind"] = std::string(to_string(c.kind));
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  if (c.kind == RunKind::kComparison) {
    Json signals = Json::array();
    for (const auto& s : c.signals) signals.push_back(write_signal(s));
    j["signals"] = std::move(signals);
  }
  Json estimators = Json::array();
  for (const auto& e : c.estimators) estimators.push_back(write_estimator(e));
  j["estimators"] = std::move(estimators);
  if (c.kind == RunKind::kComparison) {
    j["comparison"] = Json{{"burn_in", c.comparison.burn_in},
                           {"train_fraction", c.comparison.train_fraction},
                           {"epochs", c.comparison.epochs},
                           {"lr", c.comparison.lr}};
  } else {
    j["scale_sim"] = write_scale_sim(c.scale_sim);
  }
  return j.dump(2) + "\n";
}

std::vector<EstimatorSpec> resolve_estimators(const RunConfig& config, const std::filesystem::path& base_dir) {
  std::vector<EstimatorSpec> out;
  for (const auto& e : config.estimators) {
    EstimatorSpec s;
    s.kind = e.kind;
    s.pca_threshold = e.pca_threshold;
    s.window = e.window;
    s.ukf = e.ukf;
    if (!e.attention_params.empty()) {
      std::filesystem::path p(e.attention_params);
      if (p.is_relative()) p = base_dir / p;
      s.attention = attention_params_from_json(read_file(p));
      s.attention_path = e.attention_params;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<EstimatorConfig> scale_sim_estimators(const RunConfig& config) {
  std::vector<EstimatorConfig> out;
  const ScaleSimConfig& s = config.scale_sim;
  for (const auto& e : config.estimators) {
    EstimatorConfig ec;
    ec.kind = e.kind;
    ec.update_rate = s.update_rate;
    ec.threshold_us = s.threshold_us;
    ec.scaling_duration_us = s.scaling_duration_us;
    ec.jitter_sd_us = s.jitter_sd_us;
    ec.warmup = s.warmup;
    ec.model = with_overrides(s.model, e);
    ec.validate();
    out.push_back(std::move(ec));
  }
  return out;
}

}  // namespace akf::cli
