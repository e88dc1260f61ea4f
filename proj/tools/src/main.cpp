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


// akf: command-line front end for the estimators, generators and the
// autoscaler simulation.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "akf/attention.hpp"
#include "akf/autoscaler.hpp"
#include "akf/error.hpp"
#include "akf/evalkit.hpp"
#include "akf/io.hpp"
#include "akf/rng.hpp"
#include "akf/series_estimators.hpp"
#include "akf/workloads.hpp"
#include "akf_cli/run_config.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int report_error(std::string_view kind, const std::string& message, int code) {
  Json j;
  j["error"] = std::string(kind);
  j["message"] = message;
  j["exit_code"] = code;
  std::cerr << j.dump() << "\n";
  return code;
}

// Signal and estimator names end up in file names.
std::string file_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out.empty() ? "_" : out;
}

void write_pair(const akf::SyntheticSeries& s, const std::string& out, const std::string& truth_out) {
  akf::save_trace_csv(s.measured, out);
  if (!truth_out.empty()) akf::save_trace_csv(s.truth, truth_out);
}

struct GenerateOptions {
  std::string out;
  std::string truth_out;
  std::uint64_t seed = 0;
  double snr_db = akf::kNoNoise;
  bool snr_set = false;
  akf::MgSpec mg;
  akf::PoissonSpec poisson{1000.0, 1.0, 0};
  akf::CountProfile counts;
  akf::CpuSpec cpu;
  akf::LossCurveSpec loss;
  akf::StepSpec step;
};

void add_generate(CLI::App& app, GenerateOptions& g) {
  CLI::App* gen = app.add_subcommand("generate", "Write a synthetic workload trace as CSV");
  gen->require_subcommand(1);

  auto common = [&g](CLI::App* c, bool has_truth) {
    c->add_option("--out", g.out, "Output CSV path")->required();
    c->add_option("--seed", g.seed, "Top-level seed")->capture_default_str();
    if (has_truth) c->add_option("--truth-out", g.truth_out, "Also write the noiseless series here");
  };

  CLI::App* mg = gen->add_subcommand("mackey-glass", "Mackey-Glass delay series");
  common(mg, true);
  mg->add_option("--tau", g.mg.tau, "Delay")->capture_default_str();
  mg->add_option("--beta", g.mg.beta, "Feedback gain")->capture_default_str();
  mg->add_option("--gamma", g.mg.gamma, "Decay rate")->capture_default_str();
  mg->add_option("--n-exp", g.mg.n_exp, "Exponent in the feedback term")->capture_default_str();
  mg->add_option("--dt", g.mg.dt, "Sample spacing")->capture_default_str();
  mg->add_option("--x0", g.mg.x0, "Constant history")->capture_default_str();
  mg->add_option("--length", g.mg.length, "Number of samples")->capture_default_str();
  mg->add_option("--snr-db", g.snr_db, "Add white noise at this SNR (default: none)")
      ->each([&g](const std::string&) { g.snr_set = true; });

  CLI::App* po = gen->add_subcommand("poisson", "Poisson arrival timestamps (value column is 1)");
  common(po, false);
  po->add_option("--rate", g.poisson.rate, "Events per second")->capture_default_str();
  po->add_option("--duration", g.poisson.duration, "Seconds")->capture_default_str();

  CLI::App* co = gen->add_subcommand("counts", "Per-minute event counts with diurnal cycle and bursts");
  common(co, false);
  co->add_option("--base-rate", g.counts.base_rate, "Mean count per minute")->capture_default_str();
  co->add_option("--diurnal-amplitude", g.counts.diurnal_amplitude, "Daily swing as a fraction of the base rate")->capture_default_str();
  co->add_option("--diurnal-period", g.counts.diurnal_period, "Minutes per cycle")->capture_default_str();
  co->add_option("--burst-rate", g.counts.burst_rate, "Burst probability per minute")->capture_default_str();
  co->add_option("--burst-height", g.counts.burst_height, "Burst peak as a multiple of the base rate")->capture_default_str();
  co->add_option("--burst-decay", g.counts.burst_decay, "Burst e-folding time in minutes")->capture_default_str();
  co->add_option("--length", g.counts.length, "Number of minutes")->capture_default_str();

  CLI::App* cpu = gen->add_subcommand("cpu-synthetic", "Regime-switching CPU utilisation with spikes");
  common(cpu, true);
  cpu->add_option("--length", g.cpu.length, "Number of samples")->capture_default_str();
  cpu->add_option("--regime-length", g.cpu.regime_length, "Mean steps between level switches")->capture_default_str();
  cpu->add_option("--level-min", g.cpu.level_min, "Lowest regime level")->capture_default_str();
  cpu->add_option("--level-max", g.cpu.level_max, "Highest regime level")->capture_default_str();
  cpu->add_option("--ar-coeff", g.cpu.ar_coeff, "AR(1) coefficient of the wander around the level")->capture_default_str();
  cpu->add_option("--ar-sd", g.cpu.ar_sd, "AR(1) innovation sd")->capture_default_str();
  cpu->add_option("--noise-sd", g.cpu.noise_sd, "Measurement noise sd")->capture_default_str();
  cpu->add_option("--spike-prob", g.cpu.spike_prob, "Spike probability per sample")->capture_default_str();
  cpu->add_option("--spike-scale", g.cpu.spike_scale, "Mean spike height")->capture_default_str();

  CLI::App* lc = gen->add_subcommand("loss-curve", "Decaying training-loss-like series with heavy-tailed spikes");
  common(lc, true);
  lc->add_option("--length", g.loss.length, "Number of samples")->capture_default_str();
  lc->add_option("--initial", g.loss.initial, "Starting loss")->capture_default_str();
  lc->add_option("--floor", g.loss.floor, "Asymptotic loss")->capture_default_str();
  lc->add_option("--decay", g.loss.decay, "Decay time in steps")->capture_default_str();
  lc->add_option("--noise", g.loss.noise, "Relative noise sd")->capture_default_str();
  lc->add_option("--spike-prob", g.loss.spike_prob, "Spike probability per step")->capture_default_str();
  lc->add_option("--spike-scale", g.loss.spike_scale, "Spike size relative to the current mean")->capture_default_str();
  lc->add_option("--spike-tail", g.loss.spike_tail, "Pareto shape of spike sizes")->capture_default_str();

  CLI::App* st = gen->add_subcommand("step", "Noisy step signal");
  common(st, true);
  st->add_option("--length", g.step.length, "Number of samples")->capture_default_str();
  st->add_option("--step-at", g.step.step_at, "Index of the first high sample")->capture_default_str();
  st->add_option("--low", g.step.low, "Level before the step")->capture_default_str();
  st->add_option("--high", g.step.high, "Level after the step")->capture_default_str();
  st->add_option("--noise-sd", g.step.noise_sd, "Gaussian noise sd")->capture_default_str();

  gen->final_callback([gen, &g] {
    const std::string which = gen->get_subcommands().front()->get_name();
    if (which == "mackey-glass") {
      akf::SyntheticSeries s;
      s.truth = akf::gen_mackey_glass(g.mg);
      s.measured = g.snr_set ? akf::add_noise_snr(s.truth, g.snr_db, akf::Rng::derive_seed(g.seed, "mg-noise"))
                             : s.truth;
      write_pair(s, g.out, g.truth_out);
    } else if (which == "poisson") {
      g.poisson.seed = g.seed;
      akf::save_trace_csv(akf::gen_poisson_arrivals(g.poisson), g.out);
    } else if (which == "counts") {
      akf::save_trace_csv(akf::gen_count_series(g.counts, g.seed), g.out);
    } else if (which == "cpu-synthetic") {
      write_pair(akf::gen_cpu_synthetic(g.cpu, g.seed), g.out, g.truth_out);
    } else if (which == "loss-curve") {
      write_pair(akf::gen_loss_curve(g.loss, g.seed), g.out, g.truth_out);
    } else {
      write_pair(akf::gen_step_signal(g.step, g.seed), g.out, g.truth_out);
    }
  });
}

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
};

akf::cli::RunConfig load_for(const RunOptions& o, akf::cli::RunKind expected) {
  akf::cli::RunConfig c = akf::cli::load_run_config(o.config);
  if (c.kind != expected) {
    throw akf::ValidationError("config kind is '" + std::string(akf::cli::to_string(c.kind)) + "', expected '" +
                               std::string(akf::cli::to_string(expected)) + "'");
  }
  if (o.seed) c.seed = *o.seed;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  return c;
}

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("--output-dir", o.output_dir, "Override the config output_dir");
}

void run_estimate(const RunOptions& o) {
  const akf::cli::RunConfig c = load_for(o, akf::cli::RunKind::kComparison);
  const fs::path base = fs::path(o.config).parent_path();
  const auto estimators = akf::cli::resolve_estimators(c, base);
  const akf::ComparisonReport report = akf::run_comparison(c.experiment, c.signals, estimators, c.comparison, c.seed);

  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  akf::write_file_atomic(dir / "config.json", akf::cli::serialize_run_config(c));
  akf::write_file_atomic(dir / "report.json", akf::report_to_json(report));
  const std::size_t per_signal = estimators.size();
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    const auto& r = report.results[i];
    const std::string name = "steps_" + file_token(r.signal) + "_" + std::to_string(i % per_signal) + "_" +
                             file_token(r.name) + ".csv";
    akf::write_file_atomic(dir / name, akf::steps_to_csv(r));
  }
  for (const auto& r : report.results) {
    if (r.failure) akf::warn(r.signal + " / " + r.name + " failed: " + *r.failure);
  }
}

std::string optional_number(const std::optional<double>& v) {
  return v ? akf::format_double(*v) : "no_event";
}

void run_scale_sim(const RunOptions& o) {
  const akf::cli::RunConfig c = load_for(o, akf::cli::RunKind::kScaleSim);
  const fs::path base = fs::path(o.config).parent_path();
  const auto configs = akf::cli::scale_sim_estimators(c);

  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  akf::write_file_atomic(dir / "config.json", akf::cli::serialize_run_config(c));

  Json summary;
  summary["experiment"] = c.experiment;
  summary["seed"] = c.seed;
  summary["n_iter"] = c.scale_sim.n_iter;
  Json list = Json::array();
  std::vector<std::pair<double, std::string>> ranked;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::optional<akf::AttentionParams> params;
    const auto& entry = c.estimators[i];
    if (!entry.attention_params.empty()) {
      fs::path p(entry.attention_params);
      if (p.is_relative()) p = base / p;
      params = akf::attention_params_from_json(akf::read_file(p));
    }
    // Each estimator runs on its own, but iteration seeds depend only on the
    // top-level seed, so all of them see the same arrivals and jitter.
    const akf::StabilityResult r = akf::run_stability_experiment(c.scale_sim.workload, c.scale_sim.cluster,
                                                                 {configs[i]}, c.scale_sim.n_iter, c.seed,
                                                                 params ? &*params : nullptr)
                                       .front();
    const std::string name(akf::to_string(r.kind));
    std::string csv = "iteration,t_i_us,t_i_requests\n";
    for (const auto& it : r.iterations) {
      csv += std::to_string(it.iteration) + "," + optional_number(it.t_i_us) + "," +
             (it.t_i_requests ? std::to_string(*it.t_i_requests) : std::string("no_event")) + "\n";
    }
    akf::write_file_atomic(dir / ("scaling_" + std::to_string(i) + "_" + file_token(name) + ".csv"), csv);

    Json e;
    e["name"] = name;
    e["sigma_us2"] = r.sigma_us2 ? Json(*r.sigma_us2) : Json(nullptr);
    e["sigma_requests"] = r.sigma_requests ? Json(*r.sigma_requests) : Json(nullptr);
    e["events"] = r.iterations.size() - r.excluded;
    e["excluded"] = r.excluded;
    list.push_back(std::move(e));
    if (r.sigma_us2) ranked.emplace_back(*r.sigma_us2, name);
  }
  summary["estimators"] = std::move(list);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  Json order = Json::array();
  for (const auto& [sigma, name] : ranked) order.push_back(name);
  summary["ordering"] = std::move(order);  // most stable first
  akf::write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
}

struct TrainOptions {
  std::string trace;
  std::string out;
  std::string loss_out;
  std::size_t epochs = 200;
  double lr = 1e-2;
  std::size_t window = 16;
  std::size_t embed_dim = 4;
  std::size_t hidden_dim = 0;
  std::string output = "softmax";
  std::uint64_t seed = 0;
};

void run_train(const TrainOptions& o) {
  const akf::Trace raw = akf::load_trace_csv(o.trace);
  const akf::Trace series = raw.dim() == 1 ? akf::embed_trace(raw, o.embed_dim) : raw;
  const std::size_t d_in = series.dim();
  akf::Rng rng = akf::Rng::derive(o.seed, "attention-init");
  akf::AttentionParams init = akf::AttentionParams::init(d_in, o.hidden_dim ? o.hidden_dim : d_in, o.window, rng);
  init.output = o.output == "ratio" ? akf::OutputNorm::kRatio : akf::OutputNorm::kSoftmax;
  const akf::TrainResult r = akf::attn_train(init, series, o.epochs, o.lr);
  akf::write_file_atomic(o.out, akf::attention_params_to_json(r.params));
  if (!o.loss_out.empty()) {
    std::string csv = "epoch,loss\n";
    for (std::size_t e = 0; e < r.loss.size(); ++e) csv += std::to_string(e) + "," + akf::format_double(r.loss[e]) + "\n";
    akf::write_file_atomic(o.loss_out, csv);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attention-fused Kalman estimators, workload generators and an autoscaler simulation"};
  app.require_subcommand(1);

  GenerateOptions gen;
  add_generate(app, gen);

  RunOptions estimate;
  CLI::App* est = app.add_subcommand("estimate", "Run an estimator comparison from a config");
  add_run_flags(est, estimate);
  est->final_callback([&estimate] { run_estimate(estimate); });

  RunOptions scale;
  CLI::App* sim = app.add_subcommand("scale-sim", "Run the threshold-autoscaler stability experiment");
  add_run_flags(sim, scale);
  sim->final_callback([&scale] { run_scale_sim(scale); });

  TrainOptions train;
  CLI::App* tr = app.add_subcommand("train-attention", "Fit attention weights to a trace");
  tr->add_option("--trace", train.trace, "Input trace CSV")->required()->check(CLI::ExistingFile);
  tr->add_option("--out", train.out, "Output params JSON")->required();
  tr->add_option("--loss-out", train.loss_out, "Per-epoch loss CSV");
  tr->add_option("--epochs", train.epochs, "Full-batch gradient steps")->capture_default_str()->check(CLI::PositiveNumber);
  tr->add_option("--lr", train.lr, "Gradient-descent step")->capture_default_str()->check(CLI::PositiveNumber);
  tr->add_option("--window", train.window, "Window length n")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  tr->add_option("--embed-dim", train.embed_dim, "Delay embedding width for scalar traces")
      ->capture_default_str()
      ->check(CLI::Range(1, 1 << 10));
  tr->add_option("--hidden-dim", train.hidden_dim, "Hidden width (0: same as the input width)")
      ->capture_default_str();
  tr->add_option("--output", train.output, "Output weight normalisation")
      ->capture_default_str()
      ->check(CLI::IsMember({"softmax", "ratio"}));
  tr->add_option("--seed", train.seed, "Initialisation seed")->capture_default_str();
  tr->final_callback([&train] { run_train(train); });

  std::string check_path;
  CLI::App* chk = app.add_subcommand("check-config", "Validate a config and print its canonical form");
  chk->add_option("--config", check_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  chk->final_callback([&check_path] { std::cout << akf::cli::serialize_run_config(akf::cli::load_run_config(check_path)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kExitUsage);
  } catch (const akf::NumericError& e) {
    return report_error(akf::to_string(e.kind()), e.what(), kExitNumeric);
  } catch (const akf::Error& e) {
    return report_error(akf::to_string(e.kind()), e.what(), kExitData);
  } catch (const fs::filesystem_error& e) {
    return report_error("io", e.what(), kExitData);
  }
  return kExitOk;
}
