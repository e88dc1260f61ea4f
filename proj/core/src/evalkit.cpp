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

#include "akf/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "akf/error.hpp"
#include "akf/io.hpp"
#include "akf/rng.hpp"
#include "json.hpp"

namespace akf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Json = nlohmann::ordered_json;

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct SignalKindName {
  SignalSpec::Kind kind;
  std::string_view name;
};

constexpr SignalKindName kSignalKinds[] = {
    {SignalSpec::Kind::kMackeyGlass, "mackey-glass"}, {SignalSpec::Kind::kCpu, "cpu-synthetic"},
    {SignalSpec::Kind::kLossCurve, "loss-curve"},     {SignalSpec::Kind::kStep, "step"},
    {SignalSpec::Kind::kCounts, "counts"},            {SignalSpec::Kind::kTrace, "trace"},
};

}  // namespace

ErrorStats error_stats(const Vector& estimates, const Vector& truth) {
  if (estimates.size() != truth.size()) {
    throw DimensionError("error_stats: " + std::to_string(estimates.size()) + " estimates vs " +
                         std::to_string(truth.size()) + " truth values");
  }
  if (estimates.size() == 0) throw InsufficientDataError("error_stats needs at least one value");
  const Vector e = estimates - truth;
  const double n = static_cast<double>(e.size());
  ErrorStats s;
  s.nu = e.cwiseAbs().sum() / n;
  const double mean = e.sum() / n;
  s.rho = std::sqrt(std::max(0.0, (e.array() - mean).square().sum() / n));
  s.mse = e.squaredNorm() / n;
  s.rmse = std::sqrt(s.mse);
  return s;
}

ErrorStats error_stats(const Trace& estimates, const Trace& truth) {
  if (estimates.size() != truth.size() || estimates.dim() != truth.dim()) {
    throw DimensionError("error_stats: traces are not aligned");
  }
  const std::size_t d = truth.dim();
  Vector a(static_cast<Eigen::Index>(estimates.size() * d));
  Vector b(a.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    a.segment(static_cast<Eigen::Index>(i * d), static_cast<Eigen::Index>(d)) = estimates.value(i);
    b.segment(static_cast<Eigen::Index>(i * d), static_cast<Eigen::Index>(d)) = truth.value(i);
  }
  return error_stats(a, b);
}

RankTable rank_matrix(const std::vector<std::string>& rows, const std::vector<std::string>& cols,
                      const Matrix& values) {
  if (values.rows() != static_cast<Eigen::Index>(rows.size()) ||
      values.cols() != static_cast<Eigen::Index>(cols.size()) || rows.empty() || cols.empty()) {
    throw DimensionError("rank_matrix: value table does not match its labels");
  }
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (std::isnan(values(r, c))) {
        throw ValueError("rank_matrix: NaN in row '" + rows[static_cast<std::size_t>(r)] + "', column '" +
                         cols[static_cast<std::size_t>(c)] + "'");
      }
    }
  }
  const auto n = values.cols();
  RankTable t;
  t.rows = rows;
  t.cols = cols;
  t.scores = Matrix::Zero(values.rows(), n);
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    // worst first, so position p earns p + 1 points
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(r, a) > values(r, b); });
    std::size_t p = 0;
    while (p < order.size()) {
      std::size_t q = p;
      while (q + 1 < order.size() && values(r, order[q + 1]) == values(r, order[p])) ++q;
      const double points = (static_cast<double>(p + 1) + static_cast<double>(q + 1)) / 2.0;
      for (std::size_t k = p; k <= q; ++k) t.scores(r, order[k]) = points;
      p = q + 1;
    }
  }
  t.mean_rank = t.scores.colwise().mean().transpose();

  std::vector<std::vector<double>> sorted_scores(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < n; ++c) {
    auto& s = sorted_scores[static_cast<std::size_t>(c)];
    s.assign(t.scores.col(c).data(), t.scores.col(c).data() + t.scores.rows());
    std::sort(s.begin(), s.end(), std::greater<>());
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (t.mean_rank(a) != t.mean_rank(b)) return t.mean_rank(a) > t.mean_rank(b);
    return sorted_scores[static_cast<std::size_t>(a)] > sorted_scores[static_cast<std::size_t>(b)];
  });
  for (Eigen::Index c : order) t.ordering.push_back(cols[static_cast<std::size_t>(c)]);
  return t;
}

double residual_variance(const Trace& series) {
  if (series.size() < 3) throw InsufficientDataError("residual_variance needs at least 3 points");
  const Vector y = series.column(0);
  Vector x(y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = series.time(static_cast<std::size_t>(i));
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  if (!(sxx > 0.0)) throw ValueError("residual_variance: timestamps are degenerate");
  const double a = ((x.array() - mx) * (y.array() - my)).sum() / sxx;
  const double b = my - a * mx;
  return (y.array() - (a * x.array() + b)).square().mean();
}

double relative_error(const Vector& truth, const Vector& predictions) {
  if (truth.size() != predictions.size()) throw DimensionError("relative_error: length mismatch");
  if (truth.size() == 0) throw InsufficientDataError("relative_error needs at least one value");
  double total = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (!(truth(i) > 0.0)) {
      throw ValueError("relative_error: truth value at index " + std::to_string(i) + " is not positive");
    }
    total += std::fabs(predictions(i) - truth(i)) / truth(i);
  }
  return total / static_cast<double>(truth.size());
}

SeriesRun run_series(SeriesEstimator& estimator, const Trace& measured) {
  if (measured.dim() != 1) throw DimensionError("run_series expects a scalar trace");
  const auto n = static_cast<Eigen::Index>(measured.size());
  SeriesRun run{Vector::Constant(n, kNaN), Vector::Constant(n, kNaN)};
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0) run.predictions(k) = estimator.forecast();
    estimator.step(measured.time(static_cast<std::size_t>(k)), measured.value(static_cast<std::size_t>(k))(0));
    run.estimates(k) = estimator.estimate();
  }
  return run;
}

std::optional<std::size_t> convergence_latency(const Vector& predictions, const Vector& truth, std::size_t step_at,
                                               double step_height) {
  if (predictions.size() != truth.size()) throw DimensionError("convergence_latency: length mismatch");
  const double tol = 0.1 * std::fabs(step_height);
  for (auto k = static_cast<Eigen::Index>(step_at); k < truth.size(); ++k) {
    if (std::fabs(predictions(k) - truth(k)) < tol) return static_cast<std::size_t>(k) - step_at;
  }
  return std::nullopt;
}

std::string_view to_string(SignalSpec::Kind kind) noexcept {
  for (const auto& kn : kSignalKinds) {
    if (kn.kind == kind) return kn.name;
  }
  return "unknown";
}

SignalSpec::Kind parse_signal_kind(std::string_view name) {
  for (const auto& kn : kSignalKinds) {
    if (kn.name == name) return kn.kind;
  }
  std::string valid;
  for (const auto& kn : kSignalKinds) valid += (valid.empty() ? "" : ", ") + std::string(kn.name);
  throw ValidationError("unknown signal kind '" + std::string(name) + "'; valid kinds: " + valid);
}

SyntheticSeries make_signal(const SignalSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case SignalSpec::Kind::kMackeyGlass: {
      SyntheticSeries s;
      s.truth = gen_mackey_glass(spec.mg);
      s.measured = add_noise_snr(s.truth, spec.snr_db, Rng::derive_seed(seed, "mg-noise"));
      return s;
    }
    case SignalSpec::Kind::kCpu:
      return gen_cpu_synthetic(spec.cpu, seed);
    case SignalSpec::Kind::kLossCurve:
      return gen_loss_curve(spec.loss, seed);
    case SignalSpec::Kind::kStep:
      return gen_step_signal(spec.step, seed);
    case SignalSpec::Kind::kCounts: {
      Trace counts = gen_count_series(spec.counts, seed);
      return SyntheticSeries{counts, counts};
    }
    case SignalSpec::Kind::kTrace: {
      Trace t = load_trace_csv(spec.trace_path);
      if (t.dim() != 1) throw ValidationError("comparison traces must be scalar");
      return SyntheticSeries{t, t};
    }
  }
  throw ValueError("unhandled signal kind");
}

void ComparisonOptions::validate() const {
  if (!(train_fraction >= 0.0 && train_fraction < 1.0)) throw ValueError("train_fraction must lie in [0, 1)");
  if (epochs < 1) throw ValueError("epochs must be >= 1");
  if (!(lr > 0.0)) throw ValueError("lr must be > 0");
}

ComparisonReport run_comparison(const std::string& experiment, const std::vector<SignalSpec>& signals,
                                const std::vector<EstimatorKind>& estimators, const ComparisonOptions& options,
                                std::uint64_t seed) {
  std::vector<EstimatorSpec> specs;
  for (EstimatorKind k : estimators) specs.push_back(EstimatorSpec{k, {}, {}, {}, {}, {}});
  return run_comparison(experiment, signals, specs, options, seed);
}

ComparisonReport run_comparison(const std::string& experiment, const std::vector<SignalSpec>& signals,
                                const std::vector<EstimatorSpec>& estimators, const ComparisonOptions& options,
                                std::uint64_t seed) {
  options.validate();
  if (signals.empty() || estimators.empty()) throw ValueError("comparison needs signals and estimators");
  ComparisonReport report;
  report.experiment = experiment;
  report.seed = seed;

  std::vector<std::string> rows;
  std::vector<std::string> cols;
  for (const auto& e : estimators) cols.emplace_back(to_string(e.kind));
  Matrix table(static_cast<Eigen::Index>(2 * signals.size()), static_cast<Eigen::Index>(estimators.size()));

  for (std::size_t si = 0; si < signals.size(); ++si) {
    const SignalSpec& spec = signals[si];
    rows.push_back(spec.name + " nu");
    rows.push_back(spec.name + " rho");
    const SyntheticSeries signal = make_signal(spec, Rng::derive_seed(seed, "signal:" + spec.name));
    const std::size_t n = signal.measured.size();
    const auto train_len = static_cast<std::size_t>(options.train_fraction * static_cast<double>(n));
    const std::size_t eval_start = std::max<std::size_t>({options.burn_in, train_len, 1});
    if (eval_start >= n) throw InsufficientDataError("signal '" + spec.name + "' is too short to evaluate");
    const Vector truth = signal.truth.column(0);

    std::optional<AttentionParams> trained;
    const bool wants_attention =
        std::any_of(estimators.begin(), estimators.end(),
                    [](const EstimatorSpec& e) { return uses_attention(e.kind) && !e.attention; });
    if (wants_attention && train_len > spec.model.window) {
      Rng init = Rng::derive(seed, "attention-init:" + spec.name);
      const AttentionParams start =
          AttentionParams::init(spec.model.embed_dim, spec.model.embed_dim, spec.model.window, init);
      const Trace prefix = embed_trace(signal.measured.slice(0, train_len), spec.model.embed_dim);
      trained = attn_train(start, prefix, options.epochs, options.lr).params;
    }

    for (std::size_t ei = 0; ei < estimators.size(); ++ei) {
      EstimatorResult res;
      res.name = cols[ei];
      res.signal = spec.name;
      try {
        const EstimatorSpec& es = estimators[ei];
        SeriesModelConfig model = spec.model;
        model.seed = Rng::derive_seed(seed, "estimator:" + spec.name);
        if (es.pca_threshold) model.pca_threshold = es.pca_threshold;
        if (es.window) model.window = *es.window;
        if (es.ukf) model.ukf = *es.ukf;
        const AttentionParams* attention = es.attention ? &*es.attention : (trained ? &*trained : nullptr);
        auto est = make_series_estimator(es.kind, model, attention);
        const SeriesRun run = run_series(*est, signal.measured);
        const auto len = static_cast<Eigen::Index>(n - eval_start);
        const Vector pred = run.predictions.tail(len);
        res.stats = error_stats(pred, truth.tail(len));
        if (!std::isfinite(res.stats.nu)) throw NumericError("estimator produced non-finite predictions");
        for (std::size_t k = eval_start; k < n; ++k) {
          const double p = run.predictions(static_cast<Eigen::Index>(k));
          const double tv = truth(static_cast<Eigen::Index>(k));
          res.steps.push_back(StepRecord{signal.truth.time(k), tv, p, p - tv});
        }
        if (spec.kind == SignalSpec::Kind::kStep) {
          res.convergence_latency =
              convergence_latency(run.predictions, truth, spec.step.step_at, spec.step.high - spec.step.low);
        }
      } catch (const Error& e) {
        res.failure = e.what();
        res.stats = ErrorStats{kNaN, kNaN, kNaN, kNaN};
        res.steps.clear();
      }
      const double inf = std::numeric_limits<double>::infinity();
      table(static_cast<Eigen::Index>(2 * si), static_cast<Eigen::Index>(ei)) = res.failure ? inf : res.stats.nu;
      table(static_cast<Eigen::Index>(2 * si + 1), static_cast<Eigen::Index>(ei)) = res.failure ? inf : res.stats.rho;
      report.results.push_back(std::move(res));
    }
  }
  report.rank = rank_matrix(rows, cols, table);
  return report;
}

std::string report_to_json(const ComparisonReport& report) {
  Json j;
  j["experiment"] = report.experiment;
  j["seed"] = report.seed;
  Json list = Json::array();
  for (const auto& r : report.results) {
    Json e;
    e["name"] = r.name;
    e["signal"] = r.signal;
    e["nu"] = number_or_null(r.stats.nu);
    e["rho"] = number_or_null(r.stats.rho);
    e["mse"] = number_or_null(r.stats.mse);
    e["rmse"] = number_or_null(r.stats.rmse);
    e["convergence_latency"] = r.convergence_latency ? Json(*r.convergence_latency) : Json(nullptr);
    e["failure"] = r.failure ? Json(*r.failure) : Json(nullptr);
    list.push_back(std::move(e));
  }
  j["estimators"] = std::move(list);
  Json rank;
  rank["rows"] = report.rank.rows;
  rank["cols"] = report.rank.cols;
  Json scores = Json::array();
  for (Eigen::Index r = 0; r < report.rank.scores.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < report.rank.scores.cols(); ++c) row.push_back(report.rank.scores(r, c));
    scores.push_back(std::move(row));
  }
  rank["scores"] = std::move(scores);
  Json mean = Json::array();
  for (Eigen::Index c = 0; c < report.rank.mean_rank.size(); ++c) mean.push_back(report.rank.mean_rank(c));
  rank["mean_rank"] = std::move(mean);
  rank["ordering"] = report.rank.ordering;
  j["rank"] = std::move(rank);
  return j.dump(2) + "\n";
}

std::string steps_to_csv(const EstimatorResult& result) {
  std::string out = "t,truth,estimate,error\n";
  for (const auto& s : result.steps) {
    out += format_double(s.t) + "," + format_double(s.truth) + "," + format_double(s.estimate) + "," +
           format_double(s.error) + "\n";
  }
  return out;
}

}  // namespace akf
