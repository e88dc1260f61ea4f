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

#include "akf/series_estimators.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <string>

#include "akf/error.hpp"

namespace akf {
namespace {

struct KindName {
  EstimatorKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 13> kKindNames{{
    {EstimatorKind::kPassive, "PASSIVE"},
    {EstimatorKind::kSavgol, "SAVGOL"},
    {EstimatorKind::kKf, "KF"},
    {EstimatorKind::kEkf, "EKF"},
    {EstimatorKind::kUkf, "UKF"},
    {EstimatorKind::kCkf, "CKF"},
    {EstimatorKind::kEkfPca, "EKF-PCA"},
    {EstimatorKind::kEkfPcaLs, "EKF-PCA-LS"},
    {EstimatorKind::kUkfPca, "UKF-PCA"},
    {EstimatorKind::kJointEkfPca, "JOINT-EKF-PCA"},
    {EstimatorKind::kJointUkfPca, "JOINT-UKF-PCA"},
    {EstimatorKind::kAkf, "AKF"},
    {EstimatorKind::kAkfPca, "AKF-PCA"},
}};

Matrix transition(double damping) {
  Matrix A(2, 2);
  A << 1.0, damping, 0.0, damping;
  return A;
}

Matrix embedding_matrix(std::size_t d) {
  Matrix H(static_cast<Eigen::Index>(d), 2);
  for (Eigen::Index j = 0; j < H.rows(); ++j) {
    H(j, 0) = 1.0;
    H(j, 1) = -static_cast<double>(j);
  }
  return H;
}

StateEstimate initial_state(const SeriesModelConfig& cfg, double z) {
  Vector x(2);
  x << z, 0.0;
  return StateEstimate{x, Matrix::Identity(2, 2) * cfg.measurement_noise, 0};
}

class PassiveEstimator final : public SeriesEstimator {
 public:
  EstimatorKind kind() const noexcept override { return EstimatorKind::kPassive; }
  void step(double, double z, bool correct) override {
    ++steps_;
    if (correct || corrections_ == 0) {
      value_ = passive_step(Vector::Constant(1, z))(0);
      ++corrections_;
    }
  }
  double estimate() const override { return value_; }
  double forecast() const override { return value_; }

 private:
  double value_ = 0.0;
};

class SavgolEstimator final : public SeriesEstimator {
 public:
  explicit SavgolEstimator(const SavgolSpec& spec) : kernel_(savgol_causal_kernel(spec)) {}
  EstimatorKind kind() const noexcept override { return EstimatorKind::kSavgol; }
  void step(double, double z, bool correct) override {
    ++steps_;
    history_.push_back(z);
    if (history_.size() > static_cast<std::size_t>(kernel_.size())) history_.pop_front();
    if (!correct && corrections_ > 0) return;
    ++corrections_;
    if (history_.size() < static_cast<std::size_t>(kernel_.size())) {
      value_ = z;
      return;
    }
    value_ = 0.0;
    for (Eigen::Index i = 0; i < kernel_.size(); ++i) value_ += kernel_(i) * history_[static_cast<std::size_t>(i)];
  }
  double estimate() const override { return value_; }
  double forecast() const override { return value_; }

 private:
  Vector kernel_;
  std::deque<double> history_;
  double value_ = 0.0;
};

// Shared plumbing for the state-space estimators: lazy start, level/slope
// readout, delay embedding and the periodically refitted PCA.
class StateSpaceEstimator : public SeriesEstimator {
 public:
  explicit StateSpaceEstimator(const SeriesModelConfig& cfg)
      : cfg_(cfg),
        scalar_(series_scalar_model(cfg)),
        embedded_(series_embedded_model(cfg)),
        pca_window_(cfg.window),
        pca_(PcaModel::identity(cfg.embed_dim)) {}

  void step(double t, double z, bool correct) final {
    ++steps_;
    push_history(t, z);
    if (!started_) {
      started_ = true;
      start(initial_state(cfg_, z));
      ++corrections_;
      return;
    }
    if (correct) {
      ++corrections_;
      update(t, z);
    } else {
      predict();
    }
  }

  double estimate() const final { return current().x(0); }
  double forecast() const final {
    const Vector& x = current().x;
    return x(0) + cfg_.damping * x(1);
  }

 protected:
  virtual void start(const StateEstimate& s) = 0;
  virtual void update(double t, double z) = 0;
  virtual void predict() = 0;
  virtual const StateEstimate& current() const = 0;

  const Vector& embedded() const { return embedding_; }

  SeriesModelConfig cfg_;
  NonlinearModel scalar_;
  NonlinearModel embedded_;
  MeasurementWindow pca_window_;
  PcaModel pca_;

 private:
  void push_history(double t, double z) {
    history_.push_front(z);
    if (history_.size() > cfg_.embed_dim) history_.pop_back();
    embedding_.resize(static_cast<Eigen::Index>(cfg_.embed_dim));
    for (std::size_t j = 0; j < cfg_.embed_dim; ++j) {
      embedding_(static_cast<Eigen::Index>(j)) = history_[std::min(j, history_.size() - 1)];
    }
    pca_window_.push(t, embedding_);
    if (++since_fit_ == cfg_.window) {
      since_fit_ = 0;
      pca_ = pca_fit(pca_window_, cfg_.threshold());
    }
  }

  bool started_ = false;
  std::deque<double> history_;  // newest first
  Vector embedding_;
  std::size_t since_fit_ = 0;
};

class PlainFilterEstimator final : public StateSpaceEstimator {
 public:
  PlainFilterEstimator(EstimatorKind kind, const SeriesModelConfig& cfg)
      : StateSpaceEstimator(cfg), kind_(kind), linear_(series_linear_model(cfg)) {}
  EstimatorKind kind() const noexcept override { return kind_; }

 protected:
  void start(const StateEstimate& s) override { state_ = s; }
  void predict() override { state_ = prior(); }
  void update(double, double z) override {
    const Vector zv = Vector::Constant(1, z);
    const StateEstimate p = prior();
    switch (kind_) {
      case EstimatorKind::kKf:
        state_ = kf_correct(p, linear_, zv).posterior;
        break;
      case EstimatorKind::kEkf:
        state_ = ekf_correct(p, scalar_, zv).posterior;
        break;
      case EstimatorKind::kUkf:
        state_ = ukf_correct(p, scalar_, cfg_.ukf, zv).posterior;
        break;
      default:
        state_ = ckf_correct(p, scalar_, zv).posterior;
        break;
    }
  }
  const StateEstimate& current() const override { return state_; }

 private:
  StateEstimate prior() const {
    switch (kind_) {
      case EstimatorKind::kKf:
        return kf_predict(state_, linear_);
      case EstimatorKind::kEkf:
        return ekf_predict(state_, scalar_);
      case EstimatorKind::kUkf:
        return ukf_predict(state_, scalar_, cfg_.ukf);
      default:
        return ckf_predict(state_, scalar_);
    }
  }

  EstimatorKind kind_;
  LinearModel linear_;
  StateEstimate state_;
};

class PcaEstimator final : public StateSpaceEstimator {
 public:
  PcaEstimator(EstimatorKind kind, const SeriesModelConfig& cfg) : StateSpaceEstimator(cfg), kind_(kind) {}
  EstimatorKind kind() const noexcept override { return kind_; }

 protected:
  void start(const StateEstimate& s) override { state_ = PcaFilterState::start(s); }
  void predict() override {
    state_.estimate = kind_ == EstimatorKind::kUkfPca ? ukf_predict(state_.estimate, embedded_, cfg_.ukf)
                                                      : ekf_predict(state_.estimate, embedded_);
  }
  void update(double, double) override {
    switch (kind_) {
      case EstimatorKind::kEkfPcaLs:
        state_ = kfpca_step_ls(state_, embedded_, pca_, embedded());
        break;
      case EstimatorKind::kUkfPca:
        state_ = ukfpca_step(state_, embedded_, pca_, cfg_.ukf, embedded());
        break;
      default:
        state_ = kfpca_step_lin(state_, embedded_, pca_, embedded());
        break;
    }
  }
  const StateEstimate& current() const override { return state_.estimate; }

 private:
  EstimatorKind kind_;
  PcaFilterState state_;
};

class JointSeriesEstimator final : public StateSpaceEstimator {
 public:
  JointSeriesEstimator(EstimatorKind kind, const SeriesModelConfig& cfg) : StateSpaceEstimator(cfg), kind_(kind) {
    options_.unscented = kind == EstimatorKind::kJointUkfPca;
    options_.ukf = cfg.ukf;
  }
  EstimatorKind kind() const noexcept override { return kind_; }

 protected:
  void start(const StateEstimate& s) override { state_ = JointEstimate::start(s); }
  void predict() override {
    if (options_.unscented) {
      state_.branch_filter = ukf_predict(state_.branch_filter, scalar_, cfg_.ukf);
      state_.branch_pca.estimate = ukf_predict(state_.branch_pca.estimate, embedded_, cfg_.ukf);
    } else {
      state_.branch_filter = ekf_predict(state_.branch_filter, scalar_);
      state_.branch_pca.estimate = ekf_predict(state_.branch_pca.estimate, embedded_);
    }
  }
  // Plain branch on the raw sample, PCA branch on the embedding.
  void update(double, double z) override {
    state_ = joint_step(state_, scalar_, Vector::Constant(1, z), embedded_, pca_, embedded(), options_);
  }
  const StateEstimate& current() const override { return state_.estimate(); }

 private:
  EstimatorKind kind_;
  JointOptions options_;
  JointEstimate state_;
};

class AttentionEstimator final : public StateSpaceEstimator {
 public:
  AttentionEstimator(EstimatorKind kind, const SeriesModelConfig& cfg, AttentionParams params)
      : StateSpaceEstimator(cfg), kind_(kind), params_(std::move(params)), window_(params_.window) {
    params_.validate();
    if (params_.input_dim() != cfg.embed_dim) {
      throw DimensionError("attention input width " + std::to_string(params_.input_dim()) +
                           " != embedding dimension " + std::to_string(cfg.embed_dim));
    }
  }
  EstimatorKind kind() const noexcept override { return kind_; }

 protected:
  void start(const StateEstimate& s) override {
    state_ = PcaFilterState::start(s);
    window_.push(0.0, embedded());
  }
  void predict() override {
    window_.push(static_cast<double>(steps_), embedded());
    state_.estimate = ekf_predict(state_.estimate, embedded_);
  }
  void update(double, double) override {
    window_.push(static_cast<double>(steps_), embedded());
    const Vector z = window_.full() ? attn_forward(params_, window_).z_fused : embedded();
    if (kind_ == EstimatorKind::kAkf) {
      state_.estimate = ekf_step(state_.estimate, embedded_, z);
    } else {
      state_ = kfpca_step_lin(state_, embedded_, pca_, z);
    }
  }
  const StateEstimate& current() const override { return state_.estimate; }

 private:
  EstimatorKind kind_;
  AttentionParams params_;
  MeasurementWindow window_;
  PcaFilterState state_;
};

}  // namespace

std::string_view to_string(EstimatorKind kind) noexcept {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "UNKNOWN";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  for (const auto& kn : kKindNames) {
    if (kn.name == name) return kn.kind;
  }
  std::string valid;
  for (const auto& kn : kKindNames) valid += (valid.empty() ? "" : ", ") + std::string(kn.name);
  throw ValidationError("unknown estimator '" + std::string(name) + "'; valid kinds: " + valid);
}

const std::vector<EstimatorKind>& all_estimator_kinds() {
  static const std::vector<EstimatorKind> kinds = [] {
    std::vector<EstimatorKind> out;
    for (const auto& kn : kKindNames) out.push_back(kn.kind);
    return out;
  }();
  return kinds;
}

bool uses_attention(EstimatorKind kind) noexcept {
  return kind == EstimatorKind::kAkf || kind == EstimatorKind::kAkfPca;
}

void SeriesModelConfig::validate() const {
  if (!(level_noise >= 0.0) || !(slope_noise >= 0.0)) throw ValueError("process noise must be >= 0");
  if (!(measurement_noise > 0.0)) throw ValueError("measurement_noise must be > 0");
  if (!(damping >= 0.0 && damping <= 1.0)) throw ValueError("damping must lie in [0, 1]");
  if (embed_dim < 2) throw ValueError("embed_dim must be >= 2");
  if (window < 2) throw ValueError("window must be >= 2");
  if (pca_threshold && !(*pca_threshold >= 0.0)) throw ValueError("pca_threshold must be >= 0");
  ukf.validate(2);
  savgol.validate();
}

LinearModel series_linear_model(const SeriesModelConfig& cfg) {
  cfg.validate();
  LinearModel m;
  m.A = transition(cfg.damping);
  m.H = Matrix(1, 2);
  m.H << 1.0, 0.0;
  m.Q = Vector(Eigen::Vector2d(cfg.level_noise, cfg.slope_noise)).asDiagonal();
  m.R = Matrix::Constant(1, 1, cfg.measurement_noise);
  return m;
}

NonlinearModel series_scalar_model(const SeriesModelConfig& cfg) {
  return NonlinearModel::from_linear(series_linear_model(cfg));
}

NonlinearModel series_embedded_model(const SeriesModelConfig& cfg) {
  LinearModel m = series_linear_model(cfg);
  m.H = embedding_matrix(cfg.embed_dim);
  m.R = Matrix::Identity(static_cast<Eigen::Index>(cfg.embed_dim), static_cast<Eigen::Index>(cfg.embed_dim)) *
        cfg.measurement_noise;
  return NonlinearModel::from_linear(m);
}

std::unique_ptr<SeriesEstimator> make_series_estimator(EstimatorKind kind, const SeriesModelConfig& cfg,
                                                       const AttentionParams* attention) {
  cfg.validate();
  switch (kind) {
    case EstimatorKind::kPassive:
      return std::make_unique<PassiveEstimator>();
    case EstimatorKind::kSavgol:
      return std::make_unique<SavgolEstimator>(cfg.savgol);
    case EstimatorKind::kKf:
    case EstimatorKind::kEkf:
    case EstimatorKind::kUkf:
    case EstimatorKind::kCkf:
      return std::make_unique<PlainFilterEstimator>(kind, cfg);
    case EstimatorKind::kEkfPca:
    case EstimatorKind::kEkfPcaLs:
    case EstimatorKind::kUkfPca:
      return std::make_unique<PcaEstimator>(kind, cfg);
    case EstimatorKind::kJointEkfPca:
    case EstimatorKind::kJointUkfPca:
      return std::make_unique<JointSeriesEstimator>(kind, cfg);
    case EstimatorKind::kAkf:
    case EstimatorKind::kAkfPca: {
      if (attention != nullptr) return std::make_unique<AttentionEstimator>(kind, cfg, *attention);
      Rng rng = Rng::derive(cfg.seed, "attention-init");
      return std::make_unique<AttentionEstimator>(kind, cfg,
                                                  AttentionParams::init(cfg.embed_dim, cfg.embed_dim, cfg.window, rng));
    }
  }
  throw ValueError("unhandled estimator kind");
}

Trace embed_trace(const Trace& series, std::size_t embed_dim) {
  if (series.dim() > 1) throw DimensionError("embed_trace expects a scalar series");
  if (embed_dim < 1) throw ValueError("embed_dim must be >= 1");
  Trace out;
  out.reserve(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    Vector e(static_cast<Eigen::Index>(embed_dim));
    for (std::size_t j = 0; j < embed_dim; ++j) {
      e(static_cast<Eigen::Index>(j)) = series.value(j <= k ? k - j : 0)(0);
    }
    out.push_back(series.time(k), e);
  }
  return out;
}

}  // namespace akf
