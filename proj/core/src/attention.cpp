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

#include "akf/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "akf/error.hpp"
#include "json.hpp"

namespace akf {
namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kScaleFloor = 1e-6;

// Everything the backward pass needs from one forward evaluation.
struct Forward {
  double scale = 1.0;
  Matrix X;   // standardized inputs, d_in x n
  Matrix A;   // W_a X
  Matrix Q;   // W_q A
  Matrix V;   // W_v A
  Vector ahat;
  Vector b;
  Matrix Bh;  // layer-normalized, d_in x n
  Vector sigma;
  Vector l;
  Vector s;
  Vector zf;
};

void check_window(const AttentionParams& p, const Matrix& Z) {
  if (static_cast<std::size_t>(Z.cols()) != p.window) {
    throw InsufficientDataError("attention window holds " + std::to_string(Z.cols()) + " of " +
                                std::to_string(p.window) + " measurements");
  }
  if (static_cast<std::size_t>(Z.rows()) != p.input_dim()) {
    throw DimensionError("attention input width " + std::to_string(Z.rows()) + " != " +
                         std::to_string(p.input_dim()));
  }
}

Forward run_forward(const AttentionParams& p, const Matrix& Z) {
  check_window(p, Z);
  const auto n = Z.cols();
  const double dh = static_cast<double>(p.hidden_dim());
  Forward f;

  // Window-level standardization keeps the layer independent of signal units.
  const double m = Z.mean();
  const double sd = std::sqrt((Z.array() - m).square().mean());
  f.scale = std::max(sd, kScaleFloor * std::max(1.0, std::fabs(m)));
  f.X = (Z.array() - m) / f.scale;

  f.A = p.W_a * f.X;
  f.Q = p.W_q * f.A;
  f.V = p.W_v * f.A;
  Vector e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = f.Q.col(i).dot(f.V.col(i)) / std::sqrt(dh);
  f.ahat = softmax(e);
  f.b = f.V * f.ahat;

  const Vector bridge = p.W_a.transpose() * f.b;
  f.Bh.resize(Z.rows(), n);
  f.sigma.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector u = f.X.col(i) + bridge;
    const double mu = u.mean();
    const double var = (u.array() - mu).square().mean();
    f.sigma(i) = std::sqrt(var + kLayerNormEps);
    f.Bh.col(i) = (u.array() - mu) / f.sigma(i);
  }

  f.l = (p.W_l * f.Bh).transpose();
  if (p.output == OutputNorm::kSoftmax) {
    f.s = softmax(f.l);
  } else {
    const double total = f.l.sum();
    if (!(total > 0.0) || f.l.minCoeff() < 0.0) {
      throw NumericError("ratio output normalization needs non-negative logits with a positive sum");
    }
    f.s = f.l / total;
  }
  f.zf = Z * f.s;

  // z_fused must stay inside the window's coordinate-wise range; anything
  // else means the weights are not a convex combination.
  const double slack = 1e-12 * (1.0 + Z.cwiseAbs().maxCoeff());
  if (std::fabs(f.s.sum() - 1.0) > 1e-9 || f.s.minCoeff() < 0.0 ||
      ((f.zf - Z.rowwise().maxCoeff()).array() > slack).any() ||
      ((Z.rowwise().minCoeff() - f.zf).array() > slack).any()) {
    throw NumericError("attention weights do not form a convex combination of the window");
  }
  return f;
}

void backward(const AttentionParams& p, const Matrix& Z, const Forward& f, const Vector& g_z, AttentionGrad& g) {
  const auto n = Z.cols();
  const double root_dh = std::sqrt(static_cast<double>(p.hidden_dim()));

  const Vector ds = Z.transpose() * g_z;
  Vector dl;
  if (p.output == OutputNorm::kSoftmax) {
    dl = (f.s.array() * (ds.array() - f.s.dot(ds))).matrix();
  } else {
    dl = (ds.array() - f.s.dot(ds)) / f.l.sum();
  }
  g.W_l += (f.Bh * dl).transpose();

  const Matrix dBh = p.W_l.transpose() * dl.transpose();
  Matrix dU(Z.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector y = f.Bh.col(i);
    const Vector dy = dBh.col(i);
    dU.col(i) = (dy.array() - dy.mean() - y.array() * dy.cwiseProduct(y).mean()) / f.sigma(i);
  }
  const Vector dbridge = dU.rowwise().sum();
  g.W_a += f.b * dbridge.transpose();
  const Vector db = p.W_a * dbridge;

  Matrix dV = db * f.ahat.transpose();
  const Vector dahat = f.V.transpose() * db;
  const Vector de = f.ahat.cwiseProduct((dahat.array() - f.ahat.dot(dahat)).matrix());
  Matrix dQ(f.Q.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dQ.col(i) = de(i) * f.V.col(i) / root_dh;
    dV.col(i) += de(i) * f.Q.col(i) / root_dh;
  }
  g.W_q += dQ * f.A.transpose();
  g.W_v += dV * f.A.transpose();
  const Matrix dA = p.W_q.transpose() * dQ + p.W_v.transpose() * dV;
  g.W_a += dA * f.X.transpose();
}

AttentionGrad zero_grad(const AttentionParams& p) {
  return AttentionGrad{Matrix::Zero(p.W_a.rows(), p.W_a.cols()), Matrix::Zero(p.W_q.rows(), p.W_q.cols()),
                       Matrix::Zero(p.W_v.rows(), p.W_v.cols()), Matrix::Zero(p.W_l.rows(), p.W_l.cols())};
}

Matrix series_matrix(const Trace& series) {
  Matrix out(static_cast<Eigen::Index>(series.dim()), static_cast<Eigen::Index>(series.size()));
  for (std::size_t i = 0; i < series.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = series.value(i);
  return out;
}

using Json = nlohmann::ordered_json;

Json matrix_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    throw ValidationError("attention params: " + name + " needs rows, cols and data");
  }
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json& data = j.at("data");
  if (rows < 1 || cols < 1 || !data.is_array() || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw ValidationError("attention params: " + name + " data does not match its shape");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data.at(k++).get<double>();
  }
  return m;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

void AttentionParams::validate() const {
  const auto d_in = W_a.cols();
  const auto d_h = W_a.rows();
  if (d_in < 1 || d_h < 1) throw DimensionError("attention W_a must be non-empty");
  if (W_q.rows() != d_h || W_q.cols() != d_h) throw DimensionError("attention W_q must be d_h x d_h");
  if (W_v.rows() != d_h || W_v.cols() != d_h) throw DimensionError("attention W_v must be d_h x d_h");
  if (W_l.rows() != 1 || W_l.cols() != d_in) throw DimensionError("attention W_l must be 1 x d_in");
  if (window < 1) throw ValueError("attention window must be >= 1");
  require_finite(W_a, "W_a");
  require_finite(W_q, "W_q");
  require_finite(W_v, "W_v");
  require_finite(W_l, "W_l");
}

AttentionParams AttentionParams::init(std::size_t d_in, std::size_t d_h, std::size_t window, Rng& rng) {
  if (d_in < 1 || d_h < 1 || window < 1) throw ValueError("attention dimensions must be >= 1");
  auto gaussian = [&rng](std::size_t rows, std::size_t cols) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const double sd = 1.0 / std::sqrt(static_cast<double>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.normal(0.0, sd);
    }
    return m;
  };
  AttentionParams p;
  p.W_a = gaussian(d_h, d_in);
  p.W_q = gaussian(d_h, d_h);
  p.W_v = gaussian(d_h, d_h);
  p.W_l = Matrix::Zero(1, static_cast<Eigen::Index>(d_in));
  p.window = window;
  return p;
}

Vector fuse(const Matrix& window, const Vector& s) {
  if (window.cols() != s.size()) throw DimensionError("fuse: weight count does not match the window");
  return window * s;
}

AttentionOutput attn_forward(const AttentionParams& params, const Matrix& window) {
  params.validate();
  Forward f = run_forward(params, window);
  return AttentionOutput{std::move(f.s), std::move(f.ahat), std::move(f.Bh), std::move(f.zf)};
}

AttentionOutput attn_forward(const AttentionParams& params, const MeasurementWindow& window) {
  if (window.size() != params.window) {
    throw InsufficientDataError("attention window holds " + std::to_string(window.size()) + " of " +
                                std::to_string(params.window) + " measurements");
  }
  return attn_forward(params, window.matrix());
}

double attn_sample_loss(const AttentionParams& params, const Matrix& window, const Vector& target,
                        AttentionGrad* grad) {
  if (target.size() != window.rows()) throw DimensionError("attention target width does not match the window");
  const Forward f = run_forward(params, window);
  const double d = static_cast<double>(target.size());
  const Vector r = (f.zf - target) / f.scale;
  if (grad != nullptr) backward(params, window, f, 2.0 * r / (f.scale * d), *grad);
  return r.squaredNorm() / d;
}

double attn_series_loss(const AttentionParams& params, const Trace& series, AttentionGrad* grad) {
  params.validate();
  const std::size_t n = params.window;
  if (series.size() < n + 1) {
    throw InsufficientDataError("attention training needs at least window + 1 = " + std::to_string(n + 1) +
                                " points, got " + std::to_string(series.size()));
  }
  const Matrix Z = series_matrix(series);
  const std::size_t count = series.size() - n;
  AttentionGrad local = zero_grad(params);
  double total = 0.0;
  for (std::size_t t = n - 1; t + 1 < series.size(); ++t) {
    const auto start = static_cast<Eigen::Index>(t + 1 - n);
    total += attn_sample_loss(params, Z.middleCols(start, static_cast<Eigen::Index>(n)),
                              Z.col(static_cast<Eigen::Index>(t + 1)), grad ? &local : nullptr);
  }
  const double scale = 1.0 / static_cast<double>(count);
  if (grad != nullptr) {
    grad->W_a = local.W_a * scale;
    grad->W_q = local.W_q * scale;
    grad->W_v = local.W_v * scale;
    grad->W_l = local.W_l * scale;
  }
  return total * scale;
}

TrainResult attn_train(const AttentionParams& params, const Trace& series, std::size_t epochs, double lr) {
  if (epochs < 1) throw ValueError("attention training needs epochs >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ValueError("attention learning rate must be positive");
  TrainResult out{params, {}};
  out.loss.reserve(epochs);
  AttentionGrad g = zero_grad(params);
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    const double loss = attn_series_loss(out.params, series, &g);
    if (!std::isfinite(loss)) throw NumericError("attention training diverged at epoch " + std::to_string(epoch));
    out.loss.push_back(loss);
    out.params.W_a -= lr * g.W_a;
    out.params.W_q -= lr * g.W_q;
    out.params.W_v -= lr * g.W_v;
    out.params.W_l -= lr * g.W_l;
  }
  return out;
}

double attention_weight_spread(const AttentionParams& params, const Trace& series) {
  params.validate();
  const std::size_t n = params.window;
  if (series.size() < n) throw InsufficientDataError("series shorter than the attention window");
  const Matrix Z = series_matrix(series);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t t = n - 1; t < series.size(); ++t) {
    const Vector s = run_forward(params, Z.middleCols(static_cast<Eigen::Index>(t + 1 - n),
                                                      static_cast<Eigen::Index>(n))).s;
    total += std::sqrt((s.array() - s.mean()).square().mean());
    ++count;
  }
  return total / static_cast<double>(count);
}

StateEstimate akf_step(const StateEstimate& state, const NonlinearModel& model, const AttentionParams& params,
                       const MeasurementWindow& window) {
  return ekf_step(state, model, attn_forward(params, window).z_fused);
}

std::string attention_params_to_json(const AttentionParams& params) {
  params.validate();
  Json j;
  j["window"] = params.window;
  j["output"] = params.output == OutputNorm::kSoftmax ? "softmax" : "ratio";
  j["W_a"] = matrix_json(params.W_a);
  j["W_q"] = matrix_json(params.W_q);
  j["W_v"] = matrix_json(params.W_v);
  j["W_l"] = matrix_json(params.W_l);
  return j.dump(2) + "\n";
}

AttentionParams attention_params_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("attention params: ") + e.what(), line_of(text, e.byte));
  }
  if (!j.is_object()) throw ValidationError("attention params must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "window" && key != "output" && key != "W_a" && key != "W_q" && key != "W_v" && key != "W_l") {
      throw ValidationError("attention params: unknown key '" + key + "'");
    }
  }
  AttentionParams p;
  try {
    p.window = j.at("window").get<std::size_t>();
    const std::string output = j.at("output").get<std::string>();
    if (output == "softmax") {
      p.output = OutputNorm::kSoftmax;
    } else if (output == "ratio") {
      p.output = OutputNorm::kRatio;
    } else {
      throw ValidationError("attention params: output must be 'softmax' or 'ratio'");
    }
    p.W_a = matrix_from_json(j.at("W_a"), "W_a");
    p.W_q = matrix_from_json(j.at("W_q"), "W_q");
    p.W_v = matrix_from_json(j.at("W_v"), "W_v");
    p.W_l = matrix_from_json(j.at("W_l"), "W_l");
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("attention params: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace akf
