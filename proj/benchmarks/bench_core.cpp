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


#include <benchmark/benchmark.h>

#include "akf/attention.hpp"
#include "akf/autoscaler.hpp"
#include "akf/filters.hpp"
#include "akf/numerics.hpp"
#include "akf/pca.hpp"
#include "akf/pca_filters.hpp"
#include "akf/rng.hpp"
#include "akf/series_estimators.hpp"
#include "akf/workloads.hpp"

namespace {

using namespace akf;

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.normal();
  return m;
}

LinearModel model_of_size(Eigen::Index n) {
  Rng rng(1);
  LinearModel m;
  m.A = Matrix::Identity(n, n) * 0.95;
  m.H = random_matrix(rng, n, n);
  m.Q = Matrix::Identity(n, n) * 0.01;
  m.R = Matrix::Identity(n, n) * 0.1;
  return m;
}

StateEstimate start_of_size(Eigen::Index n) { return {Vector::Zero(n), Matrix::Identity(n, n), 0}; }

void BM_KfStep(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const LinearModel m = model_of_size(n);
  StateEstimate s = start_of_size(n);
  const Vector z = Vector::Ones(n);
  for (auto _ : state) {
    s = kf_step(s, m, z);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_KfStep)->Arg(2)->Arg(4)->Arg(8);

void BM_EkfStep(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const NonlinearModel m = NonlinearModel::from_linear(model_of_size(n));
  StateEstimate s = start_of_size(n);
  const Vector z = Vector::Ones(n);
  for (auto _ : state) {
    s = ekf_step(s, m, z);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_EkfStep)->Arg(2)->Arg(4)->Arg(8);

void BM_UkfStep(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const NonlinearModel m = NonlinearModel::from_linear(model_of_size(n));
  StateEstimate s = start_of_size(n);
  const Vector z = Vector::Ones(n);
  for (auto _ : state) {
    s = ukf_step(s, m, UkfConfig{}, z);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_UkfStep)->Arg(2)->Arg(4)->Arg(8);

void BM_EkfPcaLinStep(benchmark::State& state) {
  const NonlinearModel m = NonlinearModel::from_linear(model_of_size(4));
  Rng rng(2);
  const PcaModel pca = pca_fit(random_matrix(rng, 4, 16), 0.0);
  PcaFilterState s = PcaFilterState::start(start_of_size(4));
  const Vector z = Vector::Ones(4);
  for (auto _ : state) {
    s = kfpca_step_lin(s, m, pca, z);
    benchmark::DoNotOptimize(s.estimate.x.data());
  }
}
BENCHMARK(BM_EkfPcaLinStep);

void BM_EigSym(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(3);
  const Matrix g = random_matrix(rng, n, n);
  const Matrix c = g * g.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(eig_sym(c).values.data());
}
BENCHMARK(BM_EigSym)->Arg(4)->Arg(16)->Arg(64);

void BM_AttentionForward(benchmark::State& state) {
  const auto window = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  AttentionParams p = AttentionParams::init(4, 4, window, rng);
  p.W_l = random_matrix(rng, 1, 4);
  const Matrix Z = random_matrix(rng, 4, static_cast<Eigen::Index>(window));
  for (auto _ : state) benchmark::DoNotOptimize(attn_forward(p, Z).z_fused.data());
}
BENCHMARK(BM_AttentionForward)->Arg(8)->Arg(16)->Arg(64);

void BM_AttentionEpoch(benchmark::State& state) {
  Rng rng(5);
  const AttentionParams p = AttentionParams::init(4, 4, 16, rng);
  const Trace series = embed_trace(gen_count_series(CountProfile{}, 5).slice(0, 1440), 4);
  AttentionGrad g;
  for (auto _ : state) benchmark::DoNotOptimize(attn_series_loss(p, series, &g));
}
BENCHMARK(BM_AttentionEpoch)->Unit(benchmark::kMillisecond);

void BM_AutoscalerIteration(benchmark::State& state) {
  EstimatorConfig cfg;
  cfg.kind = static_cast<EstimatorKind>(state.range(0));
  const Trace arrivals = make_workload(WorkloadSpec{}, 6);
  for (auto _ : state) {
    const ScalingTrace t = run_iteration(arrivals, ClusterConfig{}, cfg, 6);
    benchmark::DoNotOptimize(t.messages.data());
  }
  state.SetLabel(std::string(to_string(cfg.kind)));
}
BENCHMARK(BM_AutoscalerIteration)
    ->Arg(static_cast<int>(EstimatorKind::kPassive))
    ->Arg(static_cast<int>(EstimatorKind::kUkf))
    ->Arg(static_cast<int>(EstimatorKind::kEkfPca))
    ->Arg(static_cast<int>(EstimatorKind::kAkfPca))
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
