// Copyright 2026 The QTTT Authors
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

#include <vector>

#include <benchmark/benchmark.h>

#include "qttt/circuits.hpp"
#include "qttt/grad.hpp"
#include "qttt/model.hpp"
#include "qttt/params.hpp"
#include "qttt/statevec.hpp"

namespace {

void BM_ApplyU3(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  qttt::StateVector s(n);
  const auto g = qttt::GateOp::u3(n / 2, 0.3, -0.7, 1.1);
  for (auto _ : state) {
    s.apply(g);
    benchmark::DoNotOptimize(s.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ApplyU3)->DenseRange(2, 12, 2);

void BM_ApplyCnot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  qttt::StateVector s = qttt::apply_gate(qttt::StateVector(n), qttt::GateOp::ry(0, 0.4));
  const auto g = qttt::GateOp::cnot(0, n - 1);
  for (auto _ : state) {
    s.apply(g);
    benchmark::DoNotOptimize(s.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ApplyCnot)->DenseRange(2, 12, 2);

const std::vector<double> kInput{0.2, -0.4, 0.9, 0.1, -0.3};

void BM_ForwardTotalLoss(benchmark::State& state) {
  auto arch = qttt::ArchitectureConfig::for_features(5);
  arch.layers_main = static_cast<int>(state.range(0));
  const auto p = qttt::QtttParams::initial(arch, 1);
  const std::vector<double> y{0.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(qttt::total_loss(kInput, y, p).l_total);
}
BENCHMARK(BM_ForwardTotalLoss)->Arg(4)->Arg(8)->Arg(16);

void BM_ParameterShiftGradient(benchmark::State& state) {
  auto arch = qttt::ArchitectureConfig::for_features(5);
  arch.layers_main = static_cast<int>(state.range(0));
  const auto p = qttt::QtttParams::initial(arch, 1);
  const std::vector<double> y{0.0, 1.0};
  const qttt::Datum d{kInput, y};
  for (auto _ : state) {
    auto g = qttt::loss_gradient(qttt::LossKind::Total, d, p, nullptr, qttt::SegmentSet::all());
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_ParameterShiftGradient)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_TttGradient(benchmark::State& state) {
  const auto arch = qttt::ArchitectureConfig::for_features(5);
  const auto p = qttt::QtttParams::initial(arch, 1);
  const qttt::Datum d{kInput, {}};
  for (auto _ : state) {
    auto g = qttt::loss_gradient(qttt::LossKind::AutoEncoder, d, p, nullptr, qttt::kTttSegments);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_TttGradient)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
