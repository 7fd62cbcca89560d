// Copyright 2026 The Lookaside Authors. All Rights Reserved.
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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "lookaside/lowering.hpp"
#include "lookaside/serial.hpp"
#include "lookaside/synth.hpp"
#include "lookaside/trainops.hpp"

namespace {

using namespace lookaside;

struct Fixture {
  LayerSpec layer = LayerSpec::conv(2, 64, 14, 14, 64, 3, 3, 1, 1);
  LayerTensors t;
  Fixture() {
    SynthSpec sp;
    sp.sparsity = 0.5;
    sp.dims = layer.a_dims;
    sp.seed = 1;
    t.a = synth_tensor(sp);
    sp.dims = layer.w_dims;
    sp.sparsity = 0.0;
    sp.kind = TensorKind::W;
    sp.seed = 2;
    t.w = synth_tensor(sp);
    sp.dims = layer.g_dims;
    sp.sparsity = 0.5;
    sp.kind = TensorKind::G;
    sp.seed = 3;
    t.g = synth_tensor(sp);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_ForwardSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(serial::forward_conv(f.t.a, f.t.w, f.layer));
}
void BM_ForwardParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(forward_conv(f.t.a, f.t.w, f.layer));
}
void BM_WeightGradSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(serial::weight_grad_conv(f.t.g, f.t.a, f.layer));
}
void BM_WeightGradParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(weight_grad_conv(f.t.g, f.t.a, f.layer));
}

void simulate_bench(benchmark::State& state, bool parallel) {
  const Fixture& f = fixture();
  const auto op = static_cast<TrainOp>(state.range(0));
  const LoweredOp lo = lower_to_tile(op, f.layer, f.t, SidePolicy::Auto);
  const Scheduler sched(default_connectivity());
  TileConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? simulate(lo, cfg, &sched) : serial::simulate(lo, cfg, &sched));
  }
  state.SetLabel(std::string(to_string(op)));
}
void BM_SimulateSerial(benchmark::State& state) { simulate_bench(state, false); }
void BM_SimulateParallel(benchmark::State& state) { simulate_bench(state, true); }

}  // namespace

BENCHMARK(BM_ForwardSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightGradSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightGradParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateSerial)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
