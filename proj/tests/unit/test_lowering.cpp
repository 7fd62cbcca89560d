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

#include <random>

#include "doctest.h"
#include "lookaside/errors.hpp"
#include "lookaside/lowering.hpp"
#include "lookaside/serial.hpp"
#include "lookaside/synth.hpp"

using namespace lookaside;

namespace {

Tensor4 rnd(Dims4 d, double s, std::uint64_t seed, TensorKind k) {
  SynthSpec sp;
  sp.dims = d;
  sp.sparsity = s;
  sp.seed = seed;
  sp.kind = k;
  sp.values = ValueDist::SmallInt;
  return synth_tensor(sp);
}

LayerTensors tensors(const LayerSpec& l, double sa, double sw, double sg, std::uint64_t seed) {
  return {rnd(l.a_dims, sa, seed, TensorKind::A), rnd(l.w_dims, sw, seed + 1, TensorKind::W),
          rnd(l.g_dims, sg, seed + 2, TensorKind::G)};
}

Tensor4 reference(TrainOp op, const LayerSpec& l, const LayerTensors& t) {
  switch (op) {
    case TrainOp::Fwd: return forward_conv(t.a, t.w, l);
    case TrainOp::IGrad: return input_grad_conv(t.g, t.w, l);
    case TrainOp::WGrad: return weight_grad_conv(t.g, t.a, l);
  }
  return {};
}

}  // namespace

TEST_CASE("lowered ops reproduce the functional kernels") {
  std::mt19937_64 rng(1);
  const Scheduler sched(default_connectivity());
  std::uniform_int_distribution<std::uint32_t> d(1, 3), hw(3, 8), c(1, 20), k(1, 3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint32_t kk = k(rng);
    const LayerSpec l = LayerSpec::conv(d(rng), c(rng), hw(rng), hw(rng), c(rng), kk, kk, d(rng),
                                        std::uniform_int_distribution<std::uint32_t>(0, kk - 1)(rng));
    const LayerTensors t = tensors(l, 0.5, 0.2, 0.6, trial);
    for (TrainOp op : {TrainOp::Fwd, TrainOp::IGrad, TrainOp::WGrad}) {
      const Tensor4 want = reference(op, l, t);
      for (SidePolicy side : {SidePolicy::Auto, SidePolicy::A, SidePolicy::B, SidePolicy::Both}) {
        const LoweredOp lo = lower_to_tile(op, l, t, side);
        CHECK(lo.stream_len % 16 == 0);
        if (op == TrainOp::Fwd || l.shape.pad == 0) CHECK(lo.padded_macs() >= lo.useful_macs);
        for (PEMode mode : {PEMode::Dense, PEMode::SparseB, PEMode::SparseBoth}) {
          TileConfig cfg;
          cfg.pe.mode = mode;
          const SimResult r = simulate(lo, cfg, &sched);
          REQUIRE(r.output.dims() == want.dims());
          REQUIRE(bit_identical(r.output.data(), want.data()));
        }
      }
    }
  }
}

TEST_CASE("work units address the output separably") {
  const LayerSpec l = LayerSpec::conv(2, 5, 6, 6, 3, 3, 3, 1, 1);
  const LayerTensors t = tensors(l, 0.0, 0.0, 0.0, 3);
  const LoweredOp lo = lower_to_tile(TrainOp::Fwd, l, t, SidePolicy::Auto);
  const Tensor4 o = forward_conv(t.a, t.w, l);
  for (std::size_t bi = 0; bi < lo.b_count(); bi += 7) {
    for (std::size_t ai = 0; ai < lo.a_count(); ++ai) {
      const WorkUnit u = lo.work_unit(bi, ai);
      double d = 0.0;
      for (std::size_t i = 0; i < u.a_stream.size(); ++i) d += double(u.a_stream[i]) * u.b_stream[i];
      REQUIRE(o.data()[u.out_index] == d);
    }
  }
}

TEST_CASE("sparse side choice") {
  const LayerSpec l = LayerSpec::conv(1, 4, 5, 5, 4, 3, 3);
  const LayerTensors sparse_a = tensors(l, 0.8, 0.0, 0.3, 1);
  const LayerTensors sparse_g = tensors(l, 0.3, 0.0, 0.8, 1);
  CHECK(choose_sparse_side(TrainOp::Fwd, SidePolicy::Auto, sparse_a) == TensorKind::A);
  CHECK(choose_sparse_side(TrainOp::Fwd, SidePolicy::A, sparse_a) == TensorKind::W);
  CHECK(choose_sparse_side(TrainOp::IGrad, SidePolicy::Auto, sparse_a) == TensorKind::G);
  CHECK(choose_sparse_side(TrainOp::IGrad, SidePolicy::A, sparse_a) == TensorKind::W);
  CHECK(choose_sparse_side(TrainOp::WGrad, SidePolicy::Auto, sparse_a) == TensorKind::A);
  CHECK(choose_sparse_side(TrainOp::WGrad, SidePolicy::Auto, sparse_g) == TensorKind::G);
  CHECK(choose_sparse_side(TrainOp::WGrad, SidePolicy::B, sparse_a) == TensorKind::G);
  const LayerTensors tie = tensors(l, 1.0, 0.0, 1.0, 1);
  CHECK(choose_sparse_side(TrainOp::WGrad, SidePolicy::Auto, tie) == TensorKind::G);
}

TEST_CASE("three ops issue the same useful work") {
  const LayerSpec l = LayerSpec::conv(2, 16, 8, 8, 16, 3, 3, 1, 1);
  const LayerTensors t = tensors(l, 0.0, 0.0, 0.0, 2);
  const auto f = lower_to_tile(TrainOp::Fwd, l, t, SidePolicy::Auto);
  const auto i = lower_to_tile(TrainOp::IGrad, l, t, SidePolicy::Auto);
  const auto w = lower_to_tile(TrainOp::WGrad, l, t, SidePolicy::Auto);
  CHECK(f.useful_macs == l.macs());
  CHECK(i.useful_macs == f.useful_macs);
  CHECK(w.useful_macs == f.useful_macs);
  CHECK(f.padded_macs() == f.useful_macs);
  CHECK(f.transposer_ops == 0);
  CHECK(i.transposer_ops == 32 * 9);
  CHECK(w.transposer_ops == 32 * 8);
}

TEST_CASE("serial and parallel simulation agree") {
  const Scheduler sched(default_connectivity());
  const LayerSpec l = LayerSpec::conv(2, 20, 7, 7, 9, 3, 3, 2, 1);
  const LayerTensors t = tensors(l, 0.5, 0.1, 0.6, 4);
  for (TrainOp op : {TrainOp::Fwd, TrainOp::IGrad, TrainOp::WGrad}) {
    const LoweredOp lo = lower_to_tile(op, l, t, SidePolicy::Auto);
    for (PEMode mode : {PEMode::Dense, PEMode::SparseB, PEMode::SparseBoth}) {
      TileConfig cfg;
      cfg.tiles = 3;
      cfg.pe.mode = mode;
      const SimResult p = simulate(lo, cfg, &sched);
      const SimResult s = serial::simulate(lo, cfg, &sched);
      CHECK(bit_identical(p.output.data(), s.output.data()));
      CHECK(p.cycles == s.cycles);
      CHECK(p.tile_cycles == s.tile_cycles);
      CHECK(p.events == s.events);
      const SimResult timing = simulate(lo, cfg, &sched, {false});
      CHECK(timing.cycles == p.cycles);
      CHECK(timing.tile_cycles == p.tile_cycles);
      CHECK(sparsity_stats(timing.output).zeros == timing.output.size());
    }
  }
}

TEST_CASE("chip cycles are those of the busiest tile") {
  const LayerSpec l = LayerSpec::conv(1, 16, 4, 4, 4, 1, 1);
  const LayerTensors t = tensors(l, 0.0, 0.0, 0.0, 5);
  const LoweredOp lo = lower_to_tile(TrainOp::Fwd, l, t, SidePolicy::Auto);
  TileConfig cfg;
  cfg.pe.mode = PEMode::Dense;
  cfg.tiles = 1;
  // 16 windows x 4 filters -> 4 blocks of one row each.
  CHECK(simulate(lo, cfg, nullptr).cycles == 4);
  cfg.tiles = 3;
  CHECK(simulate(lo, cfg, nullptr).cycles == 2);
  CHECK(simulate(lo, cfg, nullptr).tile_cycles == 4);
}

TEST_CASE("lowering and simulation reject bad inputs") {
  const LayerSpec l = LayerSpec::conv(1, 4, 5, 5, 4, 3, 3);
  LayerTensors t = tensors(l, 0.0, 0.0, 0.0, 1);
  t.w = Tensor4({4, 4, 2, 2});
  CHECK_THROWS_AS(lower_to_tile(TrainOp::Fwd, l, t, SidePolicy::Auto), UsageError);
  CHECK_NOTHROW(lower_to_tile(TrainOp::WGrad, l, t, SidePolicy::Auto));
  const LayerTensors ok = tensors(l, 0.0, 0.0, 0.0, 1);
  const LoweredOp lo = lower_to_tile(TrainOp::Fwd, l, ok, SidePolicy::Auto, 8);
  TileConfig cfg;
  CHECK_THROWS_AS(simulate(lo, cfg, nullptr), ConfigError);
  cfg.pe.lanes = 8;
  cfg.rows = 0;
  CHECK_THROWS_AS(simulate(lo, cfg, nullptr), ConfigError);
}
