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

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lookaside/events.hpp"
#include "lookaside/scheduler.hpp"
#include "lookaside/tensor.hpp"
#include "lookaside/tile.hpp"
#include "lookaside/trainops.hpp"

namespace lookaside {

enum class TrainOp : std::uint8_t { Fwd, IGrad, WGrad };

// Which operand the scheduler sees. B: the activation/gradient operand (A for
// FWD, G_O for IGRAD and WGRAD). A: the other operand. AUTO: A for FWD, G_O for
// IGRAD, the sparser of G_O and A for WGRAD. BOTH: AUTO's assignment, with both
// sides extracted by per-PE schedulers.
enum class SidePolicy : std::uint8_t { Auto, A, B, Both };

std::string_view to_string(TrainOp op);
std::string_view to_string(SidePolicy side);

struct LayerTensors {
  Tensor4 a;  // input activations
  Tensor4 w;  // weights
  Tensor4 g;  // output gradients
};

// One PE's worth of work: dot(a_stream, b_stream) lands at out_index of the
// op's output tensor. b_stream carries the sparse-side operand.
struct WorkUnit {
  std::span<const float> a_stream;
  std::span<const float> b_stream;
  std::size_t out_index = 0;
  TensorKind sparse_side = TensorKind::A;
};

// A training op lowered to brick-granularity streams. Every output is the dot
// product of one B stream and one A stream, and the output index separates as
// b_offset[bi] + a_offset[ai], so a tile block of B rows and A columns maps
// onto a rectangle of outputs.
struct LoweredOp {
  TrainOp op = TrainOp::Fwd;
  TensorKind sparse_side = TensorKind::A;
  std::uint32_t lanes = 16;
  std::size_t stream_len = 0;  // padded to a multiple of lanes
  std::vector<float> b_streams;
  std::vector<float> a_streams;
  std::vector<std::size_t> b_offset;
  std::vector<std::size_t> a_offset;
  Dims4 out_dims;
  TensorKind out_kind = TensorKind::O;
  std::uint64_t transposer_ops = 0;
  std::uint64_t useful_macs = 0;  // MACs of the layer's forward convolution

  std::size_t b_count() const { return b_offset.size(); }
  std::size_t a_count() const { return a_offset.size(); }
  std::span<const float> b_stream(std::size_t i) const {
    return std::span<const float>(b_streams).subspan(i * stream_len, stream_len);
  }
  std::span<const float> a_stream(std::size_t i) const {
    return std::span<const float>(a_streams).subspan(i * stream_len, stream_len);
  }
  WorkUnit work_unit(std::size_t bi, std::size_t ai) const {
    return {a_stream(ai), b_stream(bi), b_offset[bi] + a_offset[ai], sparse_side};
  }
  std::uint64_t padded_macs() const {
    return std::uint64_t{b_count()} * a_count() * stream_len;
  }
};

// Which tensor the scheduler side takes for `op` under `policy`.
TensorKind choose_sparse_side(TrainOp op, SidePolicy policy, const LayerTensors& t);

// FWD and IGRAD stream 16-channel bricks per kernel tap (channel innermost);
// WGRAD streams the dilated output-gradient plane of every sample. Charges
// 32 transposer ops per 16x16 group of the tensor read against its stored
// order (weights in IGRAD, gradients in WGRAD).
LoweredOp lower_to_tile(TrainOp op, const LayerSpec& layer, const LayerTensors& t,
                        SidePolicy policy, std::uint32_t lanes = 16);

struct SimOptions {
  bool functional = true;  // false: timing only, outputs left zero
};

struct SimResult {
  Tensor4 output;
  std::uint64_t cycles = 0;        // chip cycles: slowest tile
  std::uint64_t tile_cycles = 0;   // sum over all tile blocks
  EventCounters events;
};

// Splits the lowered op into blocks of cfg.rows B streams by cfg.cols A
// streams, hands blocks to cfg.tiles tiles round-robin and runs each with
// tile_run. Blocks run in parallel (OpenMP). Every operand stream is charged
// one DRAM fetch.
SimResult simulate(const LoweredOp& op, const TileConfig& cfg, const Scheduler* sched,
                   SimOptions opts = {});

}  // namespace lookaside
