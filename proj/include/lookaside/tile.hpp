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
#include <vector>

#include "lookaside/events.hpp"
#include "lookaside/pe.hpp"
#include "lookaside/scheduler.hpp"

namespace lookaside {

// rows x cols PEs. PEs along a row share the B operand (and, in SPARSE_B, one
// scheduler); PEs along a column share the A operand.
struct TileConfig {
  std::uint32_t rows = 4;
  std::uint32_t cols = 4;
  PEConfig pe;
  std::uint32_t tiles = 16;  // tiles per chip

  std::uint64_t macs_per_cycle() const {
    return std::uint64_t{rows} * cols * pe.lanes * tiles;
  }
};

struct TileRunResult {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> results;  // [r * cols + c]
  std::uint64_t cycles = 0;
  EventCounters events;

  float result(std::uint32_t r, std::uint32_t c) const { return results[r * cols + c]; }
};

// Runs one block of work: result[r][c] = dot(b_streams[r], a_streams[c]).
// Every cycle each scheduler issues from its residual Z, and the shared window
// advances by the minimum AS over all schedulers. Stream counts may be smaller
// than the configured geometry (fragmented blocks); extra PEs stay dark.
TileRunResult tile_run(std::span<const std::span<const float>> a_streams,
                       std::span<const std::span<const float>> b_streams,
                       const TileConfig& cfg, const Scheduler* sched);

struct GeometrySweepSpec {
  std::vector<std::uint32_t> row_counts{1, 2, 4, 8, 16};
  std::vector<std::uint32_t> col_counts{4};
  double b_sparsity = 0.6;
  std::uint32_t stream_rows = 256;  // lane-wide rows per stream
  std::uint32_t seeds = 20;
  std::uint64_t base_seed = 1;
  PEConfig pe;
};

struct GeometryPoint {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint64_t seed = 0;
  std::uint64_t dense_cycles = 0;
  std::uint64_t sparse_cycles = 0;
  double speedup = 1.0;
};

// One point per (rows, cols, seed), ordered rows-major then cols then seed.
// Each seed draws max(rows) i.i.d. B streams and max(cols) dense A streams; a
// geometry uses the first rows/cols of them.
std::vector<GeometryPoint> geometry_sweep(const GeometrySweepSpec& spec);

}  // namespace lookaside
