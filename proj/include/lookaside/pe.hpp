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
#include "lookaside/scheduler.hpp"
#include "lookaside/tensor.hpp"

namespace lookaside {

enum class PEMode : std::uint8_t {
  Dense,       // baseline datapath, staging buffers bypassed
  SparseB,     // Z = BZ
  SparseBoth,  // Z = AZ & BZ
};

std::string_view to_string(PEMode mode);

struct PEConfig {
  std::uint32_t lanes = 16;
  std::uint32_t depth = 3;
  PEMode mode = PEMode::SparseB;
  DType dtype = DType::F32;
};

struct PERunResult {
  float accumulator = 0.0f;
  std::uint64_t cycles = 0;
  EventCounters events;
};

inline std::uint32_t value_bits(DType dtype) { return dtype == DType::F32 ? 32 : 16; }

// Zero-pads a stream to a multiple of `lanes`.
std::vector<float> pad_to_lanes(std::span<const float> stream, std::uint32_t lanes);

// Non-zero mask of one lane-wide row of a stream.
std::uint64_t row_mask(std::span<const float> stream, std::size_t row, std::uint32_t lanes);

// Baseline PE: one row of `lanes` pairs per cycle, lane products summed in lane
// order and then added to the accumulator.
PERunResult run_dense(std::span<const float> a, std::span<const float> b, const PEConfig& cfg);

// Sparse PE: staging buffers on both sides, one schedule per cycle, the same
// MS signals steering A and B so pairs move in tandem.
PERunResult run_sparse(std::span<const float> a, std::span<const float> b, const PEConfig& cfg,
                       const Scheduler& sched);

// Dispatches on cfg.mode; `sched` may be null only in DENSE mode.
PERunResult run_pe(std::span<const float> a, std::span<const float> b, const PEConfig& cfg,
                   const Scheduler* sched);

// Power-gates the sparsity hardware and bypasses the staging buffers.
PEConfig bypass_mode(PEConfig cfg);

// Per-layer gating rule fed by the output zero counter: bypass when the
// measured zero fraction is below `threshold`.
bool should_bypass(const SparsityStats& stats, double threshold);

}  // namespace lookaside
