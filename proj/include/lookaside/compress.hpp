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
#include <stdexcept>
#include <string_view>
#include <vector>

#include "lookaside/events.hpp"
#include "lookaside/layout.hpp"
#include "lookaside/scheduler.hpp"
#include "lookaside/tensor.hpp"

namespace lookaside {

// PACKED keeps only issued entries plus a per-group row pointer; SLOTTED
// reserves one slot per lane per dense row.
enum class AllocMode : std::uint8_t { Packed, Slotted };

std::string_view to_string(AllocMode mode);

// Malformed scheduled-form input.
class CorruptGroup : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One (v, idx) pair, tagged with the output lane whose multiplexer picked it.
struct ScheduledEntry {
  float value = 0.0f;
  std::uint8_t lane = 0;
  std::int8_t idx = 0;  // option index into the lane's connectivity list
  friend bool operator==(const ScheduledEntry&, const ScheduledEntry&) = default;
};

// One scheduler step: the entries it issued and the rows it drained.
struct ScheduledRow {
  std::uint8_t advance = 0;
  std::vector<ScheduledEntry> entries;
  friend bool operator==(const ScheduledRow&, const ScheduledRow&) = default;
};

struct ScheduledGroup {
  std::uint32_t lanes = 0;
  std::uint32_t depth = 0;
  std::uint32_t dense_rows = 0;
  AllocMode mode = AllocMode::Packed;
  std::vector<ScheduledRow> rows;

  std::size_t entry_count() const;     // entries carrying a value
  std::size_t storage_slots() const;   // value slots the allocation reserves
  double compression_ratio() const;    // dense rows / scheduled rows
  friend bool operator==(const ScheduledGroup&, const ScheduledGroup&) = default;
};

// Schedules `dense` (rows x lanes, row-major) one-sided on its own zero mask.
// Idle lanes emit (0, idx 0) fillers in SLOTTED mode and nothing in PACKED.
ScheduledGroup compress_group(std::span<const float> dense, const Scheduler& sched,
                              AllocMode mode = AllocMode::Packed);

// Mirror of the multiplexers: every non-zero entry returns to the slot its
// idx names. Zero-valued entries are fillers. Throws CorruptGroup on a bad
// idx, lane or advance, or when two entries claim the same slot.
std::vector<float> decompress_group(const ScheduledGroup& g, const ConnectivityMap& map);

struct BacksideResult {
  ScheduledGroup group;
  std::uint64_t cycles = 0;
};

// Iterative scheduler at the PE outputs: evaluates one level per cycle, so a
// window step costs levels().groups.size() cycles (6 for the default map).
BacksideResult backside_schedule(std::span<const float> block, const Scheduler& sched,
                                 AllocMode mode = AllocMode::Packed,
                                 EventCounters* events = nullptr);

// Whole-tensor scheduled form, one ScheduledGroup per 16x16 group; each
// group's 16 blocks are its dense rows.
struct CompressedTensor {
  Dims4 dims;
  TensorKind kind = TensorKind::A;
  DType dtype = DType::F32;
  std::vector<GroupId> ids;
  std::vector<ScheduledGroup> groups;

  std::size_t entry_count() const;
  std::size_t storage_slots() const;
  std::size_t scheduled_rows() const;
  std::size_t dense_rows() const;
};

// Requires a 16-lane scheduler. Groups are compressed in parallel.
CompressedTensor compress_tensor(const Tensor4& t, const Scheduler& sched,
                                 AllocMode mode = AllocMode::Packed);
Tensor4 decompress_tensor(const CompressedTensor& c, const ConnectivityMap& map);

}  // namespace lookaside
