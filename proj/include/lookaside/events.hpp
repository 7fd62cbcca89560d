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

namespace lookaside {

// Per-component activity counts for one simulation instance. Merged across
// parallel runs by summation.
struct EventCounters {
  std::uint64_t macs_issued = 0;      // non-idle lane slots
  std::uint64_t macs_effectual = 0;   // issued slots with both operands non-zero
  std::uint64_t idle_lane_slots = 0;  // lanes fed (0, 0) because nothing was left
  std::uint64_t staging_reads = 0;    // values read out of staging buffers
  std::uint64_t staging_writes = 0;   // values written into staging buffers
  std::uint64_t scheduler_steps = 0;
  std::uint64_t mux_traversals = 0;   // lane-slot selects through sparse muxes
  std::uint64_t transposer_ops = 0;   // 16-wide transposer reads and provides
  std::uint64_t sram_bits_accessed = 0;
  std::uint64_t dram_bits_accessed = 0;
  std::uint64_t cycles = 0;
  std::uint64_t pe_cycles = 0;         // cycles x active PEs
  std::uint64_t sparse_pe_cycles = 0;  // PE cycles with sparsity hardware powered

  EventCounters& operator+=(const EventCounters& o) {
    macs_issued += o.macs_issued;
    macs_effectual += o.macs_effectual;
    idle_lane_slots += o.idle_lane_slots;
    staging_reads += o.staging_reads;
    staging_writes += o.staging_writes;
    scheduler_steps += o.scheduler_steps;
    mux_traversals += o.mux_traversals;
    transposer_ops += o.transposer_ops;
    sram_bits_accessed += o.sram_bits_accessed;
    dram_bits_accessed += o.dram_bits_accessed;
    cycles += o.cycles;
    pe_cycles += o.pe_cycles;
    sparse_pe_cycles += o.sparse_pe_cycles;
    return *this;
  }
  friend EventCounters operator+(EventCounters lhs, const EventCounters& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend bool operator==(const EventCounters&, const EventCounters&) = default;
};

}  // namespace lookaside
