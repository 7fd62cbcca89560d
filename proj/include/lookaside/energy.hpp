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

#include <string>
#include <string_view>

#include "lookaside/events.hpp"
#include "lookaside/tensor.hpp"

namespace lookaside {

// Energy per event in abstract units. Static costs are per PE-cycle.
struct CostSet {
  double mac = 3.0;             // per lane slot, idle slots included
  double static_core = 2.0;     // every active PE-cycle
  double static_sparse = 0.75;  // PE-cycles with the sparse datapath powered
  double mux_traversal = 0.01;
  double scheduler_step = 0.2;
  double staging_access = 0.0;
  double transposer_op = 0.05;
  double sram_bit = 0.002;
  double dram_bit = 0.02;
};

struct CostTable {
  CostSet f32;
  CostSet bf16;

  // F32 defaults put a 4x4 tile's sparse/dense power ratio at 1.02 under
  // full lane utilization. BF16 scales multipliers by the squared mantissa
  // ratio (8/24)^2, multiplexers, staging and transposers by the width ratio,
  // and keeps scheduler logic unchanged.
  static CostTable defaults();

  const CostSet& for_dtype(DType d) const { return d == DType::F32 ? f32 : bf16; }
  CostSet& for_dtype(DType d) { return d == DType::F32 ? f32 : bf16; }

  // key is "<f32|bf16>.<field>", e.g. "f32.mac". Throws ConfigError on an
  // unknown key or a negative value.
  void set(std::string_view key, double value);
  std::string to_text() const;  // key=value lines, loadable by set()
};

struct EnergyBreakdown {
  double compute = 0.0;  // datapath, scheduler, staging, transposers, static
  double sram = 0.0;
  double dram = 0.0;
  double total() const { return compute + sram + dram; }
};

EnergyBreakdown tally(const EventCounters& ev, const CostSet& costs);
inline EnergyBreakdown tally(const EventCounters& ev, const CostTable& costs, DType dtype) {
  return tally(ev, costs.for_dtype(dtype));
}

struct Efficiency {
  double speedup = 1.0;     // base cycles / our cycles
  double energy_eff = 1.0;  // base energy / our energy
};

// Throws UsageError when our cycles or energy are zero.
Efficiency efficiency(std::uint64_t base_cycles, double base_energy, std::uint64_t our_cycles,
                      double our_energy);

}  // namespace lookaside
