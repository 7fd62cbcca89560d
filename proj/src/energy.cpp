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

#include "lookaside/energy.hpp"

#include <array>
#include <cstdio>
#include <utility>

#include "lookaside/errors.hpp"

namespace lookaside {

namespace {

using Field = double CostSet::*;

constexpr std::array<std::pair<std::string_view, Field>, 9> kFields{{
    {"mac", &CostSet::mac},
    {"static_core", &CostSet::static_core},
    {"static_sparse", &CostSet::static_sparse},
    {"mux_traversal", &CostSet::mux_traversal},
    {"scheduler_step", &CostSet::scheduler_step},
    {"staging_access", &CostSet::staging_access},
    {"transposer_op", &CostSet::transposer_op},
    {"sram_bit", &CostSet::sram_bit},
    {"dram_bit", &CostSet::dram_bit},
}};

}  // namespace

CostTable CostTable::defaults() {
  CostTable t;
  constexpr double mult = (8.0 / 24.0) * (8.0 / 24.0);
  t.bf16.mac *= mult;
  t.bf16.static_core *= mult;
  t.bf16.mux_traversal *= 0.5;
  t.bf16.staging_access *= 0.5;
  t.bf16.transposer_op *= 0.5;
  return t;
}

void CostTable::set(std::string_view key, double value) {
  const auto dot = key.find('.');
  if (dot == std::string_view::npos) {
    throw ConfigError("cost key '" + std::string(key) + "' needs a dtype prefix (f32. or bf16.)");
  }
  const std::string_view prefix = key.substr(0, dot);
  const std::string_view name = key.substr(dot + 1);
  CostSet* set = prefix == "f32" ? &f32 : prefix == "bf16" ? &bf16 : nullptr;
  if (set == nullptr) throw ConfigError("unknown cost dtype '" + std::string(prefix) + "'");
  if (!(value >= 0.0)) throw ConfigError("cost '" + std::string(key) + "' must be >= 0");
  for (const auto& [n, field] : kFields) {
    if (n == name) {
      set->*field = value;
      return;
    }
  }
  throw ConfigError("unknown cost field '" + std::string(name) + "'");
}

std::string CostTable::to_text() const {
  std::string out;
  char buf[96];
  for (const auto& [prefix, set] : {std::pair{"f32", &f32}, std::pair{"bf16", &bf16}}) {
    for (const auto& [n, field] : kFields) {
      std::snprintf(buf, sizeof buf, "%s.%.*s=%.17g\n", prefix, static_cast<int>(n.size()),
                    n.data(), set->*field);
      out += buf;
    }
  }
  return out;
}

EnergyBreakdown tally(const EventCounters& ev, const CostSet& c) {
  EnergyBreakdown e;
  e.compute = c.mac * static_cast<double>(ev.macs_issued + ev.idle_lane_slots) +
              c.static_core * static_cast<double>(ev.pe_cycles) +
              c.static_sparse * static_cast<double>(ev.sparse_pe_cycles) +
              c.mux_traversal * static_cast<double>(ev.mux_traversals) +
              c.scheduler_step * static_cast<double>(ev.scheduler_steps) +
              c.staging_access * static_cast<double>(ev.staging_reads + ev.staging_writes) +
              c.transposer_op * static_cast<double>(ev.transposer_ops);
  e.sram = c.sram_bit * static_cast<double>(ev.sram_bits_accessed);
  e.dram = c.dram_bit * static_cast<double>(ev.dram_bits_accessed);
  return e;
}

Efficiency efficiency(std::uint64_t base_cycles, double base_energy, std::uint64_t our_cycles,
                      double our_energy) {
  if (our_cycles == 0) throw UsageError("efficiency: zero cycles in the compared run");
  if (!(our_energy > 0.0)) throw UsageError("efficiency: zero energy in the compared run");
  return {static_cast<double>(base_cycles) / static_cast<double>(our_cycles),
          base_energy / our_energy};
}

}  // namespace lookaside
