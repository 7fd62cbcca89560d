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

#include "lookaside/pe.hpp"

#include <stdexcept>
#include <string>

#include "lookaside/errors.hpp"

namespace lookaside {

std::string_view to_string(PEMode mode) {
  switch (mode) {
    case PEMode::Dense: return "dense";
    case PEMode::SparseB: return "sparse-b";
    case PEMode::SparseBoth: return "sparse-both";
  }
  return "?";
}

std::vector<float> pad_to_lanes(std::span<const float> stream, std::uint32_t lanes) {
  std::vector<float> out(stream.begin(), stream.end());
  out.resize((stream.size() + lanes - 1) / lanes * lanes, 0.0f);
  return out;
}

std::uint64_t row_mask(std::span<const float> stream, std::size_t row, std::uint32_t lanes) {
  std::uint64_t mask = 0;
  const float* p = stream.data() + row * lanes;
  for (std::uint32_t l = 0; l < lanes; ++l) {
    if (is_nonzero(p[l])) mask |= std::uint64_t{1} << l;
  }
  return mask;
}

namespace {

std::size_t check_streams(std::span<const float> a, std::span<const float> b,
                          std::uint32_t lanes) {
  if (a.size() != b.size()) {
    throw UsageError("operand streams differ in length (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (lanes == 0 || a.size() % lanes != 0) {
    throw UsageError("stream length " + std::to_string(a.size()) +
                     " is not a multiple of the lane count; pad with zeros");
  }
  return a.size() / lanes;
}

}  // namespace

PERunResult run_dense(std::span<const float> a, std::span<const float> b, const PEConfig& cfg) {
  const std::size_t rows = check_streams(a, b, cfg.lanes);
  PERunResult out;
  for (std::size_t r = 0; r < rows; ++r) {
    float partial = 0.0f;
    for (std::uint32_t l = 0; l < cfg.lanes; ++l) {
      const std::size_t i = r * cfg.lanes + l;
      partial += a[i] * b[i];
      if (is_nonzero(a[i]) && is_nonzero(b[i])) ++out.events.macs_effectual;
    }
    out.accumulator += partial;
  }
  out.cycles = rows;
  EventCounters& ev = out.events;
  ev.cycles = rows;
  ev.pe_cycles = rows;
  ev.macs_issued = rows * cfg.lanes;
  ev.sram_bits_accessed = rows * cfg.lanes * 2ull * value_bits(cfg.dtype);
  return out;
}

PERunResult run_sparse(std::span<const float> a, std::span<const float> b, const PEConfig& cfg,
                       const Scheduler& sched) {
  if (cfg.mode == PEMode::Dense) throw UsageError("run_sparse called with a DENSE config");
  if (sched.lanes() != cfg.lanes || sched.depth() != cfg.depth) {
    throw ConfigError("connectivity map does not match the PE lanes/depth");
  }
  const std::size_t rows = check_streams(a, b, cfg.lanes);
  const std::uint32_t lanes = cfg.lanes;
  const std::uint32_t depth = cfg.depth;
  const bool both = cfg.mode == PEMode::SparseBoth;

  auto z_row = [&](std::size_t r) -> std::uint64_t {
    if (r >= rows) return 0;
    const std::uint64_t bm = row_mask(b, r, lanes);
    return both ? (bm & row_mask(a, r, lanes)) : bm;
  };

  PERunResult out;
  EventCounters& ev = out.events;
  ZVector z(depth, lanes);
  std::size_t loaded = 0;
  for (std::uint32_t s = 0; s < depth; ++s) {
    z.set_row(s, z_row(s));
    if (s < rows) ++loaded;
  }

  std::vector<std::int8_t> ms(lanes, kIdle);
  std::size_t anchor = 0;
  while (anchor < rows) {
    const std::uint32_t k = sched.step(z, ms);
    if (k == 0) throw std::logic_error("scheduler failed to drain the leading row");
    float partial = 0.0f;
    for (std::uint32_t lane = 0; lane < lanes; ++lane) {
      if (ms[lane] == kIdle) {
        ++ev.idle_lane_slots;
        continue;
      }
      const Position p = sched.map().options(lane)[ms[lane]];
      const std::size_t i = (anchor + p.step) * lanes + p.lane;
      partial += a[i] * b[i];
      ++ev.macs_issued;
      if (is_nonzero(a[i]) && is_nonzero(b[i])) ++ev.macs_effectual;
    }
    out.accumulator += partial;

    for (std::uint32_t s = 0; s + k < depth; ++s) z.set_row(s, z.row(s + k));
    for (std::uint32_t s = depth - k; s < depth; ++s) {
      const std::size_t r = anchor + k + s;
      z.set_row(s, z_row(r));
      if (r < rows) ++loaded;
    }
    anchor += k;
    ++out.cycles;
  }

  ev.cycles = out.cycles;
  ev.pe_cycles = out.cycles;
  ev.sparse_pe_cycles = out.cycles;
  ev.scheduler_steps = out.cycles;
  ev.mux_traversals = out.cycles * lanes * 2;
  ev.staging_reads = ev.macs_issued * 2;
  ev.staging_writes = loaded * lanes * 2;
  ev.sram_bits_accessed = loaded * lanes * 2ull * value_bits(cfg.dtype);
  return out;
}

PERunResult run_pe(std::span<const float> a, std::span<const float> b, const PEConfig& cfg,
                   const Scheduler* sched) {
  if (cfg.mode == PEMode::Dense) return run_dense(a, b, cfg);
  if (sched == nullptr) throw UsageError("sparse PE modes need a connectivity map");
  return run_sparse(a, b, cfg, *sched);
}

PEConfig bypass_mode(PEConfig cfg) {
  cfg.mode = PEMode::Dense;
  return cfg;
}

bool should_bypass(const SparsityStats& stats, double threshold) {
  return stats.fraction() < threshold;
}

}  // namespace lookaside
