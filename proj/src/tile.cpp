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

#include "lookaside/tile.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "lookaside/errors.hpp"
#include "lookaside/synth.hpp"

namespace lookaside {

namespace {

std::size_t check_tile_streams(std::span<const std::span<const float>> a_streams,
                               std::span<const std::span<const float>> b_streams,
                               const TileConfig& cfg) {
  if (a_streams.empty() || b_streams.empty()) throw UsageError("tile_run needs streams");
  if (a_streams.size() > cfg.cols || b_streams.size() > cfg.rows) {
    throw UsageError("more streams than the tile geometry provides");
  }
  const std::size_t len = b_streams.front().size();
  for (auto s : a_streams) {
    if (s.size() != len) throw UsageError("tile streams differ in length");
  }
  for (auto s : b_streams) {
    if (s.size() != len) throw UsageError("tile streams differ in length");
  }
  if (len % cfg.pe.lanes != 0) throw UsageError("tile stream length is not a multiple of lanes");
  return len / cfg.pe.lanes;
}

}  // namespace

TileRunResult tile_run(std::span<const std::span<const float>> a_streams,
                       std::span<const std::span<const float>> b_streams,
                       const TileConfig& cfg, const Scheduler* sched) {
  const std::size_t len_rows = check_tile_streams(a_streams, b_streams, cfg);
  const std::uint32_t lanes = cfg.pe.lanes;
  const auto nr = static_cast<std::uint32_t>(b_streams.size());
  const auto nc = static_cast<std::uint32_t>(a_streams.size());
  const std::uint64_t pes = std::uint64_t{nr} * nc;
  const std::uint32_t bits = value_bits(cfg.pe.dtype);

  TileRunResult out;
  out.rows = nr;
  out.cols = nc;
  out.results.assign(pes, 0.0f);
  EventCounters& ev = out.events;

  if (cfg.pe.mode == PEMode::Dense) {
    for (std::size_t row = 0; row < len_rows; ++row) {
      for (std::uint32_t r = 0; r < nr; ++r) {
        const float* b = b_streams[r].data() + row * lanes;
        for (std::uint32_t c = 0; c < nc; ++c) {
          const float* a = a_streams[c].data() + row * lanes;
          float partial = 0.0f;
          for (std::uint32_t l = 0; l < lanes; ++l) {
            partial += a[l] * b[l];
            if (is_nonzero(a[l]) && is_nonzero(b[l])) ++ev.macs_effectual;
          }
          out.results[r * nc + c] += partial;
        }
      }
    }
    out.cycles = len_rows;
    ev.cycles = len_rows;
    ev.pe_cycles = len_rows * pes;
    ev.macs_issued = len_rows * pes * lanes;
    ev.sram_bits_accessed = len_rows * lanes * std::uint64_t{nr + nc} * bits;
    return out;
  }

  if (sched == nullptr) throw UsageError("sparse tile modes need a connectivity map");
  if (sched->lanes() != lanes || sched->depth() != cfg.pe.depth) {
    throw ConfigError("connectivity map does not match the PE lanes/depth");
  }
  const std::uint32_t depth = cfg.pe.depth;
  const bool both = cfg.pe.mode == PEMode::SparseBoth;
  // SPARSE_B: one scheduler per row. SPARSE_BOTH: one per PE.
  const std::uint32_t units = both ? nr * nc : nr;

  std::vector<std::vector<std::uint64_t>> a_masks(nc), b_masks(nr);
  for (std::uint32_t c = 0; c < nc; ++c) {
    a_masks[c].resize(len_rows);
    for (std::size_t row = 0; row < len_rows; ++row) a_masks[c][row] = row_mask(a_streams[c], row, lanes);
  }
  for (std::uint32_t r = 0; r < nr; ++r) {
    b_masks[r].resize(len_rows);
    for (std::size_t row = 0; row < len_rows; ++row) b_masks[r][row] = row_mask(b_streams[r], row, lanes);
  }
  auto z_row = [&](std::uint32_t unit, std::size_t row) -> std::uint64_t {
    if (row >= len_rows) return 0;
    if (!both) return b_masks[unit][row];
    return b_masks[unit / nc][row] & a_masks[unit % nc][row];
  };

  std::vector<ZVector> z(units, ZVector(depth, lanes));
  for (std::uint32_t u = 0; u < units; ++u) {
    for (std::uint32_t s = 0; s < depth; ++s) z[u].set_row(s, z_row(u, s));
  }
  std::size_t loaded = std::min<std::size_t>(depth, len_rows);

  std::vector<std::int8_t> ms(std::size_t{units} * lanes, kIdle);
  std::size_t anchor = 0;
  while (anchor < len_rows) {
    std::uint32_t k = depth;
    for (std::uint32_t u = 0; u < units; ++u) {
      k = std::min(k, sched->step(z[u], std::span<std::int8_t>(ms).subspan(u * lanes, lanes)));
    }
    if (k == 0) throw std::logic_error("scheduler failed to drain the leading row");

    for (std::uint32_t r = 0; r < nr; ++r) {
      const float* b = b_streams[r].data();
      for (std::uint32_t c = 0; c < nc; ++c) {
        const float* a = a_streams[c].data();
        const std::int8_t* sel = &ms[(both ? r * nc + c : r) * lanes];
        float partial = 0.0f;
        for (std::uint32_t lane = 0; lane < lanes; ++lane) {
          if (sel[lane] == kIdle) {
            ++ev.idle_lane_slots;
            continue;
          }
          const Position p = sched->map().options(lane)[sel[lane]];
          const std::size_t i = (anchor + p.step) * lanes + p.lane;
          partial += a[i] * b[i];
          ++ev.macs_issued;
          if (is_nonzero(a[i]) && is_nonzero(b[i])) ++ev.macs_effectual;
        }
        out.results[r * nc + c] += partial;
      }
    }

    for (std::uint32_t u = 0; u < units; ++u) {
      ZVector& zu = z[u];
      for (std::uint32_t s = 0; s + k < depth; ++s) zu.set_row(s, zu.row(s + k));
      for (std::uint32_t s = depth - k; s < depth; ++s) zu.set_row(s, z_row(u, anchor + k + s));
    }
    for (std::uint32_t s = depth - k; s < depth; ++s) {
      if (anchor + k + s < len_rows) ++loaded;
    }
    anchor += k;
    ++out.cycles;
  }

  const std::uint64_t cycles = out.cycles;
  ev.cycles = cycles;
  ev.pe_cycles = cycles * pes;
  ev.sparse_pe_cycles = cycles * pes;
  ev.scheduler_steps = cycles * units;
  // B-side muxes are per row in SPARSE_B and per PE in SPARSE_BOTH; A-side
  // muxes are always per PE.
  ev.mux_traversals = cycles * lanes * ((both ? pes : nr) + pes);
  ev.staging_reads = ev.macs_issued * 2;
  ev.staging_writes = loaded * lanes * std::uint64_t{nr + nc};
  ev.sram_bits_accessed = loaded * lanes * std::uint64_t{nr + nc} * bits;
  return out;
}

std::vector<GeometryPoint> geometry_sweep(const GeometrySweepSpec& spec) {
  if (spec.row_counts.empty() || spec.col_counts.empty() || spec.seeds == 0) return {};
  const std::uint32_t max_rows = *std::max_element(spec.row_counts.begin(), spec.row_counts.end());
  const std::uint32_t max_cols = *std::max_element(spec.col_counts.begin(), spec.col_counts.end());
  const std::size_t len = std::size_t{spec.stream_rows} * spec.pe.lanes;

  std::vector<std::vector<std::vector<float>>> b_sets(spec.seeds), a_sets(spec.seeds);
  for (std::uint32_t s = 0; s < spec.seeds; ++s) {
    std::mt19937_64 rng(spec.base_seed + s);
    for (std::uint32_t r = 0; r < max_rows; ++r) {
      b_sets[s].push_back(synth_stream(len, spec.b_sparsity, ValueDist::SmallInt, rng));
    }
    for (std::uint32_t c = 0; c < max_cols; ++c) {
      a_sets[s].push_back(synth_stream(len, 0.0, ValueDist::SmallInt, rng));
    }
  }

  const Scheduler sched(default_connectivity(spec.pe.lanes, spec.pe.depth));
  std::vector<GeometryPoint> points;
  for (std::uint32_t rows : spec.row_counts) {
    for (std::uint32_t cols : spec.col_counts) {
      for (std::uint32_t s = 0; s < spec.seeds; ++s) {
        points.push_back({rows, cols, spec.base_seed + s, spec.stream_rows, 0, 1.0});
      }
    }
  }

  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    GeometryPoint& pt = points[i];
    const std::uint32_t s = static_cast<std::uint32_t>(pt.seed - spec.base_seed);
    std::vector<std::span<const float>> a, b;
    for (std::uint32_t c = 0; c < pt.cols; ++c) a.emplace_back(a_sets[s][c]);
    for (std::uint32_t r = 0; r < pt.rows; ++r) b.emplace_back(b_sets[s][r]);
    TileConfig cfg;
    cfg.rows = pt.rows;
    cfg.cols = pt.cols;
    cfg.pe = spec.pe;
    const TileRunResult res = tile_run(a, b, cfg, &sched);
    pt.sparse_cycles = res.cycles;
    pt.speedup = static_cast<double>(pt.dense_cycles) / static_cast<double>(pt.sparse_cycles);
  }
  return points;
}

}  // namespace lookaside
