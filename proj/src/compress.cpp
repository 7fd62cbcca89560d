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

#include "lookaside/compress.hpp"

#include <algorithm>
#include <string>

#include "lookaside/errors.hpp"

namespace lookaside {

std::string_view to_string(AllocMode mode) {
  return mode == AllocMode::Packed ? "packed" : "slotted";
}

std::size_t ScheduledGroup::entry_count() const {
  std::size_t n = 0;
  for (const ScheduledRow& r : rows) {
    for (const ScheduledEntry& e : r.entries) n += is_nonzero(e.value) ? 1 : 0;
  }
  return n;
}

std::size_t ScheduledGroup::storage_slots() const {
  return mode == AllocMode::Slotted ? std::size_t{dense_rows} * lanes : entry_count();
}

double ScheduledGroup::compression_ratio() const {
  if (rows.empty()) return 1.0;
  return static_cast<double>(dense_rows) / static_cast<double>(rows.size());
}

ScheduledGroup compress_group(std::span<const float> dense, const Scheduler& sched,
                              AllocMode mode) {
  const std::uint32_t lanes = sched.lanes();
  const std::uint32_t depth = sched.depth();
  if (dense.size() % lanes != 0) {
    throw UsageError("group of " + std::to_string(dense.size()) +
                     " values is not a whole number of " + std::to_string(lanes) +
                     "-lane rows");
  }
  const std::size_t rows = dense.size() / lanes;
  ScheduledGroup g;
  g.lanes = lanes;
  g.depth = depth;
  g.dense_rows = static_cast<std::uint32_t>(rows);
  g.mode = mode;

  auto mask = [&](std::size_t r) -> std::uint64_t {
    if (r >= rows) return 0;
    std::uint64_t m = 0;
    for (std::uint32_t l = 0; l < lanes; ++l) {
      if (is_nonzero(dense[r * lanes + l])) m |= std::uint64_t{1} << l;
    }
    return m;
  };

  ZVector z(depth, lanes);
  for (std::uint32_t s = 0; s < depth; ++s) z.set_row(s, mask(s));
  std::vector<std::int8_t> ms(lanes, kIdle);
  std::size_t anchor = 0;
  do {
    const std::uint32_t k = sched.step(z, ms);
    ScheduledRow row;
    row.advance = static_cast<std::uint8_t>(k);
    for (std::uint32_t lane = 0; lane < lanes; ++lane) {
      if (ms[lane] == kIdle) {
        if (mode == AllocMode::Slotted) row.entries.push_back({0.0f, static_cast<std::uint8_t>(lane), 0});
        continue;
      }
      const Position p = sched.map().options(lane)[ms[lane]];
      row.entries.push_back({dense[(anchor + p.step) * lanes + p.lane],
                             static_cast<std::uint8_t>(lane), ms[lane]});
    }
    g.rows.push_back(std::move(row));
    for (std::uint32_t s = 0; s + k < depth; ++s) z.set_row(s, z.row(s + k));
    for (std::uint32_t s = depth - k; s < depth; ++s) z.set_row(s, mask(anchor + k + s));
    anchor += k;
  } while (anchor < rows);
  return g;
}

std::vector<float> decompress_group(const ScheduledGroup& g, const ConnectivityMap& map) {
  if (g.lanes != map.lanes() || g.depth != map.depth()) {
    throw CorruptGroup("scheduled group geometry does not match the connectivity map");
  }
  const std::uint32_t lanes = g.lanes;
  std::vector<float> dense(std::size_t{g.dense_rows} * lanes, 0.0f);
  std::vector<bool> written(dense.size(), false);
  std::size_t anchor = 0;
  for (const ScheduledRow& row : g.rows) {
    if (row.advance == 0 || row.advance > g.depth) throw CorruptGroup("bad row advance");
    for (const ScheduledEntry& e : row.entries) {
      if (e.lane >= lanes) throw CorruptGroup("entry lane out of range");
      if (e.idx < 0 || static_cast<std::size_t>(e.idx) >= map.option_count()) {
        throw CorruptGroup("option index " + std::to_string(e.idx) + " out of range");
      }
      if (!is_nonzero(e.value)) continue;
      const Position p = map.options(e.lane)[e.idx];
      const std::size_t r = anchor + p.step;
      if (r >= g.dense_rows) throw CorruptGroup("entry lands past the last dense row");
      const std::size_t i = r * lanes + p.lane;
      if (written[i]) throw CorruptGroup("two entries map to one dense position");
      written[i] = true;
      dense[i] = e.value;
    }
    anchor += row.advance;
  }
  return dense;
}

BacksideResult backside_schedule(std::span<const float> block, const Scheduler& sched,
                                 AllocMode mode, EventCounters* events) {
  BacksideResult out;
  out.group = compress_group(block, sched, mode);
  const std::uint64_t steps = out.group.rows.size();
  out.cycles = steps * sched.levels().groups.size();
  if (events != nullptr) {
    events->scheduler_steps += steps;
    events->cycles += out.cycles;
  }
  return out;
}

std::size_t CompressedTensor::entry_count() const {
  std::size_t n = 0;
  for (const ScheduledGroup& g : groups) n += g.entry_count();
  return n;
}

std::size_t CompressedTensor::storage_slots() const {
  std::size_t n = 0;
  for (const ScheduledGroup& g : groups) n += g.storage_slots();
  return n;
}

std::size_t CompressedTensor::scheduled_rows() const {
  std::size_t n = 0;
  for (const ScheduledGroup& g : groups) n += g.rows.size();
  return n;
}

std::size_t CompressedTensor::dense_rows() const {
  std::size_t n = 0;
  for (const ScheduledGroup& g : groups) n += g.dense_rows;
  return n;
}

CompressedTensor compress_tensor(const Tensor4& t, const Scheduler& sched, AllocMode mode) {
  if (sched.lanes() != kGroupEdge) {
    throw ConfigError("tensor compression needs a " + std::to_string(kGroupEdge) +
                      "-lane scheduler");
  }
  const GroupedTensor grouped = layout_groups(t);
  CompressedTensor c;
  c.dims = t.dims();
  c.kind = t.kind();
  c.dtype = t.dtype();
  c.ids.resize(grouped.groups.size());
  c.groups.resize(grouped.groups.size());
  const auto n = static_cast<std::int64_t>(grouped.groups.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const Group& g = grouped.groups[i];
    c.ids[i] = g.id;
    c.groups[i] = compress_group({&g.values[0][0], kGroupEdge * kGroupEdge}, sched, mode);
  }
  return c;
}

Tensor4 decompress_tensor(const CompressedTensor& c, const ConnectivityMap& map) {
  if (c.ids.size() != c.groups.size()) throw CorruptGroup("group id table size mismatch");
  GroupedTensor grouped;
  grouped.dims = c.dims;
  grouped.kind = c.kind;
  grouped.dtype = c.dtype;
  grouped.groups.resize(c.groups.size());
  for (std::size_t i = 0; i < c.groups.size(); ++i) {
    if (c.groups[i].dense_rows != kGroupEdge) throw CorruptGroup("group is not 16 rows deep");
    const std::vector<float> dense = decompress_group(c.groups[i], map);
    Group& g = grouped.groups[i];
    g.id = c.ids[i];
    std::copy(dense.begin(), dense.end(), &g.values[0][0]);
  }
  return unlayout_groups(grouped);
}

}  // namespace lookaside
