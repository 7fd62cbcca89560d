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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lookaside {

inline constexpr std::uint32_t kMaxDepth = 8;
inline constexpr std::uint32_t kMaxLanes = 64;

// A (step, lane) slot of the staging window. step 0 is the dense position.
struct Position {
  std::uint32_t step = 0;
  std::uint32_t lane = 0;
  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

// Lane-0 option expressed relative to lane 0; lane deltas may be negative.
struct OptionOffset {
  std::uint32_t step = 0;
  int lane_delta = 0;
  friend bool operator==(const OptionOffset&, const OptionOffset&) = default;
};

// The sparse interconnect: for every lane, the ordered list of window slots its
// multiplexer can read. Lane i's list is lane 0's list rotated by i.
class ConnectivityMap {
 public:
  // Builds a rotation-invariant map. Offsets that land on an already-listed
  // slot (possible for small lane counts) are dropped, keeping first
  // occurrence. Throws ConfigError on an invalid map.
  static ConnectivityMap from_lane0(std::uint32_t lanes, std::uint32_t depth,
                                    std::span<const OptionOffset> lane0);

  std::uint32_t lanes() const { return lanes_; }
  std::uint32_t depth() const { return depth_; }
  std::span<const Position> options(std::uint32_t lane) const { return options_[lane]; }
  std::size_t option_count() const { return options_.empty() ? 0 : options_[0].size(); }

  // "step:delta step:delta ..." with lane-0 deltas, e.g. "0:0 1:0 1:-1".
  std::string to_text() const;
  static ConnectivityMap parse(std::uint32_t lanes, std::uint32_t depth,
                               const std::string& text);

  friend bool operator==(const ConnectivityMap&, const ConnectivityMap&) = default;

 private:
  std::uint32_t lanes_ = 0;
  std::uint32_t depth_ = 0;
  std::vector<OptionOffset> lane0_;
  std::vector<std::vector<Position>> options_;
};

// Static priority: (+0,i) (+1,i) (+2,i) (+1,i-1) (+1,i+1) (+2,i-2) (+2,i+2)
// (+1,i-3). Depth 2 keeps only the step 0/1 entries. lanes >= 4, depth 2 or 3.
ConnectivityMap default_connectivity(std::uint32_t lanes = 16, std::uint32_t depth = 3);

// depth x lanes bit matrix; bit (s, l) set iff the pair at step s, lane l is
// still present and effectual.
class ZVector {
 public:
  ZVector() = default;
  ZVector(std::uint32_t depth, std::uint32_t lanes);

  std::uint32_t depth() const { return depth_; }
  std::uint32_t lanes() const { return lanes_; }
  std::uint64_t lane_mask() const {
    return lanes_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << lanes_) - 1;
  }

  std::uint64_t row(std::uint32_t step) const { return rows_[step]; }
  void set_row(std::uint32_t step, std::uint64_t bits) { rows_[step] = bits & lane_mask(); }
  bool test(std::uint32_t step, std::uint32_t lane) const {
    return (rows_[step] >> lane) & 1u;
  }
  void set(std::uint32_t step, std::uint32_t lane, bool on = true);
  void fill();
  bool empty() const;
  std::uint32_t popcount() const;
  // Number of leading all-zero rows.
  std::uint32_t leading_empty_rows() const;

  friend bool operator==(const ZVector&, const ZVector&) = default;

 private:
  std::uint32_t depth_ = 0;
  std::uint32_t lanes_ = 0;
  std::array<std::uint64_t, kMaxDepth> rows_{};
};

// Bitwise AND of the A-side and B-side masks. Throws UsageError on shape
// mismatch.
ZVector combine_z(const ZVector& az, const ZVector& bz);

// Ordered lane groups; lanes within one group can never choose the same slot.
struct LevelPartition {
  std::vector<std::vector<std::uint32_t>> groups;
  friend bool operator==(const LevelPartition&, const LevelPartition&) = default;
};

// Greedy packing of lanes 5 apart, each candidate admitted only if its option
// set is disjoint from the group's. Reproduces {0,5,10} ... {4,9,14} {15} for
// the default 16-lane map.
LevelPartition level_partition(const ConnectivityMap& map);

// Throws ConfigError unless `levels` covers every lane once and every group is
// pairwise disjoint as (step, lane) slots.
void verify_levels(const ConnectivityMap& map, const LevelPartition& levels);

inline constexpr std::int8_t kIdle = -1;

struct Schedule {
  std::vector<std::int8_t> ms;  // option index per lane, or kIdle
  std::uint32_t as_count = 0;   // rows drained
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct StepResult {
  Schedule schedule;
  ZVector z_after;
};

// Map and partition flattened into the form the hot loops use.
class Scheduler {
 public:
  Scheduler(const ConnectivityMap& map, const LevelPartition& levels);
  explicit Scheduler(const ConnectivityMap& map);

  const ConnectivityMap& map() const { return map_; }
  const LevelPartition& levels() const { return levels_; }
  std::uint32_t lanes() const { return map_.lanes(); }
  std::uint32_t depth() const { return map_.depth(); }

  // One combinational step: clears selected bits from z, writes per-lane
  // selections to ms (size lanes) and returns the AS count.
  std::uint32_t step(ZVector& z, std::span<std::int8_t> ms) const;

 private:
  struct Choice {
    std::uint8_t step;
    std::uint8_t lane;
  };
  ConnectivityMap map_;
  LevelPartition levels_;
  std::vector<std::uint32_t> order_;  // lanes in level order
  std::size_t options_per_lane_ = 0;
  std::vector<Choice> choices_;       // [lane * options_per_lane_ + k]
};

StepResult schedule_step(const ZVector& z, const ConnectivityMap& map,
                         const LevelPartition& levels);

// Shifts the window up by k rows and appends `fresh` (k masks) at the bottom.
ZVector advance_window(const ZVector& z, std::span<const std::uint64_t> fresh,
                       std::uint32_t k);

}  // namespace lookaside
