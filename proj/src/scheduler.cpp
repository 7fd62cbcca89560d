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

#include "lookaside/scheduler.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "lookaside/errors.hpp"

namespace lookaside {

namespace {

std::uint32_t wrap(int lane, std::uint32_t lanes) {
  const int m = static_cast<int>(lanes);
  return static_cast<std::uint32_t>(((lane % m) + m) % m);
}

bool disjoint(std::span<const Position> lhs, std::span<const Position> rhs) {
  for (const Position& p : lhs) {
    if (std::find(rhs.begin(), rhs.end(), p) != rhs.end()) return false;
  }
  return true;
}

}  // namespace

ConnectivityMap ConnectivityMap::from_lane0(std::uint32_t lanes, std::uint32_t depth,
                                            std::span<const OptionOffset> lane0) {
  if (lanes == 0 || lanes > kMaxLanes) {
    throw ConfigError("lane count must be in [1, " + std::to_string(kMaxLanes) + "]");
  }
  if (depth == 0 || depth > kMaxDepth) {
    throw ConfigError("staging depth must be in [1, " + std::to_string(kMaxDepth) + "]");
  }
  if (lane0.empty() || lane0.front().step != 0 || wrap(lane0.front().lane_delta, lanes) != 0) {
    throw ConfigError("option 0 must be the dense slot (0, 0)");
  }
  if (lane0.size() > 127) throw ConfigError("too many options per lane");

  ConnectivityMap map;
  map.lanes_ = lanes;
  map.depth_ = depth;
  std::vector<Position> seen;
  for (const OptionOffset& off : lane0) {
    if (off.step >= depth) {
      throw ConfigError("option step " + std::to_string(off.step) + " exceeds staging depth");
    }
    const Position p{off.step, wrap(off.lane_delta, lanes)};
    if (std::find(seen.begin(), seen.end(), p) != seen.end()) continue;
    seen.push_back(p);
    map.lane0_.push_back(off);
  }
  map.options_.resize(lanes);
  for (std::uint32_t lane = 0; lane < lanes; ++lane) {
    for (const OptionOffset& off : map.lane0_) {
      map.options_[lane].push_back({off.step, wrap(static_cast<int>(lane) + off.lane_delta, lanes)});
    }
  }
  return map;
}

std::string ConnectivityMap::to_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < lane0_.size(); ++i) {
    if (i) os << ' ';
    os << lane0_[i].step << ':' << lane0_[i].lane_delta;
  }
  return os.str();
}

ConnectivityMap ConnectivityMap::parse(std::uint32_t lanes, std::uint32_t depth,
                                       const std::string& text) {
  std::istringstream is(text);
  std::vector<OptionOffset> offsets;
  std::string token;
  while (is >> token) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("connectivity option '" + token + "' is not step:delta");
    }
    try {
      std::size_t used = 0;
      const int step = std::stoi(token.substr(0, colon), &used);
      if (used != colon || step < 0) throw ConfigError("bad step");
      const std::string rest = token.substr(colon + 1);
      const int delta = std::stoi(rest, &used);
      if (used != rest.size()) throw ConfigError("bad delta");
      offsets.push_back({static_cast<std::uint32_t>(step), delta});
    } catch (const std::exception&) {
      throw ConfigError("connectivity option '" + token + "' is not step:delta");
    }
  }
  return from_lane0(lanes, depth, offsets);
}

ConnectivityMap default_connectivity(std::uint32_t lanes, std::uint32_t depth) {
  if (lanes < 4) throw ConfigError("default connectivity needs at least 4 lanes");
  if (depth != 2 && depth != 3) {
    throw ConfigError("default connectivity supports staging depth 2 or 3, got " +
                      std::to_string(depth));
  }
  static constexpr OptionOffset kPriority[] = {
      {0, 0}, {1, 0}, {2, 0}, {1, -1}, {1, +1}, {2, -2}, {2, +2}, {1, -3},
  };
  std::vector<OptionOffset> lane0;
  for (const OptionOffset& off : kPriority) {
    if (off.step < depth) lane0.push_back(off);
  }
  return ConnectivityMap::from_lane0(lanes, depth, lane0);
}

ZVector::ZVector(std::uint32_t depth, std::uint32_t lanes) : depth_(depth), lanes_(lanes) {
  if (depth == 0 || depth > kMaxDepth || lanes == 0 || lanes > kMaxLanes) {
    throw UsageError("Z vector shape out of range");
  }
}

void ZVector::set(std::uint32_t step, std::uint32_t lane, bool on) {
  const std::uint64_t bit = std::uint64_t{1} << lane;
  rows_[step] = on ? (rows_[step] | bit) : (rows_[step] & ~bit);
}

void ZVector::fill() {
  for (std::uint32_t s = 0; s < depth_; ++s) rows_[s] = lane_mask();
}

bool ZVector::empty() const {
  for (std::uint32_t s = 0; s < depth_; ++s) {
    if (rows_[s]) return false;
  }
  return true;
}

std::uint32_t ZVector::popcount() const {
  std::uint32_t n = 0;
  for (std::uint32_t s = 0; s < depth_; ++s) n += std::popcount(rows_[s]);
  return n;
}

std::uint32_t ZVector::leading_empty_rows() const {
  std::uint32_t n = 0;
  while (n < depth_ && rows_[n] == 0) ++n;
  return n;
}

ZVector combine_z(const ZVector& az, const ZVector& bz) {
  if (az.depth() != bz.depth() || az.lanes() != bz.lanes()) {
    throw UsageError("combine_z: Z vector shapes differ");
  }
  ZVector z(az.depth(), az.lanes());
  for (std::uint32_t s = 0; s < az.depth(); ++s) z.set_row(s, az.row(s) & bz.row(s));
  return z;
}

LevelPartition level_partition(const ConnectivityMap& map) {
  constexpr std::uint32_t kStride = 5;
  const std::uint32_t lanes = map.lanes();
  std::vector<bool> assigned(lanes, false);
  LevelPartition levels;
  for (std::uint32_t start = 0; start < lanes; ++start) {
    if (assigned[start]) continue;
    std::vector<std::uint32_t> group{start};
    assigned[start] = true;
    for (std::uint32_t cand = start + kStride; cand < lanes; cand += kStride) {
      if (assigned[cand]) continue;
      const bool fits = std::all_of(group.begin(), group.end(), [&](std::uint32_t member) {
        return disjoint(map.options(member), map.options(cand));
      });
      if (fits) {
        group.push_back(cand);
        assigned[cand] = true;
      }
    }
    levels.groups.push_back(std::move(group));
  }
  verify_levels(map, levels);
  return levels;
}

void verify_levels(const ConnectivityMap& map, const LevelPartition& levels) {
  std::vector<int> seen(map.lanes(), 0);
  for (const auto& group : levels.groups) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (group[i] >= map.lanes()) throw ConfigError("level partition names a lane out of range");
      ++seen[group[i]];
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        if (!disjoint(map.options(group[i]), map.options(group[j]))) {
          throw ConfigError("lanes " + std::to_string(group[i]) + " and " +
                            std::to_string(group[j]) + " share a slot within one level");
        }
      }
    }
  }
  for (std::uint32_t lane = 0; lane < map.lanes(); ++lane) {
    if (seen[lane] != 1) {
      throw ConfigError("level partition must cover lane " + std::to_string(lane) + " exactly once");
    }
  }
}

Scheduler::Scheduler(const ConnectivityMap& map, const LevelPartition& levels)
    : map_(map), levels_(levels) {
  verify_levels(map_, levels_);
  for (const auto& group : levels_.groups) order_.insert(order_.end(), group.begin(), group.end());
  options_per_lane_ = map_.option_count();
  choices_.resize(std::size_t{map_.lanes()} * options_per_lane_);
  for (std::uint32_t lane = 0; lane < map_.lanes(); ++lane) {
    const auto opts = map_.options(lane);
    for (std::size_t k = 0; k < opts.size(); ++k) {
      choices_[lane * options_per_lane_ + k] = {static_cast<std::uint8_t>(opts[k].step),
                                               static_cast<std::uint8_t>(opts[k].lane)};
    }
  }
}

Scheduler::Scheduler(const ConnectivityMap& map) : Scheduler(map, level_partition(map)) {}

std::uint32_t Scheduler::step(ZVector& z, std::span<std::int8_t> ms) const {
  // Lanes of one level cannot collide, so visiting them one after another is
  // equivalent to the parallel encoders of that level.
  for (std::uint32_t lane : order_) {
    std::int8_t pick = kIdle;
    const Choice* c = &choices_[lane * options_per_lane_];
    for (std::size_t k = 0; k < options_per_lane_; ++k, ++c) {
      if (z.test(c->step, c->lane)) {
        z.set(c->step, c->lane, false);
        pick = static_cast<std::int8_t>(k);
        break;
      }
    }
    ms[lane] = pick;
  }
  return z.leading_empty_rows();
}

StepResult schedule_step(const ZVector& z, const ConnectivityMap& map,
                         const LevelPartition& levels) {
  if (z.depth() != map.depth() || z.lanes() != map.lanes()) {
    throw UsageError("schedule_step: Z vector does not match the connectivity map");
  }
  const Scheduler sched(map, levels);
  StepResult result{{std::vector<std::int8_t>(map.lanes(), kIdle), 0}, z};
  result.schedule.as_count = sched.step(result.z_after, result.schedule.ms);
  return result;
}

ZVector advance_window(const ZVector& z, std::span<const std::uint64_t> fresh,
                       std::uint32_t k) {
  if (k > z.depth()) throw UsageError("advance_window: k exceeds staging depth");
  if (fresh.size() != k) throw UsageError("advance_window: expected k fresh rows");
  ZVector out(z.depth(), z.lanes());
  for (std::uint32_t s = 0; s + k < z.depth(); ++s) out.set_row(s, z.row(s + k));
  for (std::uint32_t i = 0; i < k; ++i) out.set_row(z.depth() - k + i, fresh[i]);
  return out;
}

}  // namespace lookaside
