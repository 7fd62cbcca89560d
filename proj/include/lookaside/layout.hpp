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
#include <vector>

#include "lookaside/events.hpp"
#include "lookaside/tensor.hpp"

namespace lookaside {

inline constexpr std::uint32_t kGroupEdge = 16;

// Origin of a 16x16 group. Groups are aligned by 16 along the channel axis and
// the x axis (along a row), and belong to one (sample, y) pair.
struct GroupId {
  std::uint32_t n = 0;
  std::uint32_t y = 0;
  std::uint32_t c_base = 0;
  std::uint32_t x_base = 0;
  friend bool operator==(const GroupId&, const GroupId&) = default;
};

// values[block][offset]: block b holds x = x_base + b, offset o holds
// channel c_base + o.
struct Group {
  GroupId id;
  std::array<std::array<float, kGroupEdge>, kGroupEdge> values{};
  std::uint32_t padding = 0;  // zero-filled slots beyond the tensor edge
};

// Position of one tensor element inside the grouped image.
struct GroupSlot {
  std::size_t group = 0;  // index into GroupedTensor::groups
  std::uint32_t block = 0;
  std::uint32_t offset = 0;
};

struct GroupedTensor {
  Dims4 dims;
  TensorKind kind = TensorKind::A;
  DType dtype = DType::F32;
  std::vector<Group> groups;

  std::uint32_t channel_groups() const { return (dims.c + kGroupEdge - 1) / kGroupEdge; }
  std::uint32_t column_groups() const { return (dims.w + kGroupEdge - 1) / kGroupEdge; }

  // Index arithmetic of the allocation order: channel groups fastest, then
  // column groups, then rows, then samples.
  GroupSlot locate(std::uint32_t n, std::uint32_t c, std::uint32_t y,
                   std::uint32_t x) const;
};

GroupedTensor layout_groups(const Tensor4& t);
Tensor4 unlayout_groups(const GroupedTensor& g);

// out[i][j] = in[j][i]. Charges 16 wide reads and 16 wide provides.
Group transpose16(const Group& g, EventCounters& events);
Group transpose16(const Group& g);

}  // namespace lookaside
