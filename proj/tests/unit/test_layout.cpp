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

#include <random>

#include "doctest.h"
#include "lookaside/layout.hpp"
#include "lookaside/synth.hpp"

using namespace lookaside;

namespace {

Tensor4 ramp(Dims4 d) {
  Tensor4 t(d);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = static_cast<float>(i + 1);
  return t;
}

}  // namespace

TEST_CASE("grouping round-trips for ragged dims") {
  for (Dims4 d : {Dims4{1, 16, 1, 16}, Dims4{2, 17, 3, 5}, Dims4{1, 40, 2, 33}, Dims4{3, 1, 1, 1}}) {
    const Tensor4 t = ramp(d);
    const GroupedTensor g = layout_groups(t);
    CHECK(g.groups.size() == std::size_t{d.n} * d.h * g.channel_groups() * g.column_groups());
    CHECK(unlayout_groups(g) == t);
  }
}

TEST_CASE("a group holds 16 channel bricks of consecutive x") {
  const Tensor4 t = ramp({1, 32, 2, 20});
  const GroupedTensor g = layout_groups(t);
  for (std::uint32_t y = 0; y < 2; ++y) {
    for (std::uint32_t x = 0; x < 20; ++x) {
      for (std::uint32_t c = 0; c < 32; ++c) {
        const GroupSlot s = g.locate(0, c, y, x);
        const Group& grp = g.groups[s.group];
        REQUIRE(grp.values[s.block][s.offset] == t(0, c, y, x));
        REQUIRE(grp.id.c_base == c / 16 * 16);
        REQUIRE(grp.id.x_base == x / 16 * 16);
        REQUIRE(grp.id.y == y);
      }
    }
  }
}

TEST_CASE("allocation order: channel groups, then column groups, then rows, then samples") {
  const GroupedTensor g = layout_groups(ramp({2, 32, 2, 32}));
  REQUIRE(g.groups.size() == 16);
  CHECK(g.groups[0].id == GroupId{0, 0, 0, 0});
  CHECK(g.groups[1].id == GroupId{0, 0, 16, 0});
  CHECK(g.groups[2].id == GroupId{0, 0, 0, 16});
  CHECK(g.groups[4].id == GroupId{0, 1, 0, 0});
  CHECK(g.groups[8].id == GroupId{1, 0, 0, 0});
}

TEST_CASE("edge groups count their padding") {
  const GroupedTensor g = layout_groups(ramp({1, 20, 1, 18}));
  // channel groups {0,16} x column groups {0,16}
  CHECK(g.groups[0].padding == 0);
  CHECK(g.groups[1].padding == 256 - 4 * 16);
  CHECK(g.groups[2].padding == 256 - 16 * 2);
  CHECK(g.groups[3].padding == 256 - 4 * 2);
}

TEST_CASE("transposer swaps blocks and offsets") {
  Group g;
  for (std::uint32_t i = 0; i < 16; ++i)
    for (std::uint32_t j = 0; j < 16; ++j) g.values[i][j] = static_cast<float>(i * 16 + j);
  EventCounters ev;
  const Group t = transpose16(g, ev);
  CHECK(ev.transposer_ops == 32);
  for (std::uint32_t i = 0; i < 16; ++i)
    for (std::uint32_t j = 0; j < 16; ++j) REQUIRE(t.values[i][j] == g.values[j][i]);
  CHECK(transpose16(t).values == g.values);
}

TEST_CASE("transposition gives every tensor access order from one layout") {
  SynthSpec s;
  s.dims = {1, 16, 1, 16};
  s.sparsity = 0.3;
  s.seed = 5;
  const Tensor4 t = synth_tensor(s);
  const Group g = layout_groups(t).groups[0];
  const Group tr = transpose16(g);
  // Row c of the transposed group walks x for a fixed channel.
  for (std::uint32_t c = 0; c < 16; ++c)
    for (std::uint32_t x = 0; x < 16; ++x) REQUIRE(tr.values[c][x] == t(0, c, 0, x));
}
