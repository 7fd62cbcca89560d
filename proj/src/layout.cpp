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

#include "lookaside/layout.hpp"

namespace lookaside {

GroupSlot GroupedTensor::locate(std::uint32_t n, std::uint32_t c, std::uint32_t y,
                                std::uint32_t x) const {
  const std::size_t cg = c / kGroupEdge;
  const std::size_t xg = x / kGroupEdge;
  const std::size_t per_row = std::size_t{channel_groups()} * column_groups();
  GroupSlot slot;
  slot.group = (std::size_t{n} * dims.h + y) * per_row + xg * channel_groups() + cg;
  slot.block = x % kGroupEdge;
  slot.offset = c % kGroupEdge;
  return slot;
}

GroupedTensor layout_groups(const Tensor4& t) {
  GroupedTensor g;
  g.dims = t.dims();
  g.kind = t.kind();
  g.dtype = t.dtype();
  const Dims4& d = t.dims();
  const std::uint32_t cgs = g.channel_groups();
  const std::uint32_t xgs = g.column_groups();
  g.groups.reserve(std::size_t{d.n} * d.h * cgs * xgs);
  for (std::uint32_t n = 0; n < d.n; ++n) {
    for (std::uint32_t y = 0; y < d.h; ++y) {
      for (std::uint32_t xg = 0; xg < xgs; ++xg) {
        for (std::uint32_t cg = 0; cg < cgs; ++cg) {
          Group& grp = g.groups.emplace_back();
          grp.id = {n, y, cg * kGroupEdge, xg * kGroupEdge};
          for (std::uint32_t b = 0; b < kGroupEdge; ++b) {
            const std::uint32_t x = grp.id.x_base + b;
            for (std::uint32_t o = 0; o < kGroupEdge; ++o) {
              const std::uint32_t c = grp.id.c_base + o;
              if (x < d.w && c < d.c) {
                grp.values[b][o] = t(n, c, y, x);
              } else {
                ++grp.padding;
              }
            }
          }
        }
      }
    }
  }
  return g;
}

Tensor4 unlayout_groups(const GroupedTensor& g) {
  Tensor4 t(g.dims, g.kind, g.dtype);
  const Dims4& d = g.dims;
  for (const Group& grp : g.groups) {
    for (std::uint32_t b = 0; b < kGroupEdge; ++b) {
      const std::uint32_t x = grp.id.x_base + b;
      if (x >= d.w) break;
      for (std::uint32_t o = 0; o < kGroupEdge; ++o) {
        const std::uint32_t c = grp.id.c_base + o;
        if (c >= d.c) break;
        t(grp.id.n, c, grp.id.y, x) = grp.values[b][o];
      }
    }
  }
  return t;
}

Group transpose16(const Group& g, EventCounters& events) {
  Group out;
  out.id = g.id;
  out.padding = g.padding;
  for (std::uint32_t i = 0; i < kGroupEdge; ++i) {
    for (std::uint32_t j = 0; j < kGroupEdge; ++j) out.values[i][j] = g.values[j][i];
  }
  events.transposer_ops += 2 * kGroupEdge;
  return out;
}

Group transpose16(const Group& g) {
  EventCounters scratch;
  return transpose16(g, scratch);
}

}  // namespace lookaside
