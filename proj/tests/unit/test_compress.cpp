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
#include "lookaside/compress.hpp"
#include "lookaside/errors.hpp"
#include "lookaside/synth.hpp"
#include "oracle.hpp"

using namespace lookaside;

namespace {

std::vector<std::uint64_t> masks(const std::vector<float>& v, std::uint32_t lanes) {
  std::vector<std::uint64_t> m(v.size() / lanes, 0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0.0f) m[i / lanes] |= std::uint64_t{1} << (i % lanes);
  return m;
}

std::vector<std::vector<int>> levels_of(const Scheduler& s) {
  std::vector<std::vector<int>> out;
  for (const auto& g : s.levels().groups) out.emplace_back(g.begin(), g.end());
  return out;
}

}  // namespace

TEST_CASE("a dense group passes through") {
  const Scheduler sched(default_connectivity());
  std::mt19937_64 rng(1);
  const auto v = synth_stream(48, 0.0, ValueDist::Uniform, rng);
  const ScheduledGroup g = compress_group(v, sched);
  REQUIRE(g.rows.size() == 3);
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    const ScheduledRow& r = g.rows[i];
    // the last window only sees padding past the end
    CHECK(r.advance == (i + 1 == g.rows.size() ? 3 : 1));
    REQUIRE(r.entries.size() == 16);
    for (const ScheduledEntry& e : r.entries) CHECK(e.idx == 0);
  }
  CHECK(decompress_group(g, sched.map()) == v);
}

TEST_CASE("an all-zero group is one idle step") {
  const Scheduler sched(default_connectivity());
  const std::vector<float> z(48, 0.0f);
  const ScheduledGroup packed = compress_group(z, sched, AllocMode::Packed);
  REQUIRE(packed.rows.size() == 1);
  CHECK(packed.rows[0].entries.empty());
  CHECK(packed.rows[0].advance == 3);
  const ScheduledGroup slotted = compress_group(z, sched, AllocMode::Slotted);
  REQUIRE(slotted.rows.size() == 1);
  CHECK(slotted.rows[0].entries.size() == 16);
  CHECK(slotted.entry_count() == 0);
  CHECK(decompress_group(slotted, sched.map()) == z);
  CHECK(packed.storage_slots() == 0);
  CHECK(slotted.storage_slots() == 48);
}

TEST_CASE("compressed row count equals the sparse cycle count") {
  const Scheduler sched(default_connectivity());
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = synth_stream(48 * 16, 0.9, ValueDist::Uniform, rng);
    const ScheduledGroup g = compress_group(v, sched);
    CHECK(g.rows.size() == oracle::pe_cycles(masks(v, 16), 16, 3, levels_of(sched)));
    CHECK(g.rows.size() >= 16);
    CHECK(g.rows.size() <= 20);
  }
}

TEST_CASE("a lookaside entry returns to its dense slot") {
  const Scheduler sched(default_connectivity());
  ScheduledGroup g;
  g.lanes = 16;
  g.depth = 3;
  g.dense_rows = 3;
  g.rows.push_back({3, {{5.0f, 8, 3}}});
  const std::vector<float> d = decompress_group(g, sched.map());
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] == (i == 1 * 16 + 7 ? 5.0f : 0.0f));
}

TEST_CASE("round trip at every sparsity level") {
  const Scheduler sched(default_connectivity());
  const Scheduler shallow(default_connectivity(16, 2));
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t rows = 1 + trial % 33;
    const auto v = synth_stream(rows * 16, (trial % 11) / 10.0, ValueDist::Uniform, rng);
    for (const Scheduler* s : {&sched, &shallow}) {
      for (AllocMode mode : {AllocMode::Packed, AllocMode::Slotted}) {
        const ScheduledGroup g = compress_group(v, *s, mode);
        REQUIRE(decompress_group(g, s->map()) == v);
        REQUIRE(g.compression_ratio() >= 1.0);
        REQUIRE(g.compression_ratio() <= s->depth());
        REQUIRE(g.entry_count() == sparsity_stats(v).total - sparsity_stats(v).zeros);
      }
      REQUIRE(compress_group(v, *s, AllocMode::Packed).storage_slots() <=
              compress_group(v, *s, AllocMode::Slotted).storage_slots());
    }
  }
}

TEST_CASE("corrupt groups are rejected") {
  const Scheduler sched(default_connectivity());
  ScheduledGroup g;
  g.lanes = 16;
  g.depth = 3;
  g.dense_rows = 3;
  g.rows.push_back({1, {{1.0f, 0, 8}}});
  CHECK_THROWS_AS(decompress_group(g, sched.map()), CorruptGroup);
  g.rows[0].entries = {{1.0f, 0, -2}};
  CHECK_THROWS_AS(decompress_group(g, sched.map()), CorruptGroup);
  g.rows[0].entries = {{1.0f, 0, 1}, {2.0f, 1, 3}};  // both name (1, 0)
  CHECK_THROWS_AS(decompress_group(g, sched.map()), CorruptGroup);
  g.rows[0].entries = {{1.0f, 16, 0}};
  CHECK_THROWS_AS(decompress_group(g, sched.map()), CorruptGroup);
  g.rows[0] = {0, {}};
  CHECK_THROWS_AS(decompress_group(g, sched.map()), CorruptGroup);
  g.rows[0] = {1, {{1.0f, 0, 2}}};
  g.dense_rows = 2;
  CHECK_THROWS_AS(decompress_group(g, sched.map()), CorruptGroup);
  CHECK_THROWS_AS(decompress_group(compress_group(std::vector<float>(32), sched),
                                   default_connectivity(16, 2)),
                  CorruptGroup);
  CHECK_THROWS_AS(compress_group(std::vector<float>(20), sched), UsageError);
}

TEST_CASE("back-side scheduling costs one cycle per level") {
  const Scheduler sched(default_connectivity());
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto v = synth_stream(16 * (1 + trial % 16), (trial % 10) / 10.0, ValueDist::Uniform, rng);
    EventCounters ev;
    const BacksideResult b = backside_schedule(v, sched, AllocMode::Packed, &ev);
    REQUIRE(b.group == compress_group(v, sched));
    REQUIRE(b.cycles == 6 * b.group.rows.size());
    REQUIRE(ev.cycles == b.cycles);
    REQUIRE(ev.scheduler_steps == b.group.rows.size());
  }
  const BacksideResult z = backside_schedule(std::vector<float>(48), sched);
  CHECK(z.cycles == 6);
  CHECK(z.group.entry_count() == 0);
}

TEST_CASE("tensor compression through 16x16 groups") {
  const Scheduler sched(default_connectivity());
  for (double s : {0.0, 0.5, 0.9, 1.0}) {
    SynthSpec sp;
    sp.dims = {2, 20, 3, 18};
    sp.sparsity = s;
    sp.seed = 9;
    const Tensor4 t = synth_tensor(sp);
    for (AllocMode mode : {AllocMode::Packed, AllocMode::Slotted}) {
      const CompressedTensor c = compress_tensor(t, sched, mode);
      CHECK(c.groups.size() == 2 * 3 * 2 * 2);
      CHECK(c.dense_rows() == c.groups.size() * 16);
      CHECK(c.scheduled_rows() <= c.dense_rows());
      CHECK(c.entry_count() == sparsity_stats(t).total - sparsity_stats(t).zeros);
      const Tensor4 back = decompress_tensor(c, sched.map());
      CHECK(bit_identical(back.data(), t.data()));
      CHECK(back.dims() == t.dims());
    }
  }
  CHECK_THROWS_AS(compress_tensor(Tensor4({1, 1, 1, 1}), Scheduler(default_connectivity(8, 3))), ConfigError);
}
