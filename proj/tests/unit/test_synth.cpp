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

#include <cmath>

#include "doctest.h"
#include "lookaside/errors.hpp"
#include "lookaside/synth.hpp"

using namespace lookaside;

namespace {

SynthSpec spec(Dims4 d, double s, std::uint64_t seed) {
  SynthSpec sp;
  sp.dims = d;
  sp.sparsity = s;
  sp.seed = seed;
  return sp;
}

}  // namespace

TEST_CASE("endpoints") {
  CHECK(sparsity_stats(synth_tensor(spec({1, 8, 8, 8}, 0.0, 1))).zeros == 0);
  CHECK(sparsity_stats(synth_tensor(spec({1, 8, 8, 8}, 1.0, 1))).zeros == 512);
  CHECK_THROWS_AS(synth_tensor(spec({1, 1, 1, 1}, -0.1, 1)), UsageError);
  CHECK_THROWS_AS(synth_tensor(spec({1, 1, 1, 1}, 1.1, 1)), UsageError);
}

TEST_CASE("i.i.d. sparsity lands on target") {
  const Tensor4 t = synth_tensor(spec({1, 100, 100, 100}, 0.9, 42));
  CHECK(std::fabs(sparsity_stats(t).fraction() - 0.9) < 0.001);
  for (double s : {0.1, 0.3, 0.5, 0.7}) {
    const SparsityStats st = sparsity_stats(synth_tensor(spec({1, 64, 32, 32}, s, 7)));
    const double sigma = std::sqrt(s * (1 - s) / double(st.total));
    CHECK(std::fabs(st.fraction() - s) < 3 * sigma);
  }
}

TEST_CASE("values stay in range and never equal zero") {
  const Tensor4 u = synth_tensor(spec({1, 4, 16, 16}, 0.0, 3));
  for (float v : u.data()) {
    CHECK(v != 0.0f);
    CHECK(std::fabs(v) <= 1.0f);
  }
  SynthSpec si = spec({1, 4, 16, 16}, 0.0, 3);
  si.values = ValueDist::SmallInt;
  for (float v : synth_tensor(si).data()) {
    CHECK(v == std::round(v));
    CHECK(std::fabs(v) >= 1.0f);
    CHECK(std::fabs(v) <= 8.0f);
  }
}

TEST_CASE("generation is deterministic per seed") {
  const Tensor4 a = synth_tensor(spec({2, 3, 5, 7}, 0.4, 9));
  CHECK(a == synth_tensor(spec({2, 3, 5, 7}, 0.4, 9)));
  CHECK_FALSE(a == synth_tensor(spec({2, 3, 5, 7}, 0.4, 10)));
}

TEST_CASE("clustered channels are bimodal") {
  SynthSpec s = spec({2, 64, 24, 24}, 0.7, 5);
  s.pattern = SparsityPattern::ChannelClustered;
  const Tensor4 t = synth_tensor(s);
  int dense = 0, sparse = 0;
  for (std::uint32_t n = 0; n < 2; ++n) {
    for (std::uint32_t c = 0; c < 64; ++c) {
      int zeros = 0;
      for (std::uint32_t y = 0; y < 24; ++y)
        for (std::uint32_t x = 0; x < 24; ++x) zeros += t(n, c, y, x) == 0.0f;
      const double f = zeros / 576.0;
      CHECK((f < 0.1 || f > 0.85));
      (f < 0.1 ? dense : sparse)++;
    }
  }
  CHECK(dense == 32);
  CHECK(sparse == 96);
  CHECK(std::fabs(sparsity_stats(t).fraction() - 0.7) < 0.01);
  const ClusterLevels lv = cluster_levels(0.7, 0.25);
  CHECK(lv.dense < 0.1);
  CHECK(lv.sparse > 0.9);
}
