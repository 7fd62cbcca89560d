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

#include "lookaside/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lookaside/errors.hpp"

namespace lookaside {

float draw_nonzero(ValueDist dist, std::mt19937_64& rng) {
  if (dist == ValueDist::SmallInt) {
    std::uniform_int_distribution<int> mag(1, 8);
    std::bernoulli_distribution neg(0.5);
    const int v = mag(rng);
    return static_cast<float>(neg(rng) ? -v : v);
  }
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  float v = 0.0f;
  while (v == 0.0f) v = u(rng);
  return v;
}

std::vector<float> synth_stream(std::size_t length, double sparsity, ValueDist dist,
                                std::mt19937_64& rng) {
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw UsageError("sparsity must lie in [0, 1]");
  }
  std::bernoulli_distribution zero(sparsity);
  std::vector<float> out(length, 0.0f);
  for (float& v : out) {
    if (!zero(rng)) v = draw_nonzero(dist, rng);
  }
  return out;
}

ClusterLevels cluster_levels(double sparsity, double dense_channel_fraction) {
  // Dense channels keep 5% zeros; the sparse channels absorb the rest of the
  // budget. Infeasible combinations clamp, shifting the overall fraction.
  constexpr double kDenseZeros = 0.05;
  const double f = dense_channel_fraction;
  ClusterLevels lv;
  lv.dense = std::min(kDenseZeros, sparsity);
  lv.sparse = std::clamp((sparsity - f * lv.dense) / (1.0 - f), 0.0, 1.0);
  return lv;
}

Tensor4 synth_tensor(const SynthSpec& spec) {
  if (!(spec.sparsity >= 0.0 && spec.sparsity <= 1.0)) {
    throw UsageError("sparsity must lie in [0, 1], got " + std::to_string(spec.sparsity));
  }
  std::mt19937_64 rng(spec.seed);
  Tensor4 t(spec.dims, spec.kind);
  if (spec.pattern == SparsityPattern::Iid) {
    std::bernoulli_distribution zero(spec.sparsity);
    for (float& v : t.data()) {
      if (!zero(rng)) v = draw_nonzero(spec.values, rng);
    }
    return t;
  }

  if (!(spec.dense_channel_fraction > 0.0 && spec.dense_channel_fraction < 1.0)) {
    throw UsageError("dense channel fraction must lie in (0, 1)");
  }
  const ClusterLevels lv = cluster_levels(spec.sparsity, spec.dense_channel_fraction);
  const Dims4& d = spec.dims;
  // Which channels are dense is drawn per sample so feature maps differ.
  const auto dense_count = static_cast<std::uint32_t>(
      std::lround(spec.dense_channel_fraction * static_cast<double>(d.c)));
  std::vector<std::uint32_t> channels(d.c);
  for (std::uint32_t n = 0; n < d.n; ++n) {
    for (std::uint32_t c = 0; c < d.c; ++c) channels[c] = c;
    std::shuffle(channels.begin(), channels.end(), rng);
    for (std::uint32_t i = 0; i < d.c; ++i) {
      const std::uint32_t c = channels[i];
      std::bernoulli_distribution zero(i < dense_count ? lv.dense : lv.sparse);
      for (std::uint32_t y = 0; y < d.h; ++y) {
        for (std::uint32_t x = 0; x < d.w; ++x) {
          if (!zero(rng)) t(n, c, y, x) = draw_nonzero(spec.values, rng);
        }
      }
    }
  }
  return t;
}

}  // namespace lookaside
