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

#include <cstdint>
#include <random>
#include <vector>

#include "lookaside/tensor.hpp"

namespace lookaside {

enum class SparsityPattern : std::uint8_t {
  Iid,               // every element zero with probability s
  ChannelClustered,  // a fraction of channels dense, the rest very sparse
};

enum class ValueDist : std::uint8_t {
  Uniform,   // non-zero values uniform in [-1, 1]
  SmallInt,  // non-zero integers in [-8, 8]; every dot product is exact in f32
};

struct SynthSpec {
  Dims4 dims;
  double sparsity = 0.0;
  SparsityPattern pattern = SparsityPattern::Iid;
  double dense_channel_fraction = 0.25;  // ChannelClustered only
  ValueDist values = ValueDist::Uniform;
  std::uint64_t seed = 0;
  TensorKind kind = TensorKind::A;
};

// Zero fractions used for dense and sparse channels by the clustered pattern.
struct ClusterLevels {
  double dense = 0.0;
  double sparse = 0.0;
};
ClusterLevels cluster_levels(double sparsity, double dense_channel_fraction);

// Deterministic for a fixed seed. Throws UsageError when sparsity is outside
// [0, 1] or the clustered fraction is outside (0, 1).
Tensor4 synth_tensor(const SynthSpec& spec);

// One non-zero draw from `dist`.
float draw_nonzero(ValueDist dist, std::mt19937_64& rng);

// Flat i.i.d. stream helper used by the sweeps.
std::vector<float> synth_stream(std::size_t length, double sparsity, ValueDist dist,
                                std::mt19937_64& rng);

}  // namespace lookaside
