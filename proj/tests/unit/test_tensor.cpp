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

#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "lookaside/errors.hpp"
#include "lookaside/tensor.hpp"
#include "oracle.hpp"

using namespace lookaside;

TEST_CASE("tensor storage is NCHW") {
  Tensor4 t({2, 3, 4, 5});
  CHECK(t.size() == 120);
  CHECK(t.index(1, 2, 3, 4) == 119);
  CHECK(t.index(0, 1, 0, 0) == 20);
  t(1, 0, 2, 3) = 7.0f;
  CHECK(t.data()[t.index(1, 0, 2, 3)] == 7.0f);
  CHECK_THROWS_AS(Tensor4({1, 1, 2, 2}, std::vector<float>(3)), UsageError);
}

TEST_CASE("equality ignores the kind but not the dtype") {
  Tensor4 a({1, 1, 1, 2}, {1.0f, 2.0f}, TensorKind::A);
  Tensor4 b({1, 1, 1, 2}, {1.0f, 2.0f}, TensorKind::G);
  CHECK(a == b);
  Tensor4 c({1, 1, 1, 2}, {1.0f, 2.0f}, TensorKind::A, DType::BF16);
  CHECK_FALSE(a == c);
}

TEST_CASE("sparsity statistics") {
  const std::vector<float> v{0.0f, 1.0f, -0.0f, 2.0f};
  const SparsityStats s = sparsity_stats(v);
  CHECK(s.total == 4);
  CHECK(s.zeros == 2);
  CHECK(s.fraction() == doctest::Approx(0.5));
  CHECK(potential_speedup(s) == doctest::Approx(2.0));
  CHECK(potential_speedup(SparsityStats{}) == 1.0);
  CHECK(potential_speedup(SparsityStats{10, 10}) == 10.0);
  CHECK(potential_speedup(SparsityStats{10, 0}) == 1.0);
}

TEST_CASE("zero mask of a 16-value brick") {
  std::vector<float> b(16, 0.0f);
  CHECK(zero_mask(b) == 0);
  b[0] = 1.0f;
  b[15] = -3.0f;
  CHECK(zero_mask(b) == 0x8001);
  std::vector<float> shorter(15, 1.0f);
  CHECK_THROWS_AS(zero_mask(shorter), UsageError);
}

TEST_CASE("bf16 rounding matches an arithmetic oracle") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint32_t> bits;
  int checked = 0;
  for (int i = 0; i < 200000; ++i) {
    const float v = std::bit_cast<float>(bits(rng));
    if (std::isnan(v) || std::isinf(v)) continue;
    if (std::fabs(v) > 3.3e38f) continue;  // rounds past the largest finite value
    const float want = oracle::bf16(v);
    REQUIRE(std::bit_cast<std::uint32_t>(round_to_bf16(v)) == std::bit_cast<std::uint32_t>(want));
    ++checked;
  }
  CHECK(checked > 150000);
}

TEST_CASE("bf16 ties go to even") {
  // 1 + 2^-8 sits halfway between 1 and 1 + 2^-7.
  CHECK(round_to_bf16(1.0f + std::ldexp(1.0f, -8)) == 1.0f);
  const float odd = 1.0f + std::ldexp(1.0f, -7);
  CHECK(round_to_bf16(odd + std::ldexp(1.0f, -8)) == 1.0f + std::ldexp(1.0f, -6));
  CHECK(round_to_bf16(1.0f + std::ldexp(1.0f, -8) + std::ldexp(1.0f, -20)) == odd);
}

TEST_CASE("bf16 special values") {
  const float inf = std::numeric_limits<float>::infinity();
  CHECK(round_to_bf16(inf) == inf);
  CHECK(round_to_bf16(-inf) == -inf);
  CHECK(std::signbit(round_to_bf16(-0.0f)));
  // A signalling NaN whose payload sits only in the low half stays a NaN.
  const float snan = std::bit_cast<float>(0x7f800001u);
  CHECK(std::isnan(round_to_bf16(snan)));
  CHECK((bf16_bits(snan) & 0x0040u) != 0);
  CHECK(std::isinf(round_to_bf16(std::numeric_limits<float>::max())));
}

TEST_CASE("to_bf16 is idempotent and tags the dtype") {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> nd;
  std::vector<float> v(257);
  for (float& x : v) x = nd(rng);
  const Tensor4 t({1, 1, 1, 257}, v);
  const Tensor4 once = to_bf16(t);
  CHECK(once.dtype() == DType::BF16);
  CHECK(bit_identical(once.data(), to_bf16(once).data()));
  for (float x : once.data()) CHECK((std::bit_cast<std::uint32_t>(x) & 0xffffu) == 0);
}
