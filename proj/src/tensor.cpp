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

#include "lookaside/tensor.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "lookaside/errors.hpp"

namespace lookaside {

std::string_view to_string(DType dtype) {
  return dtype == DType::F32 ? "f32" : "bf16";
}

std::string_view to_string(TensorKind kind) {
  switch (kind) {
    case TensorKind::A: return "A";
    case TensorKind::W: return "W";
    case TensorKind::G: return "G";
    case TensorKind::O: return "O";
  }
  return "?";
}

Tensor4::Tensor4(Dims4 dims, TensorKind kind, DType dtype)
    : dims_(dims), kind_(kind), dtype_(dtype), data_(dims.size(), 0.0f) {}

Tensor4::Tensor4(Dims4 dims, std::vector<float> data, TensorKind kind, DType dtype)
    : dims_(dims), kind_(kind), dtype_(dtype), data_(std::move(data)) {
  if (data_.size() != dims_.size()) {
    throw UsageError("tensor data length " + std::to_string(data_.size()) +
                     " does not match dims " + std::to_string(dims_.size()));
  }
}

bool operator==(const Tensor4& lhs, const Tensor4& rhs) {
  return lhs.dims_ == rhs.dims_ && lhs.dtype_ == rhs.dtype_ && lhs.data_ == rhs.data_;
}

bool bit_identical(std::span<const float> lhs, std::span<const float> rhs) {
  return lhs.size() == rhs.size() &&
         (lhs.empty() || std::memcmp(lhs.data(), rhs.data(), lhs.size_bytes()) == 0);
}

std::uint16_t zero_mask(std::span<const float> block) {
  if (block.size() != 16) {
    throw UsageError("zero_mask expects 16 values, got " + std::to_string(block.size()));
  }
  std::uint16_t mask = 0;
  for (std::size_t i = 0; i < 16; ++i) {
    if (is_nonzero(block[i])) mask |= static_cast<std::uint16_t>(1u << i);
  }
  return mask;
}

SparsityStats sparsity_stats(std::span<const float> values) {
  SparsityStats stats;
  stats.total = values.size();
  for (float v : values) stats.zeros += is_nonzero(v) ? 0 : 1;
  return stats;
}

SparsityStats sparsity_stats(const Tensor4& t) { return sparsity_stats(t.data()); }

double potential_speedup(const SparsityStats& stats) {
  if (stats.total == 0) return 1.0;
  const std::uint64_t remaining = stats.total - stats.zeros;
  if (remaining == 0) return static_cast<double>(stats.total);
  return static_cast<double>(stats.total) / static_cast<double>(remaining);
}

std::uint16_t bf16_bits(float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  if ((bits & 0x7f800000u) == 0x7f800000u && (bits & 0x007fffffu) != 0) {
    // Quiet the NaN so truncation cannot turn it into an infinity.
    return static_cast<std::uint16_t>((bits >> 16) | 0x0040u);
  }
  const std::uint32_t lsb = (bits >> 16) & 1u;
  bits += 0x7fffu + lsb;
  return static_cast<std::uint16_t>(bits >> 16);
}

float bf16_from_bits(std::uint16_t bits) {
  return std::bit_cast<float>(static_cast<std::uint32_t>(bits) << 16);
}

float round_to_bf16(float v) { return bf16_from_bits(bf16_bits(v)); }

Tensor4 to_bf16(const Tensor4& t) {
  std::vector<float> out(t.data().begin(), t.data().end());
  for (float& v : out) v = round_to_bf16(v);
  return Tensor4(t.dims(), std::move(out), t.kind(), DType::BF16);
}

}  // namespace lookaside
