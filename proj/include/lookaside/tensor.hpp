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
#include <span>
#include <string_view>
#include <vector>

namespace lookaside {

enum class DType : std::uint8_t { F32 = 0, BF16 = 1 };

// Axis-role tag of a tensor: activations, weights, gradients, outputs.
enum class TensorKind : std::uint8_t { A = 0, W = 1, G = 2, O = 3 };

std::string_view to_string(DType dtype);
std::string_view to_string(TensorKind kind);

// (n, c, h, w): samples-or-filters, channels, rows (y), columns (x).
struct Dims4 {
  std::uint32_t n = 0;
  std::uint32_t c = 0;
  std::uint32_t h = 0;
  std::uint32_t w = 0;

  std::size_t size() const {
    return std::size_t{n} * c * h * w;
  }
  friend bool operator==(const Dims4&, const Dims4&) = default;
};

// Dense 4-D tensor. Storage is logical NCHW; the 16x16 group-major memory
// image is produced by layout_groups(). BF16 tensors keep their values widened
// to float with the low 16 bits cleared.
class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(Dims4 dims, TensorKind kind = TensorKind::A, DType dtype = DType::F32);
  Tensor4(Dims4 dims, std::vector<float> data, TensorKind kind = TensorKind::A,
          DType dtype = DType::F32);

  const Dims4& dims() const { return dims_; }
  TensorKind kind() const { return kind_; }
  DType dtype() const { return dtype_; }
  void set_kind(TensorKind kind) { kind_ = kind; }

  std::size_t size() const { return data_.size(); }
  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  std::size_t index(std::uint32_t n, std::uint32_t c, std::uint32_t y,
                    std::uint32_t x) const {
    return ((std::size_t{n} * dims_.c + c) * dims_.h + y) * dims_.w + x;
  }
  float operator()(std::uint32_t n, std::uint32_t c, std::uint32_t y,
                   std::uint32_t x) const {
    return data_[index(n, c, y, x)];
  }
  float& operator()(std::uint32_t n, std::uint32_t c, std::uint32_t y,
                    std::uint32_t x) {
    return data_[index(n, c, y, x)];
  }

  // Value equality (dims, dtype and elementwise ==); kind is ignored.
  friend bool operator==(const Tensor4& lhs, const Tensor4& rhs);

 private:
  Dims4 dims_;
  TensorKind kind_ = TensorKind::A;
  DType dtype_ = DType::F32;
  std::vector<float> data_;
};

// Bitwise equality, distinguishing -0.0 from 0.0 and comparing NaN payloads.
bool bit_identical(std::span<const float> lhs, std::span<const float> rhs);

struct SparsityStats {
  std::uint64_t total = 0;
  std::uint64_t zeros = 0;

  double fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(total);
  }
};

// The hardware comparator: exact "!= 0". -0.0 is zero, NaN is not.
inline bool is_nonzero(float v) { return v != 0.0f; }

// Bit i set iff block[i] is non-zero. Throws UsageError unless the block has
// exactly 16 values.
std::uint16_t zero_mask(std::span<const float> block);

SparsityStats sparsity_stats(std::span<const float> values);
SparsityStats sparsity_stats(const Tensor4& t);

// all / remaining; remaining == 0 saturates to `total` (the all-zero cap).
double potential_speedup(const SparsityStats& stats);

// Round-to-nearest-even truncation of an f32 to bfloat16, returned widened.
float round_to_bf16(float v);
std::uint16_t bf16_bits(float v);
float bf16_from_bits(std::uint16_t bits);

Tensor4 to_bf16(const Tensor4& t);

}  // namespace lookaside
