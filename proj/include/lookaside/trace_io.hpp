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
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lookaside/compress.hpp"
#include "lookaside/tensor.hpp"

namespace lookaside {

inline constexpr std::uint32_t kTraceVersion = 1;
inline constexpr std::uint8_t kScheduledKind = 4;
// Largest element count a record may declare.
inline constexpr std::uint64_t kMaxTraceElements = std::uint64_t{1} << 32;

enum class TraceErrc { BadMagic, Truncated, VersionMismatch, DimOverflow, BadField, Io };

std::string_view to_string(TraceErrc code);

class TraceError : public std::runtime_error {
 public:
  TraceError(TraceErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  TraceErrc code() const { return code_; }

 private:
  TraceErrc code_;
};

// One named tensor. Kinds 0-3 carry a dense Tensor4; kind 4 carries a tensor
// in scheduled form (the dims and dtype fields then describe the dense
// tensor it expands to).
struct TraceRecord {
  std::string name;
  std::uint32_t layer_id = 0;
  std::uint32_t epoch_id = 0;
  std::uint8_t stride = 1;
  std::uint16_t kx = 1;
  std::uint16_t ky = 1;
  Tensor4 tensor;
  std::optional<CompressedTensor> scheduled;

  std::uint8_t kind_code() const;
  friend bool operator==(const TraceRecord&, const TraceRecord&);
};

struct TraceFile {
  std::uint32_t version = kTraceVersion;
  std::vector<TraceRecord> records;
  friend bool operator==(const TraceFile&, const TraceFile&) = default;
};

bool operator==(const CompressedTensor& lhs, const CompressedTensor& rhs);

std::vector<std::uint8_t> serialize_trace(const TraceFile& f);
// Throws TraceError. Trailing bytes after the last record are a BadField.
TraceFile parse_trace(std::span<const std::uint8_t> bytes);

void write_trace(const std::filesystem::path& path, const TraceFile& f);
TraceFile read_trace(const std::filesystem::path& path);

}  // namespace lookaside
