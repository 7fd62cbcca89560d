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

#include "lookaside/trace_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace lookaside {

std::string_view to_string(TraceErrc code) {
  switch (code) {
    case TraceErrc::BadMagic: return "bad-magic";
    case TraceErrc::Truncated: return "truncated";
    case TraceErrc::VersionMismatch: return "version-mismatch";
    case TraceErrc::DimOverflow: return "dim-overflow";
    case TraceErrc::BadField: return "bad-field";
    case TraceErrc::Io: return "io";
  }
  return "?";
}

std::uint8_t TraceRecord::kind_code() const {
  return scheduled ? kScheduledKind : static_cast<std::uint8_t>(tensor.kind());
}

bool operator==(const TraceRecord& l, const TraceRecord& r) {
  if (l.name != r.name || l.layer_id != r.layer_id || l.epoch_id != r.epoch_id ||
      l.stride != r.stride || l.kx != r.kx || l.ky != r.ky || l.kind_code() != r.kind_code()) {
    return false;
  }
  if (l.scheduled) return *l.scheduled == *r.scheduled;
  return l.tensor.dims() == r.tensor.dims() && l.tensor.dtype() == r.tensor.dtype() &&
         bit_identical(l.tensor.data(), r.tensor.data());
}

bool operator==(const CompressedTensor& l, const CompressedTensor& r) {
  if (l.dims != r.dims || l.kind != r.kind || l.dtype != r.dtype || l.ids != r.ids ||
      l.groups.size() != r.groups.size()) {
    return false;
  }
  for (std::size_t g = 0; g < l.groups.size(); ++g) {
    const ScheduledGroup& a = l.groups[g];
    const ScheduledGroup& b = r.groups[g];
    if (a.lanes != b.lanes || a.depth != b.depth || a.dense_rows != b.dense_rows ||
        a.mode != b.mode || a.rows.size() != b.rows.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      const ScheduledRow& x = a.rows[i];
      const ScheduledRow& y = b.rows[i];
      if (x.advance != y.advance || x.entries.size() != y.entries.size()) return false;
      for (std::size_t e = 0; e < x.entries.size(); ++e) {
        const ScheduledEntry& p = x.entries[e];
        const ScheduledEntry& q = y.entries[e];
        if (p.lane != q.lane || p.idx != q.idx ||
            std::bit_cast<std::uint32_t>(p.value) != std::bit_cast<std::uint32_t>(q.value)) {
          return false;
        }
      }
    }
  }
  return true;
}

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void value(float v, DType d) {
    if (d == DType::F32) {
      u32(std::bit_cast<std::uint32_t>(v));
    } else {
      u16(bf16_bits(v));
    }
  }
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8(const char* what) { return static_cast<std::uint8_t>(le(1, what)); }
  std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(le(2, what)); }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(le(4, what)); }
  float value(DType d, const char* what) {
    if (d == DType::F32) return std::bit_cast<float>(u32(what));
    return bf16_from_bits(u16(what));
  }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw TraceError(TraceErrc::Truncated, std::string("trace truncated while reading ") + what);
    }
  }

 private:
  std::uint64_t le(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::size_t dtype_bytes(DType d) { return d == DType::F32 ? 4 : 2; }

void write_scheduled(Writer& w, const CompressedTensor& c) {
  w.u8(static_cast<std::uint8_t>(c.kind));
  w.u32(static_cast<std::uint32_t>(c.groups.size()));
  for (std::size_t i = 0; i < c.groups.size(); ++i) {
    const GroupId& id = c.ids[i];
    const ScheduledGroup& g = c.groups[i];
    w.u32(id.n);
    w.u32(id.y);
    w.u32(id.c_base);
    w.u32(id.x_base);
    w.u8(static_cast<std::uint8_t>(g.mode));
    w.u8(static_cast<std::uint8_t>(g.lanes));
    w.u8(static_cast<std::uint8_t>(g.depth));
    w.u32(g.dense_rows);
    w.u32(static_cast<std::uint32_t>(g.rows.size()));
    for (const ScheduledRow& r : g.rows) {
      w.u8(r.advance);
      w.u16(static_cast<std::uint16_t>(r.entries.size()));
      for (const ScheduledEntry& e : r.entries) {
        w.value(e.value, c.dtype);
        w.u8(e.lane);
        w.u8(static_cast<std::uint8_t>(e.idx));
      }
    }
  }
}

CompressedTensor read_scheduled(Reader& r, const Dims4& dims, DType dtype) {
  CompressedTensor c;
  c.dims = dims;
  c.dtype = dtype;
  const std::uint8_t kind = r.u8("scheduled kind");
  if (kind > 3) throw TraceError(TraceErrc::BadField, "bad tensor kind in scheduled payload");
  c.kind = static_cast<TensorKind>(kind);
  const std::uint32_t groups = r.u32("group count");
  // Every group needs at least 27 bytes.
  if (groups > r.remaining() / 27) {
    throw TraceError(TraceErrc::Truncated, "group count exceeds the remaining payload");
  }
  c.ids.resize(groups);
  c.groups.resize(groups);
  for (std::uint32_t i = 0; i < groups; ++i) {
    GroupId& id = c.ids[i];
    id.n = r.u32("group id");
    id.y = r.u32("group id");
    id.c_base = r.u32("group id");
    id.x_base = r.u32("group id");
    ScheduledGroup& g = c.groups[i];
    const std::uint8_t mode = r.u8("alloc mode");
    if (mode > 1) throw TraceError(TraceErrc::BadField, "bad allocation mode");
    g.mode = static_cast<AllocMode>(mode);
    g.lanes = r.u8("lanes");
    g.depth = r.u8("depth");
    g.dense_rows = r.u32("dense rows");
    const std::uint32_t rows = r.u32("row count");
    if (rows > r.remaining() / 3) {
      throw TraceError(TraceErrc::Truncated, "row count exceeds the remaining payload");
    }
    g.rows.resize(rows);
    for (ScheduledRow& row : g.rows) {
      row.advance = r.u8("row advance");
      const std::uint16_t n = r.u16("entry count");
      r.need(n * (dtype_bytes(dtype) + 2), "entries");
      row.entries.resize(n);
      for (ScheduledEntry& e : row.entries) {
        e.value = r.value(dtype, "entry value");
        e.lane = r.u8("entry lane");
        e.idx = static_cast<std::int8_t>(r.u8("entry idx"));
      }
    }
  }
  return c;
}

}  // namespace

std::vector<std::uint8_t> serialize_trace(const TraceFile& f) {
  Writer w;
  w.bytes("TDTR");
  w.u32(f.version);
  w.u32(static_cast<std::uint32_t>(f.records.size()));
  for (const TraceRecord& rec : f.records) {
    if (rec.name.size() > 0xFFFF) {
      throw TraceError(TraceErrc::BadField, "record name longer than 65535 bytes");
    }
    const Dims4& d = rec.scheduled ? rec.scheduled->dims : rec.tensor.dims();
    const DType dtype = rec.scheduled ? rec.scheduled->dtype : rec.tensor.dtype();
    w.u16(static_cast<std::uint16_t>(rec.name.size()));
    w.bytes(rec.name);
    w.u8(rec.kind_code());
    w.u8(static_cast<std::uint8_t>(dtype));
    w.u32(rec.layer_id);
    w.u32(rec.epoch_id);
    w.u8(rec.stride);
    w.u16(rec.kx);
    w.u16(rec.ky);
    w.u32(d.n);
    w.u32(d.c);
    w.u32(d.h);
    w.u32(d.w);
    if (rec.scheduled) {
      write_scheduled(w, *rec.scheduled);
    } else {
      for (float v : rec.tensor.data()) w.value(v, dtype);
    }
  }
  return w.take();
}

TraceFile parse_trace(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "TDTR", 4) != 0) {
    throw TraceError(TraceErrc::BadMagic, "not a TDTR trace (bad magic)");
  }
  Reader r(bytes.subspan(4));
  TraceFile f;
  f.version = r.u32("version");
  if (f.version != kTraceVersion) {
    throw TraceError(TraceErrc::VersionMismatch,
                     "unsupported trace version " + std::to_string(f.version));
  }
  const std::uint32_t count = r.u32("record count");
  for (std::uint32_t i = 0; i < count; ++i) {
    TraceRecord rec;
    const std::uint16_t name_len = r.u16("name length");
    rec.name = r.str(name_len, "name");
    const std::uint8_t kind = r.u8("kind");
    const std::uint8_t dtype_code = r.u8("dtype");
    if (kind > kScheduledKind) {
      throw TraceError(TraceErrc::BadField, "unknown record kind " + std::to_string(kind));
    }
    if (dtype_code > 1) {
      throw TraceError(TraceErrc::BadField, "unknown dtype " + std::to_string(dtype_code));
    }
    const auto dtype = static_cast<DType>(dtype_code);
    rec.layer_id = r.u32("layer id");
    rec.epoch_id = r.u32("epoch id");
    rec.stride = r.u8("stride");
    rec.kx = r.u16("kx");
    rec.ky = r.u16("ky");
    Dims4 d;
    d.n = r.u32("dims");
    d.c = r.u32("dims");
    d.h = r.u32("dims");
    d.w = r.u32("dims");
    const unsigned __int128 elems = static_cast<unsigned __int128>(d.n) * d.c * d.h * d.w;
    if (elems > kMaxTraceElements) {
      throw TraceError(TraceErrc::DimOverflow, "record '" + rec.name + "' declares too many elements");
    }
    if (kind == kScheduledKind) {
      rec.scheduled = read_scheduled(r, d, dtype);
      f.records.push_back(std::move(rec));
      continue;
    }
    const auto n = static_cast<std::size_t>(elems);
    r.need(n * dtype_bytes(dtype), "payload");
    std::vector<float> data(n);
    for (float& v : data) v = r.value(dtype, "payload");
    rec.tensor = Tensor4(d, std::move(data), static_cast<TensorKind>(kind), dtype);
    f.records.push_back(std::move(rec));
  }
  if (r.remaining() != 0) {
    throw TraceError(TraceErrc::BadField, "trailing bytes after the last record");
  }
  return f;
}

void write_trace(const std::filesystem::path& path, const TraceFile& f) {
  const std::vector<std::uint8_t> bytes = serialize_trace(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TraceError(TraceErrc::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw TraceError(TraceErrc::Io, "write to " + path.string() + " failed");
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError(TraceErrc::Io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  if (in.bad()) throw TraceError(TraceErrc::Io, "read from " + path.string() + " failed");
  return parse_trace(bytes);
}

}  // namespace lookaside
