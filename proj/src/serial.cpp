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

#include "lookaside/serial.hpp"

#include <algorithm>

#include "lookaside/errors.hpp"

namespace lookaside::serial {

namespace {

Tensor4 conv2d(const Tensor4& in, const Tensor4& filt, std::uint32_t stride, std::uint32_t pad_y,
               std::uint32_t pad_x, std::uint32_t out_h, std::uint32_t out_w, TensorKind kind) {
  const Dims4& id = in.dims();
  const Dims4& fd = filt.dims();
  Tensor4 out({id.n, fd.n, out_h, out_w}, kind, in.dtype());
  for (std::uint32_t s = 0; s < id.n; ++s) {
    for (std::uint32_t f = 0; f < fd.n; ++f) {
      for (std::uint32_t oy = 0; oy < out_h; ++oy) {
        for (std::uint32_t ox = 0; ox < out_w; ++ox) {
          float acc = 0.0f;
          for (std::uint32_t c = 0; c < fd.c; ++c) {
            for (std::uint32_t ky = 0; ky < fd.h; ++ky) {
              const std::int64_t y = std::int64_t{oy} * stride + ky - std::int64_t{pad_y};
              if (y < 0 || y >= id.h) continue;
              for (std::uint32_t kx = 0; kx < fd.w; ++kx) {
                const std::int64_t x = std::int64_t{ox} * stride + kx - std::int64_t{pad_x};
                if (x < 0 || x >= id.w) continue;
                acc += in(s, c, y, x) * filt(f, c, ky, kx);
              }
            }
          }
          out(s, f, oy, ox) = acc;
        }
      }
    }
  }
  return out;
}

void check(const Tensor4& t, const Dims4& want) {
  if (t.dims() != want) throw UsageError("tensor dims disagree with the layer");
}

}  // namespace

Tensor4 forward_conv(const Tensor4& a, const Tensor4& w, const LayerSpec& layer) {
  layer.validate();
  check(a, layer.a_dims);
  check(w, layer.w_dims);
  return conv2d(a, w, layer.shape.stride, layer.shape.pad, layer.shape.pad, layer.shape.out_y,
                layer.shape.out_x, TensorKind::O);
}

Tensor4 input_grad_conv(const Tensor4& g_o, const Tensor4& w, const LayerSpec& layer) {
  layer.validate();
  check(g_o, layer.g_dims);
  check(w, layer.w_dims);
  const GradientPadding pad = input_grad_padding(layer);
  return conv2d(dilate(g_o, layer.shape.stride), reconstruct_rotated_filters(w), 1, pad.top,
                pad.left, layer.a_dims.h, layer.a_dims.w, TensorKind::G);
}

Tensor4 weight_grad_conv(const Tensor4& g_o, const Tensor4& a, const LayerSpec& layer) {
  layer.validate();
  check(g_o, layer.g_dims);
  check(a, layer.a_dims);
  const Tensor4 gd = dilate(g_o, layer.shape.stride);
  const Dims4& dd = gd.dims();
  const Dims4& ad = a.dims();
  const std::int64_t pad = layer.shape.pad;
  Tensor4 out(layer.w_dims, TensorKind::W, a.dtype());
  for (std::uint32_t f = 0; f < layer.w_dims.n; ++f) {
    for (std::uint32_t c = 0; c < layer.w_dims.c; ++c) {
      for (std::uint32_t ky = 0; ky < layer.shape.ky; ++ky) {
        for (std::uint32_t kx = 0; kx < layer.shape.kx; ++kx) {
          float acc = 0.0f;
          for (std::uint32_t s = 0; s < dd.n; ++s) {
            for (std::uint32_t yd = 0; yd < dd.h; ++yd) {
              const std::int64_t y = std::int64_t{ky} + yd - pad;
              if (y < 0 || y >= ad.h) continue;
              for (std::uint32_t xd = 0; xd < dd.w; ++xd) {
                const std::int64_t x = std::int64_t{kx} + xd - pad;
                if (x < 0 || x >= ad.w) continue;
                acc += gd(s, f, yd, xd) * a(s, c, y, x);
              }
            }
          }
          out(f, c, ky, kx) = acc;
        }
      }
    }
  }
  return out;
}

SimResult simulate(const LoweredOp& op, const TileConfig& cfg, const Scheduler* sched) {
  if (cfg.rows == 0 || cfg.cols == 0 || cfg.tiles == 0) throw ConfigError("empty tile geometry");
  if (cfg.pe.lanes != op.lanes) throw ConfigError("PE lanes differ from the lowering lanes");
  SimResult res;
  res.output = Tensor4(op.out_dims, op.out_kind, cfg.pe.dtype);
  if (op.b_count() == 0 || op.a_count() == 0 || op.stream_len == 0) return res;

  std::vector<std::uint64_t> per_tile(cfg.tiles, 0);
  std::size_t job = 0;
  for (std::size_t b0 = 0; b0 < op.b_count(); b0 += cfg.rows) {
    for (std::size_t a0 = 0; a0 < op.a_count(); a0 += cfg.cols, ++job) {
      std::vector<std::span<const float>> bs, as;
      for (std::size_t i = b0; i < std::min(op.b_count(), b0 + cfg.rows); ++i) {
        bs.push_back(op.b_stream(i));
      }
      for (std::size_t i = a0; i < std::min(op.a_count(), a0 + cfg.cols); ++i) {
        as.push_back(op.a_stream(i));
      }
      const TileRunResult tr = tile_run(as, bs, cfg, sched);
      for (std::size_t r = 0; r < bs.size(); ++r) {
        for (std::size_t c = 0; c < as.size(); ++c) {
          res.output.data()[op.b_offset[b0 + r] + op.a_offset[a0 + c]] = tr.result(r, c);
        }
      }
      per_tile[job % cfg.tiles] += tr.cycles;
      res.tile_cycles += tr.cycles;
      res.events += tr.events;
    }
  }
  res.cycles = *std::max_element(per_tile.begin(), per_tile.end());
  res.events.cycles = res.cycles;
  res.events.transposer_ops += op.transposer_ops;
  res.events.dram_bits_accessed +=
      std::uint64_t{op.b_count() + op.a_count()} * op.stream_len * value_bits(cfg.pe.dtype);
  return res;
}

}  // namespace lookaside::serial
