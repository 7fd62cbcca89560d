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

#include "lookaside/lowering.hpp"

#include <algorithm>

#include "lookaside/errors.hpp"

namespace lookaside {

std::string_view to_string(TrainOp op) {
  switch (op) {
    case TrainOp::Fwd: return "fwd";
    case TrainOp::IGrad: return "igrad";
    case TrainOp::WGrad: return "wgrad";
  }
  return "?";
}

std::string_view to_string(SidePolicy side) {
  switch (side) {
    case SidePolicy::Auto: return "auto";
    case SidePolicy::A: return "a";
    case SidePolicy::B: return "b";
    case SidePolicy::Both: return "both";
  }
  return "?";
}

namespace {

std::size_t round_up(std::size_t v, std::size_t m) { return (v + m - 1) / m * m; }

std::uint64_t ceil_div(std::uint64_t v, std::uint64_t m) { return (v + m - 1) / m; }

// Two operand sets of one op before the side assignment.
struct OperandSets {
  std::size_t stream_len = 0;
  std::vector<float> act;  // activation/gradient-like operand streams
  std::vector<std::size_t> act_offset;
  TensorKind act_kind = TensorKind::A;
  std::vector<float> other;
  std::vector<std::size_t> other_offset;
  TensorKind other_kind = TensorKind::W;
};

OperandSets lower_fwd(const LayerSpec& l, const LayerTensors& t, std::uint32_t lanes) {
  const ConvShape& sh = l.shape;
  const std::size_t cpad = round_up(sh.in_channels, lanes);
  OperandSets o;
  o.stream_len = std::size_t{sh.ky} * sh.kx * cpad;
  o.act_kind = TensorKind::A;
  o.other_kind = TensorKind::W;
  const Dims4& ad = l.a_dims;
  const std::uint32_t filters = l.w_dims.n;
  const std::size_t plane = std::size_t{sh.out_y} * sh.out_x;

  o.act.assign(std::size_t{ad.n} * plane * o.stream_len, 0.0f);
  for (std::uint32_t s = 0; s < ad.n; ++s) {
    for (std::uint32_t oy = 0; oy < sh.out_y; ++oy) {
      for (std::uint32_t ox = 0; ox < sh.out_x; ++ox) {
        const std::size_t win = (std::size_t{s} * sh.out_y + oy) * sh.out_x + ox;
        float* dst = &o.act[win * o.stream_len];
        for (std::uint32_t ky = 0; ky < sh.ky; ++ky) {
          const std::int64_t y = std::int64_t{oy} * sh.stride + ky - sh.pad;
          for (std::uint32_t kx = 0; kx < sh.kx; ++kx) {
            const std::int64_t x = std::int64_t{ox} * sh.stride + kx - sh.pad;
            float* brick = dst + (std::size_t{ky} * sh.kx + kx) * cpad;
            if (y < 0 || y >= ad.h || x < 0 || x >= ad.w) continue;
            for (std::uint32_t c = 0; c < ad.c; ++c) brick[c] = t.a(s, c, y, x);
          }
        }
        o.act_offset.push_back(std::size_t{s} * filters * plane + std::size_t{oy} * sh.out_x + ox);
      }
    }
  }

  o.other.assign(std::size_t{filters} * o.stream_len, 0.0f);
  for (std::uint32_t f = 0; f < filters; ++f) {
    float* dst = &o.other[f * o.stream_len];
    for (std::uint32_t ky = 0; ky < sh.ky; ++ky) {
      for (std::uint32_t kx = 0; kx < sh.kx; ++kx) {
        float* brick = dst + (std::size_t{ky} * sh.kx + kx) * cpad;
        for (std::uint32_t c = 0; c < sh.in_channels; ++c) brick[c] = t.w(f, c, ky, kx);
      }
    }
    o.other_offset.push_back(std::size_t{f} * plane);
  }
  return o;
}

OperandSets lower_igrad(const LayerSpec& l, const LayerTensors& t, std::uint32_t lanes) {
  const ConvShape& sh = l.shape;
  const std::uint32_t filters = l.w_dims.n;
  const std::size_t fpad = round_up(filters, lanes);
  const GradientPadding gp = input_grad_padding(l);
  const Dims4& ad = l.a_dims;
  const Dims4& gd = l.g_dims;
  const std::int64_t hd = (std::int64_t{gd.h} - 1) * sh.stride + 1;
  const std::int64_t wd = (std::int64_t{gd.w} - 1) * sh.stride + 1;
  const std::size_t plane = std::size_t{ad.h} * ad.w;

  OperandSets o;
  o.stream_len = std::size_t{sh.ky} * sh.kx * fpad;
  o.act_kind = TensorKind::G;
  o.other_kind = TensorKind::W;

  // Windows over the dilated, border-padded gradient.
  o.act.assign(std::size_t{ad.n} * plane * o.stream_len, 0.0f);
  for (std::uint32_t s = 0; s < ad.n; ++s) {
    for (std::uint32_t y = 0; y < ad.h; ++y) {
      for (std::uint32_t x = 0; x < ad.w; ++x) {
        const std::size_t win = (std::size_t{s} * ad.h + y) * ad.w + x;
        float* dst = &o.act[win * o.stream_len];
        for (std::uint32_t ky = 0; ky < sh.ky; ++ky) {
          const std::int64_t yd = std::int64_t{y} + ky - gp.top;
          for (std::uint32_t kx = 0; kx < sh.kx; ++kx) {
            const std::int64_t xd = std::int64_t{x} + kx - gp.left;
            if (yd < 0 || yd >= hd || xd < 0 || xd >= wd) continue;
            if (yd % sh.stride != 0 || xd % sh.stride != 0) continue;  // dilation zero
            float* brick = dst + (std::size_t{ky} * sh.kx + kx) * fpad;
            const auto gy = static_cast<std::uint32_t>(yd / sh.stride);
            const auto gx = static_cast<std::uint32_t>(xd / sh.stride);
            for (std::uint32_t f = 0; f < filters; ++f) brick[f] = t.g(s, f, gy, gx);
          }
        }
        o.act_offset.push_back(std::size_t{s} * ad.c * plane + std::size_t{y} * ad.w + x);
      }
    }
  }

  // Rotated filters, one per input channel, bricked along the filter axis.
  o.other.assign(std::size_t{ad.c} * o.stream_len, 0.0f);
  for (std::uint32_t c = 0; c < ad.c; ++c) {
    float* dst = &o.other[c * o.stream_len];
    for (std::uint32_t ky = 0; ky < sh.ky; ++ky) {
      for (std::uint32_t kx = 0; kx < sh.kx; ++kx) {
        float* brick = dst + (std::size_t{ky} * sh.kx + kx) * fpad;
        for (std::uint32_t f = 0; f < filters; ++f) {
          brick[f] = t.w(f, c, sh.ky - 1 - ky, sh.kx - 1 - kx);
        }
      }
    }
    o.other_offset.push_back(std::size_t{c} * plane);
  }
  return o;
}

OperandSets lower_wgrad(const LayerSpec& l, const LayerTensors& t, std::uint32_t lanes) {
  const ConvShape& sh = l.shape;
  const Dims4& ad = l.a_dims;
  const Dims4& gd = l.g_dims;
  const std::uint32_t hd = (gd.h - 1) * sh.stride + 1;
  const std::uint32_t wd = (gd.w - 1) * sh.stride + 1;
  const std::size_t plane = std::size_t{hd} * wd;

  OperandSets o;
  o.stream_len = round_up(std::size_t{ad.n} * plane, lanes);
  o.act_kind = TensorKind::G;
  o.other_kind = TensorKind::A;
  const std::size_t per_filter = std::size_t{sh.in_channels} * sh.ky * sh.kx;

  o.act.assign(std::size_t{gd.c} * o.stream_len, 0.0f);
  for (std::uint32_t f = 0; f < gd.c; ++f) {
    float* dst = &o.act[f * o.stream_len];
    for (std::uint32_t s = 0; s < gd.n; ++s) {
      for (std::uint32_t oy = 0; oy < gd.h; ++oy) {
        for (std::uint32_t ox = 0; ox < gd.w; ++ox) {
          dst[s * plane + std::size_t{oy} * sh.stride * wd + std::size_t{ox} * sh.stride] =
              t.g(s, f, oy, ox);
        }
      }
    }
    o.act_offset.push_back(f * per_filter);
  }

  o.other.assign(per_filter * o.stream_len, 0.0f);
  for (std::uint32_t c = 0; c < sh.in_channels; ++c) {
    for (std::uint32_t ky = 0; ky < sh.ky; ++ky) {
      for (std::uint32_t kx = 0; kx < sh.kx; ++kx) {
        const std::size_t idx = (std::size_t{c} * sh.ky + ky) * sh.kx + kx;
        float* dst = &o.other[idx * o.stream_len];
        for (std::uint32_t s = 0; s < ad.n; ++s) {
          for (std::uint32_t yd = 0; yd < hd; ++yd) {
            const std::int64_t y = std::int64_t{ky} + yd - sh.pad;
            if (y < 0 || y >= ad.h) continue;
            for (std::uint32_t xd = 0; xd < wd; ++xd) {
              const std::int64_t x = std::int64_t{kx} + xd - sh.pad;
              if (x < 0 || x >= ad.w) continue;
              dst[s * plane + std::size_t{yd} * wd + xd] = t.a(s, c, y, x);
            }
          }
        }
        o.other_offset.push_back(idx);
      }
    }
  }
  return o;
}

}  // namespace

TensorKind choose_sparse_side(TrainOp op, SidePolicy policy, const LayerTensors& t) {
  switch (op) {
    case TrainOp::Fwd:
      return policy == SidePolicy::A ? TensorKind::W : TensorKind::A;
    case TrainOp::IGrad:
      return policy == SidePolicy::A ? TensorKind::W : TensorKind::G;
    case TrainOp::WGrad:
      if (policy == SidePolicy::A) return TensorKind::A;
      if (policy == SidePolicy::B) return TensorKind::G;
      // Ties go to the gradients.
      return sparsity_stats(t.a).fraction() > sparsity_stats(t.g).fraction() ? TensorKind::A
                                                                            : TensorKind::G;
  }
  return TensorKind::A;
}

LoweredOp lower_to_tile(TrainOp op, const LayerSpec& layer, const LayerTensors& t,
                        SidePolicy policy, std::uint32_t lanes) {
  layer.validate();
  if (lanes == 0) throw UsageError("lanes must be positive");
  const bool need_a = op != TrainOp::IGrad;
  const bool need_w = op != TrainOp::WGrad;
  const bool need_g = op != TrainOp::Fwd;
  if ((need_a && t.a.dims() != layer.a_dims) || (need_w && t.w.dims() != layer.w_dims) ||
      (need_g && t.g.dims() != layer.g_dims)) {
    throw UsageError("layer tensors do not match the layer geometry");
  }

  OperandSets sets;
  LoweredOp out;
  out.op = op;
  out.lanes = lanes;
  const ConvShape& sh = layer.shape;
  switch (op) {
    case TrainOp::Fwd:
      sets = lower_fwd(layer, t, lanes);
      out.out_dims = layer.g_dims;
      out.out_kind = TensorKind::O;
      break;
    case TrainOp::IGrad:
      sets = lower_igrad(layer, t, lanes);
      out.out_dims = layer.a_dims;
      out.out_kind = TensorKind::G;
      out.transposer_ops = 32 * ceil_div(layer.w_dims.n, 16) * ceil_div(layer.w_dims.c, 16) *
                           sh.ky * sh.kx;
      break;
    case TrainOp::WGrad:
      sets = lower_wgrad(layer, t, lanes);
      out.out_dims = layer.w_dims;
      out.out_kind = TensorKind::W;
      out.transposer_ops = 32 * ceil_div(layer.g_dims.c, 16) *
                           ceil_div(std::uint64_t{layer.g_dims.n} * layer.g_dims.h * layer.g_dims.w, 16);
      break;
  }
  out.stream_len = sets.stream_len;
  out.useful_macs = layer.macs();

  out.sparse_side = choose_sparse_side(op, policy, t);
  if (out.sparse_side == sets.act_kind) {
    out.b_streams = std::move(sets.act);
    out.b_offset = std::move(sets.act_offset);
    out.a_streams = std::move(sets.other);
    out.a_offset = std::move(sets.other_offset);
  } else {
    out.b_streams = std::move(sets.other);
    out.b_offset = std::move(sets.other_offset);
    out.a_streams = std::move(sets.act);
    out.a_offset = std::move(sets.act_offset);
  }
  return out;
}

SimResult simulate(const LoweredOp& op, const TileConfig& cfg, const Scheduler* sched,
                   SimOptions opts) {
  if (cfg.rows == 0 || cfg.cols == 0 || cfg.tiles == 0) throw ConfigError("empty tile geometry");
  if (cfg.pe.lanes != op.lanes) throw ConfigError("PE lanes differ from the lowering lanes");
  SimResult res;
  res.output = Tensor4(op.out_dims, op.out_kind, cfg.pe.dtype);
  if (op.b_count() == 0 || op.a_count() == 0 || op.stream_len == 0) return res;

  const std::size_t nb = (op.b_count() + cfg.rows - 1) / cfg.rows;
  const std::size_t na = (op.a_count() + cfg.cols - 1) / cfg.cols;
  // With one-side extraction the A operand never reaches the scheduler, so
  // timing depends on the B block alone.
  const bool timing_per_b = !opts.functional && cfg.pe.mode != PEMode::SparseBoth;
  const std::size_t runs = timing_per_b ? nb : nb * na;

  std::vector<std::uint64_t> job_cycles(runs, 0);
  std::vector<EventCounters> job_events(runs);
  float* out = res.output.data().data();
  const auto n = static_cast<std::int64_t>(runs);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t j = 0; j < n; ++j) {
    const std::size_t bj = timing_per_b ? j : j / na;
    const std::size_t aj = timing_per_b ? 0 : j % na;
    const std::size_t b0 = bj * cfg.rows;
    const std::size_t b1 = std::min(op.b_count(), b0 + cfg.rows);
    const std::size_t a0 = aj * cfg.cols;
    const std::size_t a1 = timing_per_b ? a0 + 1 : std::min(op.a_count(), a0 + cfg.cols);
    std::vector<std::span<const float>> bs, as;
    for (std::size_t i = b0; i < b1; ++i) bs.push_back(op.b_stream(i));
    for (std::size_t i = a0; i < a1; ++i) as.push_back(op.a_stream(i));
    const TileRunResult tr = tile_run(as, bs, cfg, sched);
    job_cycles[j] = tr.cycles;
    if (timing_per_b) {
      job_events[j].cycles = tr.cycles;
      continue;
    }
    job_events[j] = tr.events;
    if (opts.functional) {
      for (std::size_t r = 0; r < bs.size(); ++r) {
        for (std::size_t c = 0; c < as.size(); ++c) {
          out[op.b_offset[b0 + r] + op.a_offset[a0 + c]] = tr.result(r, c);
        }
      }
    }
  }

  std::vector<std::uint64_t> per_tile(cfg.tiles, 0);
  std::size_t job = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const std::size_t repeat = timing_per_b ? na : 1;
    for (std::size_t k = 0; k < repeat; ++k, ++job) per_tile[job % cfg.tiles] += job_cycles[r];
    EventCounters ev = job_events[r];
    if (repeat > 1) ev.cycles *= repeat;
    res.events += ev;
    res.tile_cycles += job_cycles[r] * repeat;
  }
  res.cycles = *std::max_element(per_tile.begin(), per_tile.end());
  res.events.cycles = res.cycles;
  res.events.transposer_ops += op.transposer_ops;
  res.events.dram_bits_accessed +=
      std::uint64_t{op.b_count() + op.a_count()} * op.stream_len * value_bits(cfg.pe.dtype);
  return res;
}

}  // namespace lookaside
