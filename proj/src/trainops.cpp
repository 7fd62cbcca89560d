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

#include "lookaside/trainops.hpp"

#include <string>

#include "lookaside/errors.hpp"

namespace lookaside {

namespace {

std::string dims_str(const Dims4& d) {
  return "(" + std::to_string(d.n) + "," + std::to_string(d.c) + "," + std::to_string(d.h) +
         "," + std::to_string(d.w) + ")";
}

void expect_dims(const Tensor4& t, const Dims4& want, const char* what) {
  if (t.dims() != want) {
    throw UsageError(std::string(what) + " has dims " + dims_str(t.dims()) + ", layer expects " +
                     dims_str(want));
  }
}

// Strided cross-correlation with asymmetric zero padding. out[s][f][oy][ox]
// accumulates over c, then ky, then kx.
Tensor4 conv2d(const Tensor4& in, const Tensor4& filt, std::uint32_t stride, std::uint32_t pad_y,
               std::uint32_t pad_x, std::uint32_t out_h, std::uint32_t out_w, TensorKind kind) {
  const Dims4& id = in.dims();
  const Dims4& fd = filt.dims();
  Tensor4 out({id.n, fd.n, out_h, out_w}, kind, in.dtype());
  const auto samples = static_cast<std::int64_t>(id.n);
  const auto filters = static_cast<std::int64_t>(fd.n);
  const auto rows = static_cast<std::int64_t>(out_h);
#pragma omp parallel for collapse(3) schedule(static)
  for (std::int64_t s = 0; s < samples; ++s) {
    for (std::int64_t f = 0; f < filters; ++f) {
      for (std::int64_t oy = 0; oy < rows; ++oy) {
        for (std::uint32_t ox = 0; ox < out_w; ++ox) {
          float acc = 0.0f;
          for (std::uint32_t c = 0; c < fd.c; ++c) {
            for (std::uint32_t ky = 0; ky < fd.h; ++ky) {
              const std::int64_t y = oy * stride + ky - static_cast<std::int64_t>(pad_y);
              if (y < 0 || y >= id.h) continue;
              for (std::uint32_t kx = 0; kx < fd.w; ++kx) {
                const std::int64_t x = std::int64_t{ox} * stride + kx - static_cast<std::int64_t>(pad_x);
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

}  // namespace

LayerSpec LayerSpec::conv(std::uint32_t samples, std::uint32_t channels, std::uint32_t height,
                          std::uint32_t width, std::uint32_t filters, std::uint32_t ky,
                          std::uint32_t kx, std::uint32_t stride, std::uint32_t pad,
                          std::uint32_t layer_id) {
  if (stride == 0) throw UsageError("stride must be positive");
  if (height + 2 * pad < ky || width + 2 * pad < kx) {
    throw UsageError("kernel larger than the padded input");
  }
  LayerSpec l;
  l.layer_id = layer_id;
  l.shape.stride = stride;
  l.shape.kx = kx;
  l.shape.ky = ky;
  l.shape.in_channels = channels;
  l.shape.pad = pad;
  l.shape.out_y = (height + 2 * pad - ky) / stride + 1;
  l.shape.out_x = (width + 2 * pad - kx) / stride + 1;
  l.shape.type = LayerType::Conv;
  l.a_dims = {samples, channels, height, width};
  l.w_dims = {filters, channels, ky, kx};
  l.g_dims = {samples, filters, l.shape.out_y, l.shape.out_x};
  l.validate();
  return l;
}

LayerSpec LayerSpec::fc(std::uint32_t samples, std::uint32_t channels, std::uint32_t height,
                        std::uint32_t width, std::uint32_t filters, std::uint32_t layer_id) {
  LayerSpec l = conv(samples, channels, height, width, filters, height, width, 1, 0, layer_id);
  l.shape.type = LayerType::FC;
  return l;
}

void LayerSpec::validate() const {
  const ConvShape& s = shape;
  if (s.stride == 0) throw UsageError("stride must be positive");
  if (s.kx == 0 || s.ky == 0) throw UsageError("kernel must be non-empty");
  if (s.pad >= s.kx || s.pad >= s.ky) throw UsageError("padding must be smaller than the kernel");
  if (a_dims.c != s.in_channels || w_dims.c != s.in_channels) {
    throw UsageError("channel counts of A and W disagree with the layer");
  }
  if (w_dims.h != s.ky || w_dims.w != s.kx) throw UsageError("weight spatial dims != kernel");
  if (g_dims.n != a_dims.n || g_dims.c != w_dims.n) {
    throw UsageError("gradient dims disagree with samples/filters");
  }
  if (a_dims.h + 2 * s.pad < s.ky || a_dims.w + 2 * s.pad < s.kx) {
    throw UsageError("kernel larger than the padded input");
  }
  if (s.out_y != (a_dims.h + 2 * s.pad - s.ky) / s.stride + 1 ||
      s.out_x != (a_dims.w + 2 * s.pad - s.kx) / s.stride + 1 || g_dims.h != s.out_y ||
      g_dims.w != s.out_x) {
    throw UsageError("output dims do not follow from stride and kernel");
  }
  if (s.type == LayerType::FC && (s.kx != a_dims.w || s.ky != a_dims.h)) {
    throw UsageError("a fully connected layer's kernel must cover the input");
  }
}

Tensor4 forward_conv(const Tensor4& a, const Tensor4& w, const LayerSpec& layer) {
  layer.validate();
  expect_dims(a, layer.a_dims, "activations");
  expect_dims(w, layer.w_dims, "weights");
  return conv2d(a, w, layer.shape.stride, layer.shape.pad, layer.shape.pad, layer.shape.out_y,
                layer.shape.out_x, TensorKind::O);
}

Tensor4 reconstruct_rotated_filters(const Tensor4& w) {
  const Dims4& d = w.dims();
  Tensor4 out({d.c, d.n, d.h, d.w}, w.kind(), w.dtype());
  for (std::uint32_t f = 0; f < d.n; ++f) {
    for (std::uint32_t c = 0; c < d.c; ++c) {
      for (std::uint32_t y = 0; y < d.h; ++y) {
        for (std::uint32_t x = 0; x < d.w; ++x) {
          out(c, f, y, x) = w(f, c, d.h - 1 - y, d.w - 1 - x);
        }
      }
    }
  }
  return out;
}

Tensor4 dilate(const Tensor4& g, std::uint32_t stride) {
  if (stride == 0) throw UsageError("dilation stride must be positive");
  const Dims4& d = g.dims();
  const std::uint32_t h = d.h == 0 ? 0 : (d.h - 1) * stride + 1;
  const std::uint32_t w = d.w == 0 ? 0 : (d.w - 1) * stride + 1;
  Tensor4 out({d.n, d.c, h, w}, g.kind(), g.dtype());
  for (std::uint32_t n = 0; n < d.n; ++n) {
    for (std::uint32_t c = 0; c < d.c; ++c) {
      for (std::uint32_t y = 0; y < d.h; ++y) {
        for (std::uint32_t x = 0; x < d.w; ++x) out(n, c, y * stride, x * stride) = g(n, c, y, x);
      }
    }
  }
  return out;
}

GradientPadding input_grad_padding(const LayerSpec& layer) {
  const ConvShape& s = layer.shape;
  GradientPadding p;
  p.top = s.ky - 1 - s.pad;
  p.left = s.kx - 1 - s.pad;
  // Input rows/cols past the last window never reach an output; the extra
  // bottom/right padding gives them a (zero) gradient slot.
  p.bottom = p.top + (layer.a_dims.h + 2 * s.pad - s.ky) % s.stride;
  p.right = p.left + (layer.a_dims.w + 2 * s.pad - s.kx) % s.stride;
  return p;
}

Tensor4 input_grad_conv(const Tensor4& g_o, const Tensor4& w, const LayerSpec& layer) {
  layer.validate();
  expect_dims(g_o, layer.g_dims, "output gradients");
  expect_dims(w, layer.w_dims, "weights");
  const Tensor4 dilated = dilate(g_o, layer.shape.stride);
  const Tensor4 rotated = reconstruct_rotated_filters(w);
  const GradientPadding pad = input_grad_padding(layer);
  return conv2d(dilated, rotated, 1, pad.top, pad.left, layer.a_dims.h, layer.a_dims.w,
                TensorKind::G);
}

Tensor4 weight_grad_conv(const Tensor4& g_o, const Tensor4& a, const LayerSpec& layer) {
  layer.validate();
  expect_dims(g_o, layer.g_dims, "output gradients");
  expect_dims(a, layer.a_dims, "activations");
  const Tensor4 gd = dilate(g_o, layer.shape.stride);
  const Dims4& dd = gd.dims();
  const Dims4& ad = a.dims();
  const std::int64_t pad = layer.shape.pad;
  Tensor4 out(layer.w_dims, TensorKind::W, a.dtype());
  const auto filters = static_cast<std::int64_t>(layer.w_dims.n);
  const auto channels = static_cast<std::int64_t>(layer.w_dims.c);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::int64_t f = 0; f < filters; ++f) {
    for (std::int64_t c = 0; c < channels; ++c) {
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

Tensor4 weight_update(const Tensor4& w, std::span<const Tensor4> grads, const TrainHyper& hyper) {
  if (hyper.batch == 0) throw UsageError("batch size must be at least 1");
  if (!(hyper.learning_rate >= 0.0f)) throw UsageError("learning rate must be non-negative");
  if (grads.size() != hyper.batch) {
    throw UsageError("expected " + std::to_string(hyper.batch) + " gradients, got " +
                     std::to_string(grads.size()));
  }
  std::vector<float> sum(w.size(), 0.0f);
  for (const Tensor4& g : grads) {
    expect_dims(g, w.dims(), "weight gradient");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g.data()[i];
  }
  std::vector<float> out(w.data().begin(), w.data().end());
  const float scale = 1.0f / static_cast<float>(hyper.batch);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] -= hyper.learning_rate * (sum[i] * scale);
  }
  return Tensor4(w.dims(), std::move(out), w.kind(), w.dtype());
}

}  // namespace lookaside
