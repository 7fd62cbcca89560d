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

#include "lookaside/tensor.hpp"

namespace lookaside {

enum class LayerType : std::uint8_t { Conv, FC };

struct ConvShape {
  std::uint32_t stride = 1;
  std::uint32_t kx = 1;
  std::uint32_t ky = 1;
  std::uint32_t in_channels = 0;
  std::uint32_t out_x = 0;  // Nox
  std::uint32_t out_y = 0;  // Noy
  std::uint32_t pad = 0;    // symmetric zero padding; 0 = valid
  LayerType type = LayerType::Conv;
};

// Tensor geometry of one layer:
//   A (samples, C, H, W), W (filters, C, Ky, Kx), G_O (samples, filters, Noy, Nox).
struct LayerSpec {
  std::uint32_t layer_id = 0;
  ConvShape shape;
  Dims4 a_dims;
  Dims4 w_dims;
  Dims4 g_dims;

  static LayerSpec conv(std::uint32_t samples, std::uint32_t channels, std::uint32_t height,
                        std::uint32_t width, std::uint32_t filters, std::uint32_t ky,
                        std::uint32_t kx, std::uint32_t stride = 1, std::uint32_t pad = 0,
                        std::uint32_t layer_id = 0);
  // Fully connected: the kernel covers the whole input, one output per filter.
  static LayerSpec fc(std::uint32_t samples, std::uint32_t channels, std::uint32_t height,
                      std::uint32_t width, std::uint32_t filters, std::uint32_t layer_id = 0);

  // Throws UsageError when the dims are not mutually consistent.
  void validate() const;

  std::uint64_t macs() const {
    return std::uint64_t{g_dims.size()} * shape.in_channels * shape.kx * shape.ky;
  }
};

struct TrainHyper {
  float learning_rate = 0.01f;
  std::uint32_t batch = 1;
};

// O[s][f][oy][ox] = sum_c sum_ky sum_kx A[s][c][oy*s+ky-p][ox*s+kx-p] * W[f][c][ky][kx]
Tensor4 forward_conv(const Tensor4& a, const Tensor4& w, const LayerSpec& layer);

// W_rot[c][f][y][x] = W[f][c][Ky-1-y][Kx-1-x]
Tensor4 reconstruct_rotated_filters(const Tensor4& w);

// Inserts stride-1 zeros between neighbouring spatial elements.
Tensor4 dilate(const Tensor4& g, std::uint32_t stride);

// Gradient of the layer input: dilated, border-padded G_O convolved (stride 1)
// with the rotated, channel-reconstructed filters.
Tensor4 input_grad_conv(const Tensor4& g_o, const Tensor4& w, const LayerSpec& layer);

// Gradient of the weights, summed over the samples of the batch: each input
// channel convolved with the dilated output gradients.
Tensor4 weight_grad_conv(const Tensor4& g_o, const Tensor4& a, const LayerSpec& layer);

// w - lr * (sum of grads) / batch. Throws UsageError when the number of
// gradients differs from hyper.batch.
Tensor4 weight_update(const Tensor4& w, std::span<const Tensor4> grads, const TrainHyper& hyper);

// Geometry of the dilated, padded gradient fed to the input-gradient
// convolution.
struct GradientPadding {
  std::uint32_t top = 0, bottom = 0, left = 0, right = 0;
};
GradientPadding input_grad_padding(const LayerSpec& layer);

}  // namespace lookaside
