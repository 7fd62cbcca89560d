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

#include "lookaside/lowering.hpp"
#include "lookaside/tensor.hpp"
#include "lookaside/trainops.hpp"

// Single-threaded twins of the parallel kernels. They accumulate in the same
// order as the OpenMP versions, so results match bit for bit.
namespace lookaside::serial {

Tensor4 forward_conv(const Tensor4& a, const Tensor4& w, const LayerSpec& layer);
Tensor4 input_grad_conv(const Tensor4& g_o, const Tensor4& w, const LayerSpec& layer);
Tensor4 weight_grad_conv(const Tensor4& g_o, const Tensor4& a, const LayerSpec& layer);

SimResult simulate(const LoweredOp& op, const TileConfig& cfg, const Scheduler* sched);

}  // namespace lookaside::serial
