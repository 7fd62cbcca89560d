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
#include <string>
#include <string_view>
#include <vector>

#include "lookaside/compress.hpp"
#include "lookaside/energy.hpp"
#include "lookaside/lowering.hpp"
#include "lookaside/synth.hpp"
#include "lookaside/trace_io.hpp"
#include "lookaside/tile.hpp"
#include "lookaside/trainops.hpp"

namespace lookaside {

enum class OpSelect : std::uint8_t { Fwd, IGrad, WGrad, All };
enum class SweepAxis : std::uint8_t { Sparsity, Rows };

// A generated layer: A and G_O at `sparsity`, W at `w_sparsity`.
struct SyntheticInput {
  double sparsity = 0.5;
  Dims4 dims{1, 128, 16, 16};  // A tensor
  std::uint32_t filters = 64;
  std::uint32_t kernel = 3;
  std::uint32_t stride = 1;
  std::uint32_t pad = 1;
  double w_sparsity = 0.0;
  SparsityPattern pattern = SparsityPattern::Iid;
  ValueDist values = ValueDist::Uniform;

  LayerSpec layer() const;
};

// Every run setting. Keys accepted by set() match the CLI flag names.
struct RunConfig {
  TileConfig tile;
  OpSelect op = OpSelect::All;
  SidePolicy side = SidePolicy::Auto;
  double bypass_threshold = 0.05;
  std::string costs_path;
  CostTable costs = CostTable::defaults();
  std::string trace_path;
  SyntheticInput synthetic;  // used when trace_path is empty
  std::string out_path;
  std::uint64_t seed = 1;
  std::string connectivity;  // lane-0 "step:delta ..." list; empty = default map
  AllocMode alloc = AllocMode::Packed;
  SweepAxis sweep = SweepAxis::Sparsity;
  std::vector<double> sparsities{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<std::uint32_t> row_counts{1, 2, 4, 8, 16};
  std::uint32_t seeds = 10;

  // Throws ConfigError on an unknown key or a malformed value. "cost.<dtype>.<field>"
  // keys edit the cost table; "costs" loads a cost file.
  void set(std::string_view key, std::string_view value);
  // key=value lines; '#' starts a comment.
  void load_file(const std::filesystem::path& path);
  void validate() const;
  // The resolved settings as "# key=value" lines.
  std::string echo() const;
  Scheduler make_scheduler() const;
};

// One layer's operands with the geometry inferred from them.
struct LayerInput {
  std::uint32_t layer_id = 0;
  std::uint32_t epoch_id = 0;
  LayerSpec spec;
  LayerTensors tensors;
};

// Synthetic layer for `seed` (A, W and G_O drawn from derived seeds).
LayerInput synthetic_layer(const SyntheticInput& in, std::uint64_t seed);

// Groups the dense records of a trace by (layer, epoch). Every group needs
// one A, one W and one G record; padding is inferred from the dims. Throws
// ConfigError otherwise.
std::vector<LayerInput> layers_from_trace(const TraceFile& f);

// Trace layers or the synthetic layer, converted to the configured dtype.
std::vector<LayerInput> load_layers(const RunConfig& cfg);

std::vector<TrainOp> selected_ops(OpSelect sel);

struct OpReport {
  std::uint32_t layer_id = 0;
  std::uint32_t epoch_id = 0;
  TrainOp op = TrainOp::Fwd;
  TensorKind sparse_side = TensorKind::A;
  double side_sparsity = 0.0;
  bool bypass = false;
  std::uint64_t dense_cycles = 0;
  std::uint64_t sparse_cycles = 0;
  double speedup = 1.0;
  double effectual_fraction = 1.0;
  EnergyBreakdown dense_energy;
  EnergyBreakdown sparse_energy;
  double compute_efficiency = 1.0;
  double efficiency = 1.0;  // compute + SRAM + DRAM
  EventCounters dense_events;
  EventCounters sparse_events;
};

// Dense baseline and configured run of one op. With functional = false only
// cycles are simulated and energy fields stay zero.
OpReport run_op(const LayerInput& layer, TrainOp op, const RunConfig& cfg,
                const Scheduler& sched, bool functional = true);

std::vector<OpReport> run_experiment(const RunConfig& cfg);

struct SweepPoint {
  double sparsity = 0.0;
  std::uint32_t rows = 0;
  std::uint64_t seed = 0;
  std::uint64_t dense_cycles = 0;
  std::uint64_t sparse_cycles = 0;
  double speedup = 1.0;
};

struct SweepSummary {
  double sparsity = 0.0;
  std::uint32_t rows = 0;
  std::uint32_t seeds = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double max_deviation = 0.0;  // largest |speedup - mean| / mean
};

// Sparsity axis: the synthetic layer per (s, seed), speedup = total dense
// over total sparse cycles across the selected ops. Rows axis: i.i.d.
// streams at the synthetic sparsity through tiles of every row count.
std::vector<SweepPoint> run_sweep(const RunConfig& cfg);
std::vector<SweepSummary> summarize(const std::vector<SweepPoint>& points);

struct CompressReport {
  std::string name;
  TensorKind kind = TensorKind::A;
  std::size_t groups = 0;
  std::size_t dense_rows = 0;
  std::size_t scheduled_rows = 0;
  std::size_t entries = 0;
  std::size_t packed_slots = 0;
  std::size_t slotted_slots = 0;
  std::uint64_t backside_cycles = 0;
  bool round_trip = false;
};

std::vector<CompressReport> run_compress(const RunConfig& cfg, TraceFile* scheduled_out = nullptr);

// CSV renderings. Each starts with cfg.echo().
std::string analyze_csv(const RunConfig& cfg);
std::string simulate_csv(const RunConfig& cfg, const std::vector<OpReport>& rows);
std::string sweep_csv(const RunConfig& cfg, const std::vector<SweepPoint>& points);
std::string compress_csv(const RunConfig& cfg, const std::vector<CompressReport>& rows);

std::string_view to_string(OpSelect sel);
std::string_view to_string(SweepAxis axis);

}  // namespace lookaside
