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

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lookaside/errors.hpp"
#include "lookaside/experiment.hpp"

using namespace lookaside;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.set("synthetic", "s=0.5,dims=1,32,8,8,filters=32,k=3,pad=1");
  cfg.set("seeds", "2");
  cfg.set("tiles", "4");
  return cfg;
}

std::size_t count_rows(const std::string& csv) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const std::size_t nl = csv.find('\n', pos);
    if (csv[pos] != '#') ++n;
    pos = nl == std::string::npos ? csv.size() : nl + 1;
  }
  return n - 1;  // header
}

}  // namespace

TEST_CASE("config keys parse and validate") {
  RunConfig cfg;
  CHECK(cfg.tile.rows == 4);
  CHECK(cfg.tile.cols == 4);
  CHECK(cfg.tile.tiles == 16);
  CHECK(cfg.tile.pe.lanes == 16);
  CHECK(cfg.tile.pe.depth == 3);
  cfg.set("rows", "8");
  cfg.set("mode", "sparse-both");
  cfg.set("dtype", "bf16");
  cfg.set("op", "wgrad");
  cfg.set("side", "both");
  cfg.set("bypass", "0.1");
  cfg.set("cost.bf16.mac", "0.5");
  cfg.set("sparsities", "0.2,0.4");
  cfg.set("row_counts", "1,3");
  cfg.set("synthetic", "s=0.3,dims=2,20,6,7,filters=5,k=3,stride=2,pad=0,pattern=clustered,values=int");
  CHECK(cfg.tile.rows == 8);
  CHECK(cfg.tile.pe.mode == PEMode::SparseBoth);
  CHECK(cfg.tile.pe.dtype == DType::BF16);
  CHECK(cfg.op == OpSelect::WGrad);
  CHECK(cfg.side == SidePolicy::Both);
  CHECK(cfg.bypass_threshold == 0.1);
  CHECK(cfg.costs.bf16.mac == 0.5);
  CHECK(cfg.sparsities == std::vector<double>{0.2, 0.4});
  CHECK(cfg.row_counts == std::vector<std::uint32_t>{1, 3});
  CHECK(cfg.synthetic.dims == Dims4{2, 20, 6, 7});
  CHECK(cfg.synthetic.stride == 2);
  CHECK(cfg.synthetic.pattern == SparsityPattern::ChannelClustered);
  CHECK_NOTHROW(cfg.validate());

  CHECK_THROWS_AS(cfg.set("rowz", "1"), ConfigError);
  CHECK_THROWS_AS(cfg.set("rows", "four"), ConfigError);
  CHECK_THROWS_AS(cfg.set("mode", "sparse"), ConfigError);
  CHECK_THROWS_AS(cfg.set("synthetic", "q=1"), ConfigError);

  RunConfig bad;
  bad.side = SidePolicy::Both;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig();
  bad.tile.rows = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig();
  bad.tile.pe.depth = 9;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig();
  bad.synthetic.sparsity = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config files and echo") {
  const auto path = std::filesystem::temp_directory_path() / "lookaside_cfg_test.ini";
  {
    std::ofstream f(path);
    f << "# comment\nrows = 2\n\ncols=8 \ndepth=2\nseed=42\n";
  }
  RunConfig cfg;
  cfg.load_file(path);
  std::filesystem::remove(path);
  CHECK(cfg.tile.rows == 2);
  CHECK(cfg.tile.cols == 8);
  CHECK(cfg.tile.pe.depth == 2);
  CHECK(cfg.seed == 42);
  const std::string echo = cfg.echo();
  for (const char* line : {"# rows=2\n", "# cols=8\n", "# depth=2\n", "# seed=42\n", "# mode=sparse-b\n"}) {
    CHECK(echo.find(line) != std::string::npos);
  }
  CHECK(echo.find("f32.mac=") != std::string::npos);
  CHECK_THROWS_AS(cfg.load_file(path), ConfigError);
}

TEST_CASE("reports are deterministic") {
  const RunConfig cfg = small_config();
  const auto a = simulate_csv(cfg, run_experiment(cfg));
  const auto b = simulate_csv(cfg, run_experiment(cfg));
  CHECK(a == b);
  CHECK(a.rfind("# ", 0) == 0);
  CHECK(count_rows(a) == 3);
}

TEST_CASE("simulate reports per op") {
  RunConfig cfg = small_config();
  const auto rows = run_experiment(cfg);
  REQUIRE(rows.size() == 3);
  for (const OpReport& r : rows) {
    CHECK(r.speedup >= 1.0);
    CHECK(r.speedup <= 3.0);
    CHECK(r.dense_cycles > 0);
    CHECK(r.effectual_fraction <= 1.0);
    CHECK(r.efficiency > 0.0);
  }
  cfg.set("mode", "dense");
  for (const OpReport& r : run_experiment(cfg)) {
    CHECK(r.speedup == 1.0);
    CHECK(r.sparse_cycles == r.dense_cycles);
  }
  cfg = small_config();
  cfg.set("op", "igrad");
  const auto one = run_experiment(cfg);
  REQUIRE(one.size() == 1);
  CHECK(one[0].op == TrainOp::IGrad);
  CHECK(one[0].sparse_side == TensorKind::G);
}

TEST_CASE("sparsity sweep covers nine points") {
  RunConfig cfg = small_config();
  const auto points = run_sweep(cfg);
  CHECK(points.size() == 9 * 2);
  const auto summary = summarize(points);
  REQUIRE(summary.size() == 9);
  for (std::size_t i = 0; i < summary.size(); ++i) {
    CHECK(summary[i].seeds == 2);
    CHECK(summary[i].mean >= 1.0);
    CHECK(summary[i].min <= summary[i].mean);
    CHECK(summary[i].max >= summary[i].mean);
    if (i > 0) CHECK(summary[i].mean >= summary[i - 1].mean * 0.98);
  }
  const std::string csv = sweep_csv(cfg, points);
  CHECK(count_rows(csv) == 9);
}

TEST_CASE("rows sweep") {
  RunConfig cfg = small_config();
  cfg.set("sweep", "rows");
  cfg.set("row_counts", "1,4");
  const auto points = run_sweep(cfg);
  CHECK(points.size() == 2 * 2);
  for (const SweepPoint& p : points) CHECK(p.speedup >= 1.0);
}

TEST_CASE("layers come back out of a trace") {
  SyntheticInput in;
  in.dims = {1, 5, 7, 6};
  in.filters = 3;
  in.kernel = 3;
  in.stride = 2;
  in.pad = 1;
  const LayerInput layer = synthetic_layer(in, 4);
  TraceFile f;
  for (const Tensor4* t : {&layer.tensors.a, &layer.tensors.w, &layer.tensors.g}) {
    TraceRecord r;
    r.name = std::string(to_string(t->kind()));
    r.layer_id = 3;
    r.epoch_id = 1;
    r.stride = 2;
    r.kx = 3;
    r.ky = 3;
    r.tensor = *t;
    f.records.push_back(r);
  }
  const auto layers = layers_from_trace(f);
  REQUIRE(layers.size() == 1);
  CHECK(layers[0].layer_id == 3);
  CHECK(layers[0].epoch_id == 1);
  CHECK(layers[0].spec.shape.stride == 2);
  CHECK(layers[0].spec.g_dims == layer.spec.g_dims);
  f.records.pop_back();
  CHECK_THROWS_AS(layers_from_trace(f), ConfigError);
  f.records.push_back(f.records[0]);
  CHECK_THROWS_AS(layers_from_trace(f), ConfigError);
}

TEST_CASE("compression report round trips") {
  RunConfig cfg = small_config();
  TraceFile out;
  const auto rows = run_compress(cfg, &out);
  REQUIRE(rows.size() == 3);
  for (const CompressReport& r : rows) {
    CHECK(r.round_trip);
    CHECK(r.scheduled_rows <= r.dense_rows);
    CHECK(r.packed_slots <= r.slotted_slots);
    CHECK(r.backside_cycles == 6 * r.scheduled_rows);
  }
  CHECK(out.records.size() == 3);
}
