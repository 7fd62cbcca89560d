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

#include "lookaside/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>

#include "lookaside/errors.hpp"

namespace lookaside {

std::string_view to_string(OpSelect sel) {
  switch (sel) {
    case OpSelect::Fwd: return "fwd";
    case OpSelect::IGrad: return "igrad";
    case OpSelect::WGrad: return "wgrad";
    case OpSelect::All: return "all";
  }
  return "?";
}

std::string_view to_string(SweepAxis axis) {
  return axis == SweepAxis::Sparsity ? "sparsity" : "rows";
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s = trim(v);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) bad_value(key, v);
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  const std::string s = trim(v);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) bad_value(key, v);
  return out;
}

std::uint32_t to_u32(std::string_view key, std::string_view v) {
  const std::uint64_t x = to_u64(key, v);
  if (x > 0xFFFFFFFFu) bad_value(key, v);
  return static_cast<std::uint32_t>(x);
}

template <typename E, std::size_t N>
E to_enum(std::string_view key, std::string_view v, const std::pair<std::string_view, E> (&table)[N]) {
  const std::string s = trim(v);
  for (const auto& [name, e] : table) {
    if (name == s) return e;
  }
  bad_value(key, v);
}

constexpr std::pair<std::string_view, PEMode> kModes[] = {
    {"dense", PEMode::Dense}, {"sparse-b", PEMode::SparseB}, {"sparse-both", PEMode::SparseBoth}};
constexpr std::pair<std::string_view, DType> kDTypes[] = {{"f32", DType::F32},
                                                          {"bf16", DType::BF16}};
constexpr std::pair<std::string_view, OpSelect> kOps[] = {{"fwd", OpSelect::Fwd},
                                                          {"igrad", OpSelect::IGrad},
                                                          {"wgrad", OpSelect::WGrad},
                                                          {"all", OpSelect::All}};
constexpr std::pair<std::string_view, SidePolicy> kSides[] = {{"auto", SidePolicy::Auto},
                                                              {"a", SidePolicy::A},
                                                              {"b", SidePolicy::B},
                                                              {"both", SidePolicy::Both}};
constexpr std::pair<std::string_view, AllocMode> kAlloc[] = {{"packed", AllocMode::Packed},
                                                             {"slotted", AllocMode::Slotted}};
constexpr std::pair<std::string_view, SweepAxis> kAxes[] = {{"sparsity", SweepAxis::Sparsity},
                                                            {"rows", SweepAxis::Rows}};
constexpr std::pair<std::string_view, SparsityPattern> kPatterns[] = {
    {"iid", SparsityPattern::Iid}, {"clustered", SparsityPattern::ChannelClustered}};
constexpr std::pair<std::string_view, ValueDist> kValues[] = {{"uniform", ValueDist::Uniform},
                                                              {"int", ValueDist::SmallInt}};

// "s=0.5,dims=1,128,16,16,filters=64": a token without '=' continues the
// previous key's list.
void parse_synthetic(SyntheticInput& in, std::string_view text) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (const std::string& tok : split(text, ',')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      if (kv.empty()) bad_value("synthetic", text);
      kv.back().second += "," + tok;
    } else {
      kv.emplace_back(trim(tok.substr(0, eq)), trim(tok.substr(eq + 1)));
    }
  }
  for (const auto& [k, v] : kv) {
    if (k == "s") {
      in.sparsity = to_double("synthetic.s", v);
    } else if (k == "dims") {
      const auto parts = split(v, ',');
      if (parts.size() != 4) bad_value("synthetic.dims", v);
      in.dims = {to_u32("dims", parts[0]), to_u32("dims", parts[1]), to_u32("dims", parts[2]),
                 to_u32("dims", parts[3])};
    } else if (k == "filters") {
      in.filters = to_u32("synthetic.filters", v);
    } else if (k == "k") {
      in.kernel = to_u32("synthetic.k", v);
    } else if (k == "stride") {
      in.stride = to_u32("synthetic.stride", v);
    } else if (k == "pad") {
      in.pad = to_u32("synthetic.pad", v);
    } else if (k == "ws") {
      in.w_sparsity = to_double("synthetic.ws", v);
    } else if (k == "pattern") {
      in.pattern = to_enum("synthetic.pattern", v, kPatterns);
    } else if (k == "values") {
      in.values = to_enum("synthetic.values", v, kValues);
    } else {
      throw ConfigError("unknown synthetic field '" + k + "'");
    }
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs, const char* f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(f, static_cast<double>(xs[i]));
  }
  return out;
}

std::string synthetic_text(const SyntheticInput& in) {
  std::string s = "s=" + fmt("%g", in.sparsity) + ",dims=" + std::to_string(in.dims.n) + "," +
                  std::to_string(in.dims.c) + "," + std::to_string(in.dims.h) + "," +
                  std::to_string(in.dims.w) + ",filters=" + std::to_string(in.filters) +
                  ",k=" + std::to_string(in.kernel) + ",stride=" + std::to_string(in.stride) +
                  ",pad=" + std::to_string(in.pad) + ",ws=" + fmt("%g", in.w_sparsity) +
                  ",pattern=" + (in.pattern == SparsityPattern::Iid ? "iid" : "clustered") +
                  ",values=" + (in.values == ValueDist::Uniform ? "uniform" : "int");
  return s;
}

std::vector<std::pair<std::string, std::string>> read_kv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

}  // namespace

LayerSpec SyntheticInput::layer() const {
  try {
    return LayerSpec::conv(dims.n, dims.c, dims.h, dims.w, filters, kernel, kernel, stride, pad);
  } catch (const UsageError& e) {
    throw ConfigError(std::string("synthetic layer: ") + e.what());
  }
}

void RunConfig::set(std::string_view key_in, std::string_view value) {
  const std::string key = trim(key_in);
  if (key == "rows") {
    tile.rows = to_u32(key, value);
  } else if (key == "cols") {
    tile.cols = to_u32(key, value);
  } else if (key == "tiles") {
    tile.tiles = to_u32(key, value);
  } else if (key == "lanes") {
    tile.pe.lanes = to_u32(key, value);
  } else if (key == "depth") {
    tile.pe.depth = to_u32(key, value);
  } else if (key == "mode") {
    tile.pe.mode = to_enum(key, value, kModes);
  } else if (key == "dtype") {
    tile.pe.dtype = to_enum(key, value, kDTypes);
  } else if (key == "op") {
    op = to_enum(key, value, kOps);
  } else if (key == "side") {
    side = to_enum(key, value, kSides);
  } else if (key == "bypass") {
    bypass_threshold = to_double(key, value);
  } else if (key == "costs") {
    costs_path = trim(value);
    for (const auto& [k, v] : read_kv_file(costs_path)) costs.set(k, to_double(k, v));
  } else if (key.rfind("cost.", 0) == 0) {
    costs.set(std::string_view(key).substr(5), to_double(key, value));
  } else if (key == "trace") {
    trace_path = trim(value);
  } else if (key == "synthetic") {
    parse_synthetic(synthetic, value);
  } else if (key == "out") {
    out_path = trim(value);
  } else if (key == "seed") {
    seed = to_u64(key, value);
  } else if (key == "connectivity") {
    connectivity = trim(value);
  } else if (key == "alloc") {
    alloc = to_enum(key, value, kAlloc);
  } else if (key == "sweep") {
    sweep = to_enum(key, value, kAxes);
  } else if (key == "sparsities") {
    sparsities.clear();
    for (const std::string& s : split(value, ',')) sparsities.push_back(to_double(key, s));
  } else if (key == "row_counts") {
    row_counts.clear();
    for (const std::string& s : split(value, ',')) row_counts.push_back(to_u32(key, s));
  } else if (key == "seeds") {
    seeds = to_u32(key, value);
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  for (const auto& [k, v] : read_kv_file(path)) set(k, v);
}

void RunConfig::validate() const {
  if (tile.rows == 0 || tile.cols == 0 || tile.tiles == 0) {
    throw ConfigError("rows, cols and tiles must be at least 1");
  }
  if (tile.pe.lanes == 0 || tile.pe.lanes > kMaxLanes) {
    throw ConfigError("lanes must be in [1, " + std::to_string(kMaxLanes) + "]");
  }
  if (tile.pe.depth == 0 || tile.pe.depth > kMaxDepth) {
    throw ConfigError("depth must be in [1, " + std::to_string(kMaxDepth) + "]");
  }
  if (side == SidePolicy::Both && tile.pe.mode == PEMode::SparseB) {
    throw ConfigError("side=both needs mode sparse-both");
  }
  if (!(bypass_threshold >= 0.0 && bypass_threshold <= 1.0)) {
    throw ConfigError("bypass threshold must be in [0, 1]");
  }
  if (seeds == 0) throw ConfigError("seeds must be at least 1");
  if (sparsities.empty()) throw ConfigError("sparsities must not be empty");
  for (double s : sparsities) {
    if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("sparsities must lie in [0, 1]");
  }
  if (row_counts.empty()) throw ConfigError("row_counts must not be empty");
  for (std::uint32_t r : row_counts) {
    if (r == 0) throw ConfigError("row_counts entries must be at least 1");
  }
  if (trace_path.empty()) {
    if (!(synthetic.sparsity >= 0.0 && synthetic.sparsity <= 1.0) ||
        !(synthetic.w_sparsity >= 0.0 && synthetic.w_sparsity <= 1.0)) {
      throw ConfigError("synthetic sparsity must lie in [0, 1]");
    }
    if (synthetic.dims.size() == 0 || synthetic.filters == 0) {
      throw ConfigError("synthetic dims and filters must be non-zero");
    }
    synthetic.layer();
  }
  make_scheduler();
}

std::string RunConfig::echo() const {
  std::string out;
  auto line = [&](std::string_view k, const std::string& v) {
    out += "# ";
    out += k;
    out += '=';
    out += v;
    out += '\n';
  };
  line("rows", std::to_string(tile.rows));
  line("cols", std::to_string(tile.cols));
  line("tiles", std::to_string(tile.tiles));
  line("lanes", std::to_string(tile.pe.lanes));
  line("depth", std::to_string(tile.pe.depth));
  line("mode", std::string(to_string(tile.pe.mode)));
  line("dtype", std::string(to_string(tile.pe.dtype)));
  line("op", std::string(to_string(op)));
  line("side", std::string(to_string(side)));
  line("bypass", fmt("%g", bypass_threshold));
  line("connectivity", connectivity.empty() ? "default" : connectivity);
  line("trace", trace_path);
  line("synthetic", trace_path.empty() ? synthetic_text(synthetic) : "");
  line("seed", std::to_string(seed));
  line("seeds", std::to_string(seeds));
  line("alloc", std::string(to_string(alloc)));
  line("sweep", std::string(to_string(sweep)));
  line("sparsities", join(sparsities, "%g"));
  line("row_counts", join(row_counts, "%g"));
  line("costs", costs_path);
  for (const std::string& c : split(costs.to_text(), '\n')) {
    if (!c.empty()) out += "# cost." + c + '\n';
  }
  return out;
}

Scheduler RunConfig::make_scheduler() const {
  if (connectivity.empty()) {
    if (tile.pe.depth != 2 && tile.pe.depth != 3) {
      throw ConfigError("the default connectivity needs depth 2 or 3; pass a connectivity list");
    }
    return Scheduler(default_connectivity(tile.pe.lanes, tile.pe.depth));
  }
  return Scheduler(ConnectivityMap::parse(tile.pe.lanes, tile.pe.depth, connectivity));
}

LayerInput synthetic_layer(const SyntheticInput& in, std::uint64_t seed) {
  LayerInput l;
  l.spec = in.layer();
  SynthSpec s;
  s.pattern = in.pattern;
  s.values = in.values;
  s.dims = l.spec.a_dims;
  s.sparsity = in.sparsity;
  s.seed = seed * 3;
  s.kind = TensorKind::A;
  l.tensors.a = synth_tensor(s);
  s.dims = l.spec.g_dims;
  s.seed = seed * 3 + 1;
  s.kind = TensorKind::G;
  l.tensors.g = synth_tensor(s);
  s.dims = l.spec.w_dims;
  s.sparsity = in.w_sparsity;
  s.pattern = SparsityPattern::Iid;
  s.seed = seed * 3 + 2;
  s.kind = TensorKind::W;
  l.tensors.w = synth_tensor(s);
  return l;
}

std::vector<LayerInput> layers_from_trace(const TraceFile& f) {
  struct Parts {
    const TraceRecord* a = nullptr;
    const TraceRecord* w = nullptr;
    const TraceRecord* g = nullptr;
  };
  std::map<std::pair<std::uint32_t, std::uint32_t>, Parts> by_layer;
  for (const TraceRecord& r : f.records) {
    if (r.scheduled) continue;
    Parts& p = by_layer[{r.layer_id, r.epoch_id}];
    const TraceRecord** slot = nullptr;
    switch (r.tensor.kind()) {
      case TensorKind::A: slot = &p.a; break;
      case TensorKind::W: slot = &p.w; break;
      case TensorKind::G: slot = &p.g; break;
      case TensorKind::O: break;
    }
    if (slot == nullptr) continue;
    if (*slot != nullptr) {
      throw ConfigError("layer " + std::to_string(r.layer_id) + " epoch " +
                        std::to_string(r.epoch_id) + " has two " +
                        std::string(to_string(r.tensor.kind())) + " records");
    }
    *slot = &r;
  }
  std::vector<LayerInput> out;
  for (const auto& [key, p] : by_layer) {
    const std::string where =
        "layer " + std::to_string(key.first) + " epoch " + std::to_string(key.second);
    if (p.a == nullptr || p.w == nullptr || p.g == nullptr) {
      throw ConfigError(where + " needs A, W and G records");
    }
    const Dims4& ad = p.a->tensor.dims();
    const Dims4& wd = p.w->tensor.dims();
    const Dims4& gd = p.g->tensor.dims();
    const std::uint32_t stride = p.w->stride;
    if (stride == 0) throw ConfigError(where + ": stride 0");
    std::optional<LayerSpec> spec;
    for (std::uint32_t pad = 0; pad < std::min(wd.h, wd.w) && !spec; ++pad) {
      try {
        LayerSpec s = LayerSpec::conv(ad.n, ad.c, ad.h, ad.w, wd.n, wd.h, wd.w, stride, pad, key.first);
        if (s.w_dims == wd && s.g_dims == gd) spec = s;
      } catch (const UsageError&) {
      }
    }
    if (!spec) throw ConfigError(where + ": A, W and G dims do not form a convolution");
    LayerInput l;
    l.layer_id = key.first;
    l.epoch_id = key.second;
    l.spec = *spec;
    l.tensors = {p.a->tensor, p.w->tensor, p.g->tensor};
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<LayerInput> load_layers(const RunConfig& cfg) {
  std::vector<LayerInput> layers;
  if (cfg.trace_path.empty()) {
    layers.push_back(synthetic_layer(cfg.synthetic, cfg.seed));
  } else {
    layers = layers_from_trace(read_trace(cfg.trace_path));
  }
  if (cfg.tile.pe.dtype == DType::BF16) {
    for (LayerInput& l : layers) {
      l.tensors.a = to_bf16(l.tensors.a);
      l.tensors.w = to_bf16(l.tensors.w);
      l.tensors.g = to_bf16(l.tensors.g);
    }
  }
  return layers;
}

std::vector<TrainOp> selected_ops(OpSelect sel) {
  switch (sel) {
    case OpSelect::Fwd: return {TrainOp::Fwd};
    case OpSelect::IGrad: return {TrainOp::IGrad};
    case OpSelect::WGrad: return {TrainOp::WGrad};
    case OpSelect::All: break;
  }
  return {TrainOp::Fwd, TrainOp::IGrad, TrainOp::WGrad};
}

OpReport run_op(const LayerInput& layer, TrainOp op, const RunConfig& cfg, const Scheduler& sched,
                bool functional) {
  OpReport r;
  r.layer_id = layer.layer_id;
  r.epoch_id = layer.epoch_id;
  r.op = op;
  const LoweredOp lowered = lower_to_tile(op, layer.spec, layer.tensors, cfg.side, cfg.tile.pe.lanes);
  r.sparse_side = lowered.sparse_side;
  const LayerTensors& t = layer.tensors;
  const Tensor4& side = r.sparse_side == TensorKind::A ? t.a : r.sparse_side == TensorKind::W ? t.w : t.g;
  const SparsityStats stats = sparsity_stats(side);
  r.side_sparsity = stats.fraction();

  TileConfig dense_cfg = cfg.tile;
  dense_cfg.pe = bypass_mode(cfg.tile.pe);
  const SimOptions opts{functional};
  const SimResult dense = simulate(lowered, dense_cfg, nullptr, opts);

  TileConfig sparse_cfg = cfg.tile;
  if (cfg.side == SidePolicy::Both && sparse_cfg.pe.mode != PEMode::Dense) {
    sparse_cfg.pe.mode = PEMode::SparseBoth;
  }
  r.bypass = sparse_cfg.pe.mode != PEMode::Dense && should_bypass(stats, cfg.bypass_threshold);
  const SimResult sparse = (sparse_cfg.pe.mode == PEMode::Dense || r.bypass)
                               ? dense
                               : simulate(lowered, sparse_cfg, &sched, opts);

  r.dense_cycles = dense.cycles;
  r.sparse_cycles = sparse.cycles;
  r.speedup = sparse.cycles == 0 ? 1.0
                                 : static_cast<double>(dense.cycles) / static_cast<double>(sparse.cycles);
  r.dense_events = dense.events;
  r.sparse_events = sparse.events;
  if (!functional) return r;

  r.effectual_fraction =
      dense.events.macs_issued == 0
          ? 0.0
          : static_cast<double>(dense.events.macs_effectual) / static_cast<double>(dense.events.macs_issued);
  r.dense_energy = tally(dense.events, cfg.costs, cfg.tile.pe.dtype);
  r.sparse_energy = tally(sparse.events, cfg.costs, cfg.tile.pe.dtype);
  if (r.sparse_cycles > 0 && r.sparse_energy.compute > 0.0) {
    r.compute_efficiency = efficiency(r.dense_cycles, r.dense_energy.compute, r.sparse_cycles,
                                      r.sparse_energy.compute).energy_eff;
    r.efficiency = efficiency(r.dense_cycles, r.dense_energy.total(), r.sparse_cycles,
                              r.sparse_energy.total()).energy_eff;
  }
  return r;
}

std::vector<OpReport> run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const Scheduler sched = cfg.make_scheduler();
  std::vector<OpReport> out;
  for (const LayerInput& l : load_layers(cfg)) {
    for (TrainOp op : selected_ops(cfg.op)) out.push_back(run_op(l, op, cfg, sched, true));
  }
  return out;
}

std::vector<SweepPoint> run_sweep(const RunConfig& cfg) {
  cfg.validate();
  const Scheduler sched = cfg.make_scheduler();
  std::vector<SweepPoint> out;
  if (cfg.sweep == SweepAxis::Rows) {
    GeometrySweepSpec g;
    g.row_counts = cfg.row_counts;
    g.col_counts = {cfg.tile.cols};
    g.b_sparsity = cfg.synthetic.sparsity;
    g.seeds = cfg.seeds;
    g.base_seed = cfg.seed;
    g.pe = cfg.tile.pe;
    for (const GeometryPoint& p : geometry_sweep(g)) {
      out.push_back({cfg.synthetic.sparsity, p.rows, p.seed, p.dense_cycles, p.sparse_cycles,
                     p.speedup});
    }
    return out;
  }
  for (double s : cfg.sparsities) {
    SyntheticInput in = cfg.synthetic;
    in.sparsity = s;
    for (std::uint32_t i = 0; i < cfg.seeds; ++i) {
      const std::uint64_t seed = cfg.seed + i;
      LayerInput layer = synthetic_layer(in, seed);
      if (cfg.tile.pe.dtype == DType::BF16) {
        layer.tensors.a = to_bf16(layer.tensors.a);
        layer.tensors.w = to_bf16(layer.tensors.w);
        layer.tensors.g = to_bf16(layer.tensors.g);
      }
      SweepPoint p;
      p.sparsity = s;
      p.rows = cfg.tile.rows;
      p.seed = seed;
      for (TrainOp op : selected_ops(cfg.op)) {
        const OpReport r = run_op(layer, op, cfg, sched, false);
        p.dense_cycles += r.dense_cycles;
        p.sparse_cycles += r.sparse_cycles;
      }
      p.speedup = p.sparse_cycles == 0 ? 1.0
                                       : static_cast<double>(p.dense_cycles) /
                                             static_cast<double>(p.sparse_cycles);
      out.push_back(p);
    }
  }
  return out;
}

std::vector<SweepSummary> summarize(const std::vector<SweepPoint>& points) {
  std::vector<SweepSummary> out;
  std::map<std::pair<double, std::uint32_t>, std::vector<double>> groups;
  std::vector<std::pair<double, std::uint32_t>> order;
  for (const SweepPoint& p : points) {
    auto key = std::make_pair(p.sparsity, p.rows);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(p.speedup);
  }
  for (const auto& key : order) {
    const std::vector<double>& v = groups[key];
    SweepSummary s;
    s.sparsity = key.first;
    s.rows = key.second;
    s.seeds = static_cast<std::uint32_t>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    for (double x : v) s.max_deviation = std::max(s.max_deviation, std::fabs(x - s.mean) / s.mean);
    out.push_back(s);
  }
  return out;
}

std::vector<CompressReport> run_compress(const RunConfig& cfg, TraceFile* scheduled_out) {
  cfg.validate();
  if (cfg.tile.pe.lanes != kGroupEdge) throw ConfigError("compress needs 16 lanes");
  const Scheduler sched = cfg.make_scheduler();
  std::vector<std::pair<std::string, Tensor4>> tensors;
  std::vector<const TraceRecord*> origin;
  TraceFile trace;
  if (cfg.trace_path.empty()) {
    const LayerInput l = synthetic_layer(cfg.synthetic, cfg.seed);
    tensors.emplace_back("synthetic.A", l.tensors.a);
    tensors.emplace_back("synthetic.W", l.tensors.w);
    tensors.emplace_back("synthetic.G", l.tensors.g);
    origin.assign(3, nullptr);
  } else {
    trace = read_trace(cfg.trace_path);
    for (const TraceRecord& r : trace.records) {
      if (r.scheduled) continue;
      tensors.emplace_back(r.name, r.tensor);
      origin.push_back(&r);
    }
  }
  std::vector<CompressReport> out;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& [name, t0] = tensors[i];
    const Tensor4 t = cfg.tile.pe.dtype == DType::BF16 ? to_bf16(t0) : t0;
    CompressReport r;
    r.name = name;
    r.kind = t.kind();
    const CompressedTensor packed = compress_tensor(t, sched, AllocMode::Packed);
    const CompressedTensor slotted = compress_tensor(t, sched, AllocMode::Slotted);
    r.groups = packed.groups.size();
    r.dense_rows = packed.dense_rows();
    r.scheduled_rows = packed.scheduled_rows();
    r.entries = packed.entry_count();
    r.packed_slots = packed.storage_slots();
    r.slotted_slots = slotted.storage_slots();
    r.backside_cycles = r.scheduled_rows * sched.levels().groups.size();
    const CompressedTensor& chosen = cfg.alloc == AllocMode::Packed ? packed : slotted;
    const Tensor4 back = decompress_tensor(chosen, sched.map());
    r.round_trip = back.dims() == t.dims() && bit_identical(back.data(), t.data());
    if (scheduled_out != nullptr) {
      TraceRecord rec;
      rec.name = name;
      if (origin[i] != nullptr) {
        rec.layer_id = origin[i]->layer_id;
        rec.epoch_id = origin[i]->epoch_id;
        rec.stride = origin[i]->stride;
        rec.kx = origin[i]->kx;
        rec.ky = origin[i]->ky;
      }
      rec.scheduled = chosen;
      scheduled_out->records.push_back(std::move(rec));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string analyze_csv(const RunConfig& cfg) {
  cfg.validate();
  std::vector<std::tuple<std::string, std::uint32_t, std::uint32_t, Tensor4>> items;
  if (cfg.trace_path.empty()) {
    const LayerInput l = synthetic_layer(cfg.synthetic, cfg.seed);
    items.emplace_back("synthetic.A", 0, 0, l.tensors.a);
    items.emplace_back("synthetic.W", 0, 0, l.tensors.w);
    items.emplace_back("synthetic.G", 0, 0, l.tensors.g);
  } else {
    for (const TraceRecord& r : read_trace(cfg.trace_path).records) {
      if (r.scheduled) continue;
      items.emplace_back(r.name, r.layer_id, r.epoch_id, r.tensor);
    }
  }
  std::string out = cfg.echo();
  out += "name,layer,epoch,kind,n,c,h,w,total,zeros,sparsity,potential_speedup,bypass\n";
  char buf[512];
  for (const auto& [name, layer, epoch, t] : items) {
    const SparsityStats s = sparsity_stats(t);
    const Dims4& d = t.dims();
    std::snprintf(buf, sizeof buf, "%s,%u,%u,%s,%u,%u,%u,%u,%llu,%llu,%.6f,%.6f,%d\n", name.c_str(),
                  layer, epoch, std::string(to_string(t.kind())).c_str(), d.n, d.c, d.h, d.w,
                  static_cast<unsigned long long>(s.total), static_cast<unsigned long long>(s.zeros),
                  s.fraction(), potential_speedup(s), should_bypass(s, cfg.bypass_threshold) ? 1 : 0);
    out += buf;
  }
  return out;
}

std::string simulate_csv(const RunConfig& cfg, const std::vector<OpReport>& rows) {
  std::string out = cfg.echo();
  out += "layer,epoch,op,sparse_side,side_sparsity,bypass,dense_cycles,sparse_cycles,speedup,"
         "effectual_fraction,energy_dense,energy_sparse,compute_energy_dense,"
         "compute_energy_sparse,compute_efficiency,efficiency\n";
  char buf[512];
  for (const OpReport& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%u,%u,%s,%s,%.6f,%d,%llu,%llu,%.6f,%.6f,%.3f,%.3f,%.3f,%.3f,%.6f,%.6f\n",
                  r.layer_id, r.epoch_id, std::string(to_string(r.op)).c_str(),
                  std::string(to_string(r.sparse_side)).c_str(), r.side_sparsity, r.bypass ? 1 : 0,
                  static_cast<unsigned long long>(r.dense_cycles),
                  static_cast<unsigned long long>(r.sparse_cycles), r.speedup, r.effectual_fraction,
                  r.dense_energy.total(), r.sparse_energy.total(), r.dense_energy.compute,
                  r.sparse_energy.compute, r.compute_efficiency, r.efficiency);
    out += buf;
  }
  return out;
}

std::string sweep_csv(const RunConfig& cfg, const std::vector<SweepPoint>& points) {
  std::string out = cfg.echo();
  out += "sparsity,rows,seeds,mean_speedup,min_speedup,max_speedup,max_deviation,ideal\n";
  char buf[256];
  const double cap = static_cast<double>(cfg.tile.pe.depth);
  for (const SweepSummary& s : summarize(points)) {
    const double ideal = s.sparsity >= 1.0 ? cap : std::min(1.0 / (1.0 - s.sparsity), cap);
    std::snprintf(buf, sizeof buf, "%.4f,%u,%u,%.6f,%.6f,%.6f,%.6f,%.6f\n", s.sparsity, s.rows,
                  s.seeds, s.mean, s.min, s.max, s.max_deviation, ideal);
    out += buf;
  }
  return out;
}

std::string compress_csv(const RunConfig& cfg, const std::vector<CompressReport>& rows) {
  std::string out = cfg.echo();
  out += "name,kind,groups,dense_rows,scheduled_rows,ratio,entries,packed_slots,slotted_slots,"
         "backside_cycles,round_trip\n";
  char buf[512];
  for (const CompressReport& r : rows) {
    const double ratio = r.scheduled_rows == 0 ? 1.0
                                               : static_cast<double>(r.dense_rows) /
                                                     static_cast<double>(r.scheduled_rows);
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%zu,%zu,%.6f,%zu,%zu,%zu,%llu,%d\n", r.name.c_str(),
                  std::string(to_string(r.kind)).c_str(), r.groups, r.dense_rows, r.scheduled_rows,
                  ratio, r.entries, r.packed_slots, r.slotted_slots,
                  static_cast<unsigned long long>(r.backside_cycles), r.round_trip ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace lookaside
