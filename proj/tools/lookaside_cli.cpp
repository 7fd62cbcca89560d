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

// lookaside: analyze traces, simulate training ops, sweep and compress.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "lookaside/errors.hpp"
#include "lookaside/experiment.hpp"
#include "lookaside/trace_io.hpp"

namespace {

using lookaside::RunConfig;

struct Flags {
  std::string config;
  std::vector<std::pair<std::string, std::string>> set;  // in flag order
  std::vector<std::string> extra;                         // --set key=value
  std::string emit;
};

// Registers a string flag that records "key=value" when present.
void flag(CLI::App* app, Flags& f, const std::string& name, const std::string& key,
          const std::string& help) {
  app->add_option_function<std::string>(
      "--" + name, [&f, key](const std::string& v) { f.set.emplace_back(key, v); }, help);
}

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "key=value config file (flags override it)");
  flag(app, f, "trace", "trace", "TDTR trace file");
  flag(app, f, "synthetic", "synthetic", "s=<f>,dims=<n,c,h,w>[,filters=,k=,stride=,pad=,ws=,pattern=,values=]");
  flag(app, f, "rows", "rows", "PE rows per tile");
  flag(app, f, "cols", "cols", "PE columns per tile");
  flag(app, f, "tiles", "tiles", "tiles per chip");
  flag(app, f, "lanes", "lanes", "MAC lanes per PE");
  flag(app, f, "depth", "depth", "staging buffer depth");
  flag(app, f, "mode", "mode", "dense | sparse-b | sparse-both");
  flag(app, f, "op", "op", "fwd | igrad | wgrad | all");
  flag(app, f, "side", "side", "auto | a | b | both");
  flag(app, f, "dtype", "dtype", "f32 | bf16");
  flag(app, f, "seed", "seed", "base seed");
  flag(app, f, "seeds", "seeds", "seeds per sweep point");
  flag(app, f, "bypass", "bypass", "bypass below this zero fraction");
  flag(app, f, "costs", "costs", "energy cost file");
  flag(app, f, "connectivity", "connectivity", "lane-0 options, e.g. \"0:0 1:0 1:-1\"");
  flag(app, f, "out", "out", "CSV output path (default stdout)");
  app->add_option("--set", f.extra, "extra key=value setting")->take_all();
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg.load_file(f.config);
  for (const auto& [k, v] : f.set) cfg.set(k, v);
  for (const std::string& kv : f.extra) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw lookaside::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw lookaside::ConfigError("cannot write " + cfg.out_path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-level simulator of a sparsity-exploiting MAC accelerator for training"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* analyze = app.add_subcommand("analyze", "per-tensor sparsity and bypass decisions");
  CLI::App* simulate = app.add_subcommand("simulate", "dense vs sparse cycles and energy per op");
  CLI::App* sweep = app.add_subcommand("sweep", "speedup over sparsity levels or tile rows");
  CLI::App* compress = app.add_subcommand("compress", "scheduled-form compression statistics");
  for (CLI::App* sub : {analyze, simulate, sweep, compress}) add_common(sub, flags);
  flag(sweep, flags, "axis", "sweep", "sparsity | rows");
  flag(sweep, flags, "sparsities", "sparsities", "comma list of sparsity levels");
  flag(sweep, flags, "row-counts", "row_counts", "comma list of row counts");
  flag(compress, flags, "alloc", "alloc", "packed | slotted");
  compress->add_option("--emit", flags.emit, "write the scheduled form as a TDTR trace");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = resolve(flags);
    if (analyze->parsed()) {
      emit(cfg, lookaside::analyze_csv(cfg));
    } else if (simulate->parsed()) {
      emit(cfg, lookaside::simulate_csv(cfg, lookaside::run_experiment(cfg)));
    } else if (sweep->parsed()) {
      emit(cfg, lookaside::sweep_csv(cfg, lookaside::run_sweep(cfg)));
    } else if (compress->parsed()) {
      lookaside::TraceFile scheduled;
      const auto rows = lookaside::run_compress(cfg, flags.emit.empty() ? nullptr : &scheduled);
      if (!flags.emit.empty()) lookaside::write_trace(flags.emit, scheduled);
      emit(cfg, lookaside::compress_csv(cfg, rows));
    }
  } catch (const lookaside::TraceError& e) {
    std::cerr << "lookaside: trace error (" << lookaside::to_string(e.code()) << "): " << e.what()
              << '\n';
    return 3;
  } catch (const lookaside::ConfigError& e) {
    std::cerr << "lookaside: config error: " << e.what() << '\n';
    return 2;
  } catch (const lookaside::UsageError& e) {
    std::cerr << "lookaside: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lookaside: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
