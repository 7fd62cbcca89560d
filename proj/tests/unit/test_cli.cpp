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

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "lookaside/trace_io.hpp"

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LOOKASIDE_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), p)) out += buf.data();
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Data rows of a report, split on commas; comment and header lines dropped.
std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

const std::string kSmall = "--synthetic s=0.5,dims=1,32,8,8,filters=32 --tiles 4";

}  // namespace

TEST_CASE("simulate prints one row per op") {
  const Run r = run("simulate " + kSmall);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# rows=4") != std::string::npos);
  const auto data = rows(r.out);
  REQUIRE(data.size() == 3);
  CHECK(data[0][2] == "fwd");
  CHECK(data[1][2] == "igrad");
  CHECK(data[2][2] == "wgrad");
  for (const auto& row : data) {
    const double speedup = std::stod(row[8]);
    CHECK(speedup >= 1.0);
    CHECK(speedup <= 3.0);
  }
  CHECK(run("simulate " + kSmall).out == r.out);
}

TEST_CASE("dense mode reports unit speedup") {
  const Run r = run("simulate " + kSmall + " --mode dense");
  REQUIRE(r.code == 0);
  for (const auto& row : rows(r.out)) CHECK(row[8] == "1.000000");
}

TEST_CASE("--out and the other subcommands") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto csv = dir / "lookaside_cli_test.csv";
  REQUIRE(run("sweep " + kSmall + " --seeds 1 --out " + csv.string()).code == 0);
  const std::string text = slurp(csv);
  CHECK(text.find("# sweep=sparsity") != std::string::npos);
  CHECK(rows(text).size() == 9);
  std::filesystem::remove(csv);

  CHECK(run("analyze " + kSmall).code == 0);
  const auto trace = dir / "lookaside_cli_test.tdtr";
  REQUIRE(run("compress " + kSmall + " --emit " + trace.string()).code == 0);
  const lookaside::TraceFile f = lookaside::read_trace(trace);
  CHECK(f.records.size() == 3);
  for (const auto& rec : f.records) CHECK(rec.scheduled.has_value());
  std::filesystem::remove(trace);
}

TEST_CASE("errors map to exit codes") {
  CHECK(run("simulate --rows 0").code == 2);
  CHECK(run("simulate --mode nope").code == 2);
  CHECK(run("simulate --side both").code == 2);
  CHECK(run("simulate --set bogus=1").code == 2);
  CHECK(run("bogus").code != 0);
  const auto junk = std::filesystem::temp_directory_path() / "lookaside_cli_junk.tdtr";
  {
    std::ofstream f(junk);
    f << "not a trace";
  }
  const Run r = run("simulate --trace " + junk.string());
  CHECK(r.code == 3);
  CHECK(r.out.find("magic") != std::string::npos);
  std::filesystem::remove(junk);
  CHECK(run("simulate --trace /nonexistent/x.tdtr").code == 3);
}
