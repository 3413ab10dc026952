// Copyright 2026 The qrem-bias Authors
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

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QREM_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  return {pclose(pipe), out};
}

// Data rows of a CSV document, split on commas, header excluded.
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
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    out.push_back(cells);
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "qrem_cli_test";
  fs::create_directories(dir);
  const auto p = dir / name;
  fs::remove(p);
  return p;
}

}  // namespace

TEST(Cli, FidelitySweepIsIncreasing) {
  const auto r = run("fidelity --topology 1d-graph --q 0.01 --n 2..20 --method dp");
  ASSERT_EQ(r.status, 0);
  const auto data = rows(r.out);
  ASSERT_EQ(data.size(), 19u);
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(data[i][0], std::to_string(i + 2));
    EXPECT_EQ(data[i][2], "dp-linear-cluster");
    EXPECT_GT(std::stod(data[i][3]), 1.0);
    if (i > 0) {
      EXPECT_GT(std::stod(data[i][3]), std::stod(data[i - 1][3]));
    }
  }
}

TEST(Cli, ExactAgreesWithDp) {
  for (const char* topo : {"1d-graph", "linear-ghz", "full-graph"}) {
    const std::string base = std::string("fidelity --topology ") + topo + " --q 0.03 --n 2..14";
    const auto exact = rows(run(base + " --method exact").out);
    const auto dp = rows(run(base + " --method dp").out);
    ASSERT_EQ(exact.size(), 13u) << topo;
    ASSERT_EQ(dp.size(), 13u) << topo;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      EXPECT_EQ(exact[i][2], "exact-enumeration");
      EXPECT_NEAR(std::stod(exact[i][3]), std::stod(dp[i][3]), 1e-10) << topo << " " << i;
    }
  }
}

TEST(Cli, ZeroRateGivesUnitFidelity) {
  for (const char* method : {"auto", "exact", "sampled"}) {
    const auto data =
        rows(run(std::string("fidelity --topology compact-ghz --q 0 --n 2..8 --method ") + method).out);
    ASSERT_EQ(data.size(), 7u);
    for (const auto& row : data) EXPECT_EQ(std::stod(row[3]), 1.0);
  }
}

TEST(Cli, CustomGraphFile) {
  const auto g = scratch("triangle.txt");
  std::ofstream(g) << "3\n0 1\n1 2\n0 2\n";
  const auto r = run("fidelity --graph " + g.string() + " --q 0.02 --n 3 --method exact");
  ASSERT_EQ(r.status, 0);
  const auto full = rows(run("fidelity --topology full-graph --q 0.02 --n 3 --method dp").out);
  EXPECT_NEAR(std::stod(rows(r.out)[0][3]), std::stod(full[0][3]), 1e-12);
}

TEST(Cli, RerunsAreByteIdentical) {
  const auto a = scratch("a.csv"), b = scratch("b.csv");
  const std::string args = "fidelity --topology 1d-graph --q 0.01 --n 30,40 --method sampled "
                           "--samples 500 --seed 9 --out ";
  ASSERT_EQ(run(args + a.string()).status, 0);
  ASSERT_EQ(run(args + b.string()).status, 0);
  const auto sa = slurp(a);
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, slurp(b));
  EXPECT_NE(sa.find("# seed: 9"), std::string::npos);
}

TEST(Cli, BadInputExitsNonzeroWithoutOutput) {
  const auto out = scratch("bad.csv");
  EXPECT_NE(run("fidelity --q 0.7 --n 3 --out " + out.string()).status, 0);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_NE(run("fidelity --q 0.1 --n 1..x").status, 0);
  EXPECT_NE(run("fidelity --topology ring --q 0.1 --n 3").status, 0);
  EXPECT_NE(run("fidelity --q 0.1 --n 30 --method exact").status, 0);
  EXPECT_NE(run("bound --q 0.01 --n 5 --levels 0").status, 0);
  EXPECT_NE(run("nonsense").status, 0);
  EXPECT_NE(run("vqe --hamiltonian /nonexistent --ansatz /nonexistent").status, 0);
}

TEST(Cli, JsonDocument) {
  const auto r = run("bound --q 0.001 --n 50 --format json");
  ASSERT_EQ(r.status, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["config"]["subcommand"], "bound");
  ASSERT_EQ(doc["rows"].size(), 4u);
  EXPECT_EQ(doc["rows"][0]["kind"], "delta");
  EXPECT_NEAR(doc["rows"][0]["value"].get<double>(), 0.10527, 1e-4);
  EXPECT_NEAR(doc["rows"][1]["value"].get<double>(), 47.6, 0.05);
}

TEST(Cli, BoundCsv) {
  const auto data = rows(run("bound --q 0,0.001 --n 10 --levels 0.1").out);
  ASSERT_EQ(data.size(), 4u);
  EXPECT_EQ(data[0][0], "delta");
  EXPECT_EQ(std::stod(data[0][4]), 0.0);
  EXPECT_EQ(data[2][0], "contour");
  EXPECT_EQ(data[2][4], "inf");
}

TEST(Cli, EntangleNoisy) {
  const auto data = rows(run("entangle-noisy --n 4 --q 0,0.02 --gate-noise 0").out);
  ASSERT_EQ(data.size(), 2u);
  EXPECT_NEAR(std::stod(data[0][3]), 1.0, 1e-12);
  EXPECT_NEAR(std::stod(data[0][4]), 1.0, 1e-12);
  EXPECT_GT(std::stod(data[1][5]), 0.0);
}

TEST(Cli, VqeTfim) {
  const auto data = rows(run("vqe --family tfim --n 2 --q 0,0.01 --delta0 0.02 --delta1 0.03").out);
  ASSERT_EQ(data.size(), 2u);
  EXPECT_NEAR(std::stod(data[0][4]), 0.0, 1e-6);
  EXPECT_LT(std::stod(data[1][4]), 0.0);
  EXPECT_EQ(data[1][6], "true");
}

TEST(Cli, QteHydrogen) {
  const std::string files = std::string(" --hamiltonian ") + QREM_DATA_DIR + "/h2_sto3g_jw.txt" +
                            " --ansatz " + QREM_DATA_DIR + "/h2_uccsd.txt";
  const auto data = rows(run("qte" + files + " --ns 1,4 --q 0 --t 2").out);
  ASSERT_EQ(data.size(), 2u);
  EXPECT_GT(std::abs(std::stod(data[0][7])), std::abs(std::stod(data[1][7])));
}
