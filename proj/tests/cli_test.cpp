/*
 * Copyright 2026 The cdp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cdp/io.hpp"
#include "cdp/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = 0;
  std::string output;
};

/// Runs the cdp binary and captures stdout+stderr.
Result run_cli(const std::string& args) {
  const std::string cmd = std::string(CDP_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "popen failed"};
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cdp_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& leaf) const { return (dir_ / leaf).string(); }

  fs::path dir_;
};

TEST_F(Cli, SimulateIsByteDeterministic) {
  const std::string common = " simulate --scenario split --T 8 --t-star 6 --scale 0.1 --seed 5 --out ";
  ASSERT_EQ(run_cli(common + path("a")).status, 0);
  ASSERT_EQ(run_cli(common + path("b")).status, 0);
  EXPECT_EQ(slurp(path("a/sequence.edges")), slurp(path("b/sequence.edges")));
  EXPECT_EQ(slurp(path("a/truth.json")), slurp(path("b/truth.json")));
  ASSERT_EQ(run_cli(" simulate --scenario split --T 8 --t-star 6 --scale 0.1 --seed 6 --out " + path("c")).status, 0);
  EXPECT_NE(slurp(path("a/sequence.edges")), slurp(path("c/sequence.edges")));
}

TEST_F(Cli, SimulateSidecarAndScale) {
  ASSERT_EQ(run_cli(" simulate --scenario group-change --scale 1/3 --seed 1 --out " + path("s")).status, 0);
  const auto truth = nlohmann::json::parse(slurp(path("s/truth.json")));
  EXPECT_EQ(truth["n"], 300);
  EXPECT_EQ(truth["T"], 30);
  EXPECT_EQ(truth["t_star"], 21);
  EXPECT_EQ(truth["changed_vertices"].size(), 200U);
  EXPECT_EQ(truth["changed_vertices"].back(), 199);
  const auto seq = cdp::ingest_sequence(path("s/sequence.edges"));
  EXPECT_EQ(seq.size(), 30U);
  EXPECT_EQ(seq.front().n(), 300);
  const auto manifest = nlohmann::json::parse(slurp(path("s/manifest.json")));
  EXPECT_EQ(manifest["seed"], 1);
  EXPECT_EQ(manifest["outputs"].size(), 3U);
  EXPECT_TRUE(manifest["timings_seconds"].contains("simulate"));
}

TEST_F(Cli, FullScaleSidecar) {
  ASSERT_EQ(run_cli(" simulate --scenario group-change --change-type point --T 30 --seed 2 --out " + path("f")).status, 0);
  const auto truth = nlohmann::json::parse(slurp(path("f/truth.json")));
  EXPECT_EQ(truth["n"], 900);
  EXPECT_EQ(truth["changed_vertices"].size(), 600U);
  EXPECT_EQ(truth["changed_vertices"].front(), 0);
  EXPECT_EQ(truth["changed_vertices"].back(), 599);
}

TEST_F(Cli, DetectIsByteDeterministic) {
  ASSERT_EQ(run_cli(" simulate --scenario merge --T 8 --t-star 7 --scale 0.1 --seed 3 --out " + path("s")).status, 0);
  for (const char* method : {"cdp", "act", "actm"}) {
    const std::string args = std::string(" detect --method ") + method + " --window 3 --seed 9 --input " +
                             path("s/sequence.edges") + " --out ";
    ASSERT_EQ(run_cli(args + path(std::string("d1_") + method)).status, 0);
    ASSERT_EQ(run_cli(args + path(std::string("d2_") + method)).status, 0);
    for (const char* f : {"scores.csv", "summary.csv", "dims.csv"}) {
      const std::string a = slurp(path(std::string("d1_") + method + "/" + f));
      EXPECT_FALSE(a.empty());
      EXPECT_EQ(a, slurp(path(std::string("d2_") + method + "/" + f))) << method << " " << f;
    }
  }
  const std::string scores = slurp(path("d1_cdp/scores.csv"));
  EXPECT_EQ(scores.substr(0, scores.find('\n')), "t,vertex,z,zscore,detected");
  // Rows for t = 4..8 and 90 vertices, sorted by (t, vertex).
  std::istringstream lines(scores);
  std::string line;
  std::getline(lines, line);
  std::pair<int, int> prev{0, -1};
  int rows = 0;
  while (std::getline(lines, line)) {
    const int t = std::stoi(line.substr(0, line.find(',')));
    const int v = std::stoi(line.substr(line.find(',') + 1));
    EXPECT_LT(prev, std::make_pair(t, v));
    prev = {t, v};
    ++rows;
  }
  EXPECT_EQ(rows, 5 * 90);
}

TEST_F(Cli, DetectIdenticalSnapshotsScoreZero) {
  // Piecewise-constant blocks: exact low rank, so d is the same at every t.
  std::ofstream edges(path("same.edges"));
  edges << "# n=12 T=8\n";
  for (int t = 1; t <= 8; ++t)
    for (int i = 0; i < 12; ++i)
      for (int j = i; j < 12; ++j) edges << t << ' ' << i << ' ' << j << ' ' << ((i < 5) == (j < 5) ? 6 : 1) << '\n';
  edges.close();
  ASSERT_EQ(run_cli(" detect --method cdp --window 5 --input " + path("same.edges") + " --out " + path("o")).status, 0);
  std::istringstream lines(slurp(path("o/scores.csv")));
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    EXPECT_GE(std::stoi(f[0]), 6);
    EXPECT_LT(std::stod(f[2]), 1e-8);
    ++rows;
  }
  EXPECT_EQ(rows, 3 * 12);
}

TEST_F(Cli, DetectActTwoSnapshots) {
  std::ofstream(path("two.edges")) << "1 0 1 2\n1 1 2 1\n2 0 1 1\n2 1 2 3\n2 0 2 1\n";
  ASSERT_EQ(run_cli(" detect --method act --window 1 --input " + path("two.edges") + " --out " + path("o")).status, 0);
  const auto seq = cdp::ingest_sequence(path("two.edges"));
  const cdp::Vector expected = (cdp::activity(seq[0]).u - cdp::activity(seq[1]).u).cwiseAbs();
  std::istringstream lines(slurp(path("o/scores.csv")));
  std::string line;
  std::getline(lines, line);
  for (int i = 0; i < 3; ++i) {
    ASSERT_TRUE(std::getline(lines, line));
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    EXPECT_EQ(std::stod(f[2]), expected(i));
  }
}

TEST_F(Cli, FailuresNameStageAndTime) {
  Result r = run_cli(" detect --input " + path("missing.edges") + " --out " + path("o"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("cdp detect: ingest failed"), std::string::npos) << r.output;

  std::ofstream(path("gap.edges")) << "# n=3 T=4\n1 0 1 1\n2 0 1 1\n4 1 2 1\n";
  r = run_cli(" detect --window 1 --input " + path("gap.edges") + " --out " + path("o"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("detect failed at t=3"), std::string::npos) << r.output;

  r = run_cli(" simulate --scenario teleport --out " + path("o"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("teleport"), std::string::npos) << r.output;

  r = run_cli(" detect --method pca --input " + path("gap.edges") + " --out " + path("o"));
  EXPECT_EQ(r.status, 1);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  std::ofstream(path("sim.ini")) << "scenario=form\nT=7\nt-star=5\nscale=0.05\nseed=4\n";
  ASSERT_EQ(run_cli(" simulate --config " + path("sim.ini") + " --seed 8 --out " + path("o")).status, 0);
  const auto manifest = nlohmann::json::parse(slurp(path("o/manifest.json")));
  EXPECT_EQ(manifest["config"]["scenario"], "form");
  EXPECT_EQ(manifest["config"]["T"], 7);
  EXPECT_EQ(manifest["seed"], 8);
}

TEST_F(Cli, EvaluateSingleRunAndWindows) {
  const Result r = run_cli(" evaluate --scenario split --T 12 --t-star 11 --window 1,5,10 --runs 1 --scale 0.05"
                           " --samples 1000 --seed 2 --out " + path("e"));
  ASSERT_EQ(r.status, 0) << r.output;
  for (const char* f : {"performance.csv", "aggregate.csv", "sign_tests.csv", "proportions.csv", "timing.csv",
                        "manifest.json"}) {
    EXPECT_TRUE(fs::exists(path(std::string("e/") + f))) << f;
  }
  std::istringstream lines(slurp(path("e/performance.csv")));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "scenario,method,window,run,t,phi,eta,eta_bar");
  std::map<std::pair<std::string, int>, int> blocks;
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    ++blocks[{f[1], std::stoi(f[2])}];
  }
  EXPECT_EQ(blocks.size(), 9U);
  EXPECT_EQ((blocks[{"cdp", 10}]), 2);
  const std::string signs = slurp(path("e/sign_tests.csv"));
  EXPECT_NE(signs.find("eta11_cdp > eta11_act"), std::string::npos);
}

TEST_F(Cli, SimulateRoundTripMatchesMemory) {
  ASSERT_EQ(run_cli(" simulate --scenario homo-to-hetero --change-type interval --T 9 --t-star 6 --t-end 8"
                    " --scale 0.1 --seed 12 --out " + path("s")).status, 0);
  cdp::cli::SimulateOptions opts;
  opts.scenario = "homo-to-hetero";
  opts.change_type = "interval";
  opts.T = 9;
  opts.t_star = 6;
  opts.t_end = 8;
  opts.scale = 0.1;
  opts.seed = 12;
  const auto memory = cdp::cli::simulate_sequence(opts).snapshots;
  const auto disk = cdp::ingest_sequence(path("s/sequence.edges"));
  ASSERT_EQ(memory.size(), disk.size());
  for (std::size_t i = 0; i < memory.size(); ++i) EXPECT_EQ(memory[i], disk[i]);
}

}  // namespace
