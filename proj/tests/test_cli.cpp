// Copyright 2026 The slicepack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "slicepack/cli.hpp"
#include "slicepack/export_planner.hpp"
#include "slicepack/model_io.hpp"
#include "support/fixtures.hpp"

namespace slicepack {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("slicepack_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string put(const testing::Fixture& f) {
    const auto base = (dir_ / f.name).string();
    write_text_file(base + ".model.in.json", serialize_model(f.graph));
    write_text_file(base + ".weights.in.json", serialize_weights(f.weights));
    write_text_file(base + ".masks.in.json", serialize_mask(f.masks));
    return base;
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  std::vector<std::string> io(const std::string& cmd, const std::string& base, const std::string& prefix) {
    return {cmd, "--model", base + ".model.in.json", "--weights", base + ".weights.in.json", "--out-prefix", prefix};
  }

  int copied_in_plan(const std::string& prefix) {
    return copy_report(parse_plan(read_text_file(prefix + ".plan.json")).segments).copied;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::vector<std::string> operator+(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TEST_F(Cli, PruneWritesMasks) {
  const auto base = put(testing::residual_disjoint());
  const auto pre = (dir_ / "p").string();
  ASSERT_EQ(run(io("prune", base, pre) + std::vector<std::string>{"--heuristic", "l2", "--sparsity", "0.25"}), 0)
      << err_.str();
  const auto m = parse_mask(read_text_file(pre + ".masks.json"));
  EXPECT_FALSE(m.retained.empty());
  const auto at = out_.str().find("achieved sparsity ");
  ASSERT_NE(at, std::string::npos) << out_.str();
  const double achieved = std::stod(out_.str().substr(at + 18));
  EXPECT_GT(achieved, 0.0);
  EXPECT_LE(achieved, 0.25);
}

TEST_F(Cli, SparsityOneIsUsageError) {
  const auto base = put(testing::residual_disjoint());
  EXPECT_EQ(run(io("prune", base, base) + std::vector<std::string>{"--heuristic", "l2", "--sparsity", "1.0"}), 2);
  EXPECT_EQ(run(io("prune", base, base) + std::vector<std::string>{"--heuristic", "fpgm", "--sparsity", "0.5"}), 2);
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"export"}), 2);
  EXPECT_EQ(run({"--help"}), 0);
  // Both a mask file and a heuristic.
  EXPECT_EQ(run(io("export", base, base) + std::vector<std::string>{"--masks", base + ".masks.in.json",
                                                                     "--heuristic", "l2", "--sparsity", "0.2"}),
            2);
}

TEST_F(Cli, RandomPruneIsReproducible) {
  const auto base = put(testing::residual_disjoint());
  const auto a = (dir_ / "a").string(), b = (dir_ / "b").string();
  const std::vector<std::string> flags{"--heuristic", "random", "--seed", "7", "--sparsity", "0.5"};
  ASSERT_EQ(run(io("prune", base, a) + flags), 0);
  ASSERT_EQ(run(io("prune", base, b) + flags), 0);
  EXPECT_EQ(read_text_file(a + ".masks.json"), read_text_file(b + ".masks.json"));
}

TEST_F(Cli, ExportResidualBlock) {
  const auto base = put(testing::residual_disjoint());
  const auto up = (dir_ / "up").string(), bl = (dir_ / "bl").string();
  const std::vector<std::string> masks{"--masks", base + ".masks.in.json"};
  ASSERT_EQ(run(io("export", base, up) + masks), 0) << err_.str();
  EXPECT_EQ(copied_in_plan(up), 0);
  EXPECT_NE(out_.str().find("total"), std::string::npos);
  ASSERT_EQ(run(io("export", base, bl) + masks + std::vector<std::string>{"--strategy", "baseline"}), 0);
  EXPECT_EQ(copied_in_plan(bl), 4);
  for (const auto& pre : {up, bl}) {
    EXPECT_TRUE(fs::exists(pre + ".model.json"));
    EXPECT_TRUE(fs::exists(pre + ".weights.json"));
    EXPECT_EQ(run(io("verify", base, pre)), 0) << err_.str();
    EXPECT_NE(out_.str().find("PASS"), std::string::npos);
  }
}

TEST_F(Cli, ExportFanOutExclusive) {
  const auto base = put(testing::fan_out_exclusive());
  const auto up = (dir_ / "up").string();
  ASSERT_EQ(run(io("export", base, up) + std::vector<std::string>{"--masks", base + ".masks.in.json"}), 0);
  EXPECT_EQ(copied_in_plan(up), 2);
}

TEST_F(Cli, PathsOnlyKeepsTheGather) {
  const auto base = put(testing::fan_out_gather());
  const auto a = (dir_ / "a").string(), b = (dir_ / "b").string();
  const std::vector<std::string> masks{"--masks", base + ".masks.in.json"};
  ASSERT_EQ(run(io("export", base, a) + masks), 0);
  EXPECT_EQ(copied_in_plan(a), 0);
  ASSERT_EQ(run(io("export", base, b) + masks + std::vector<std::string>{"--paths-only"}), 0);
  EXPECT_EQ(copied_in_plan(b), 2);
  EXPECT_EQ(run(io("verify", base, b)), 0);
}

TEST_F(Cli, EveryFixtureVerifies) {
  for (const auto& f : testing::all_fixtures()) {
    const auto base = put(f);
    const auto pre = base + ".out";
    std::vector<std::string> flags{"--masks", base + ".masks.in.json"};
    ASSERT_EQ(run(io("export", base, pre) + flags), 0) << f.name << err_.str();
    EXPECT_EQ(run(io("verify", base, pre) + std::vector<std::string>{"--tol", "1e-9"}), 0) << f.name;
  }
}

TEST_F(Cli, VerifyFailures) {
  const auto base = put(testing::residual_disjoint());
  const auto pre = (dir_ / "up").string();
  ASSERT_EQ(run(io("export", base, pre) + std::vector<std::string>{"--masks", base + ".masks.in.json"}), 0);
  const auto plan = read_text_file(pre + ".plan.json");

  write_text_file(pre + ".plan.json", plan.substr(0, plan.size() / 2));
  EXPECT_EQ(run(io("verify", base, pre)), 4);

  // A plan that parses but permutes a consumer wrongly.
  auto mp = parse_plan(plan);
  for (auto& s : mp.segments)
    if (s.access.count("D")) s.access["D"].perm = {3, 1};
  write_text_file(pre + ".plan.json", serialize_plan(mp));
  EXPECT_EQ(run(io("verify", base, pre)), 4);
  EXPECT_NE(out_.str().find("FAIL"), std::string::npos);

  // A plan whose producers no longer match the model.
  mp = parse_plan(plan);
  mp.segments[0].producers.push_back("nope");
  write_text_file(pre + ".plan.json", serialize_plan(mp));
  EXPECT_EQ(run(io("verify", base, pre)), 4);

  // Exported weights tampered with.
  write_text_file(pre + ".plan.json", plan);
  auto w = parse_weights(read_text_file(pre + ".weights.json"));
  w["B"].data[0] += 1.0;
  write_text_file(pre + ".weights.json", serialize_weights(w));
  EXPECT_EQ(run(io("verify", base, pre)), 4);

  fs::remove(pre + ".plan.json");
  EXPECT_EQ(run(io("verify", base, pre)), 1);
}

TEST_F(Cli, MissingAndMalformedInputs) {
  const auto base = put(testing::residual_disjoint());
  EXPECT_EQ(run({"export", "--model", (dir_ / "none.json").string(), "--weights", base + ".weights.in.json",
                 "--masks", base + ".masks.in.json"}),
            1);
  write_text_file(base + ".model.in.json", "{\"version\": 1, \"layers\": [");
  EXPECT_EQ(run(io("export", base, base) + std::vector<std::string>{"--masks", base + ".masks.in.json"}), 2);
  auto g = testing::residual_block();
  g.edges.push_back({"D", "A"});
  write_text_file(base + ".model.in.json", serialize_model(g));
  EXPECT_EQ(run(io("export", base, base) + std::vector<std::string>{"--masks", base + ".masks.in.json"}), 2);
  write_text_file(base + ".model.in.json", serialize_model(testing::residual_block()));
  write_text_file(base + ".masks.in.json", R"({"version":1,"retained":{"B":[0,9]}})");
  EXPECT_EQ(run(io("export", base, base) + std::vector<std::string>{"--masks", base + ".masks.in.json"}), 2);
}

TEST_F(Cli, TopologyErrorsExitThree) {
  GraphBuilder b;
  b.input("x", 2).mix("A", "x", 3).gather("rev", "A", {2, 1, 0}).add("s", {"A", "rev"});
  b.mix("C", "s", 3).output("y", "C");
  testing::Fixture f{"rev", b.build(), {}, {MaskTarget::kInput, {{"C", {0, 1}}}}};
  f.weights = testing::random_weights(f.graph, 1);
  const auto base = put(f);
  const std::vector<std::string> masks{"--masks", base + ".masks.in.json"};
  EXPECT_EQ(run(io("export", base, base) + masks), 3);
  EXPECT_NE(err_.str().find("segment 1"), std::string::npos) << err_.str();
  EXPECT_EQ(run(io("export", base, base) + masks + std::vector<std::string>{"--allow-fallback"}), 0);

  GraphBuilder h;
  h.input("x", 3).mix("P", "x", 4).per_channel("bias", "P").mix("Q", "bias", 2).output("y", "Q");
  testing::Fixture hf{"hazard", h.build(), {}, {MaskTarget::kOutput, {{"P", {0, 1}}}}};
  hf.weights = testing::random_weights(hf.graph, 1);
  const auto hb = put(hf);
  EXPECT_EQ(run(io("export", hb, hb) + std::vector<std::string>{"--masks", hb + ".masks.in.json"}), 3);
}

TEST_F(Cli, StatsTable) {
  const auto base = put(testing::residual_disjoint());
  ASSERT_EQ(run(io("stats", base, base) + std::vector<std::string>{"--masks", base + ".masks.in.json", "--json"}), 0);
  const auto j = nlohmann::json::parse(out_.str());
  EXPECT_EQ(j.at("upscale").at("copied"), 0);
  EXPECT_GT(j.at("baseline").at("copied").get<int>(), 0);
  EXPECT_EQ(j.at("constrained").at("copied"), 0);
  ASSERT_EQ(run(io("stats", base, base) + std::vector<std::string>{"--masks", base + ".masks.in.json"}), 0);
  EXPECT_NE(out_.str().find("baseline"), std::string::npos);
  EXPECT_NE(out_.str().find("copied"), std::string::npos);
}

TEST_F(Cli, StatsConstrainedMasks) {
  const auto base = put(testing::fan_out_gather());
  const auto pre = (dir_ / "c").string();
  ASSERT_EQ(run(io("prune", base, pre) +
                std::vector<std::string>{"--heuristic", "l1", "--sparsity", "0.4", "--strategy", "constrained"}),
            0);
  ASSERT_EQ(run(io("stats", base, base) + std::vector<std::string>{"--masks", pre + ".masks.json", "--json"}), 0);
  const auto j = nlohmann::json::parse(out_.str());
  for (const auto* s : {"upscale", "baseline", "constrained"}) EXPECT_EQ(j.at(s).at("copied"), 0) << s;
}

TEST_F(Cli, StatsDominanceOnRandomMasks) {
  const auto base = put(testing::fan_out_gather());
  for (int seed = 0; seed < 50; ++seed) {
    ASSERT_EQ(run(io("stats", base, base) + std::vector<std::string>{"--heuristic", "random", "--seed",
                                                                      std::to_string(seed), "--sparsity", "0.3",
                                                                      "--json"}),
              0);
    const auto j = nlohmann::json::parse(out_.str());
    EXPECT_LE(j.at("upscale").at("copied").get<int>(), j.at("baseline").at("copied").get<int>()) << seed;
  }
}

TEST_F(Cli, OutputModeFromFlags) {
  const auto base = put(testing::output_pair());
  const auto pre = (dir_ / "o").string();
  ASSERT_EQ(run(io("export", base, pre) + std::vector<std::string>{"--masks", base + ".masks.in.json"}), 0);
  EXPECT_EQ(run(io("verify", base, pre)), 0);
  EXPECT_EQ(run(io("export", base, pre) +
                std::vector<std::string>{"--masks", base + ".masks.in.json", "--mode", "input"}),
            2);
  EXPECT_EQ(run(io("export", base, pre) +
                std::vector<std::string>{"--heuristic", "l2", "--sparsity", "0.3", "--mode", "output"}),
            0);
}

TEST_F(Cli, ExportIsDeterministic) {
  const auto base = put(testing::fan_out_gather());
  const auto a = (dir_ / "a").string(), b = (dir_ / "b").string();
  const std::vector<std::string> flags{"--heuristic", "random", "--seed", "3", "--sparsity", "0.4"};
  ASSERT_EQ(run(io("export", base, a) + flags + std::vector<std::string>{"--threads", "1"}), 0);
  ASSERT_EQ(run(io("export", base, b) + flags), 0);
  for (const auto* s : {".plan.json", ".model.json", ".weights.json", ".masks.json"})
    EXPECT_EQ(read_text_file(a + s), read_text_file(b + s)) << s;
}

TEST_F(Cli, BinaryExitCodes) {
  const auto base = put(testing::residual_disjoint());
  const std::string bin = SLICEPACK_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int rc = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  const std::string m = " --model " + base + ".model.in.json --weights " + base + ".weights.in.json";
  EXPECT_EQ(status("export" + m + " --masks " + base + ".masks.in.json --out-prefix " + base), 0);
  EXPECT_EQ(status("verify" + m + " --out-prefix " + base), 0);
  EXPECT_EQ(status("prune" + m + " --heuristic l2 --sparsity 1.0"), 2);
  EXPECT_EQ(status("export --model /nonexistent --weights /nonexistent --heuristic l2 --sparsity 0.1"), 1);
}

}  // namespace
}  // namespace slicepack
