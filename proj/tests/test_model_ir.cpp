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

#include <filesystem>

#include "slicepack/error.hpp"
#include "slicepack/model_io.hpp"
#include "support/fixtures.hpp"
#include "support/random_dag.hpp"

namespace slicepack {
namespace {

using testing::random_weights;

bool has_rule(const std::vector<Diagnostic>& d, const std::string& rule) {
  for (const auto& x : d)
    if (x.rule == rule) return true;
  return false;
}

TEST(ModelIr, MinimalChainLoads) {
  const std::string model = R"({"version":1,"layers":[
    {"id":"x","kind":"input","in_channels":3,"out_channels":3},
    {"id":"A","kind":"channel_mix","in_channels":3,"out_channels":4},
    {"id":"y","kind":"output","in_channels":4,"out_channels":4}],
    "edges":[["x","A"],["A","y"]]})";
  const std::string weights =
      R"({"version":1,"tensors":{"A":{"shape":[4,3],"data":[1,2,3,4,5,6,7,8,9,10,11,12]}}})";
  auto g = parse_model(model);
  auto w = parse_weights(weights);
  EXPECT_TRUE(validate(g, w).empty());
  ASSERT_EQ(g.layers.size(), 3u);
  EXPECT_EQ(g.layers[1].id, "A");
  EXPECT_EQ(w.at("A").at(3, 2), 12.0);
}

TEST(ModelIr, ResidualBlockHasFourMixesAndOneAdd) {
  const auto g = testing::residual_block();
  int mix = 0, add = 0;
  for (const auto& l : g.layers) {
    mix += l.kind == LayerKind::kChannelMix;
    add += l.kind == LayerKind::kAdd;
  }
  EXPECT_EQ(mix, 4);
  EXPECT_EQ(add, 1);
  EXPECT_TRUE(validate(g, random_weights(g, 1)).empty());
}

TEST(ModelIr, TransposedWeightIsRejected) {
  GraphBuilder b;
  b.input("x", 4).mix("A", "x", 3).output("y", "A");
  const auto g = b.build();
  WeightStore w;
  w["A"] = Tensor{{4, 3}, std::vector<double>(12, 1.0)};
  const auto d = validate(g, w);
  ASSERT_TRUE(has_rule(d, "weight-shape"));
  EXPECT_EQ(d.front().layer, "A");
}

TEST(ModelIr, CycleIsDiagnosed) {
  auto g = testing::chain3();
  g.edges.push_back({"B", "A"});
  const auto d = validate(g, random_weights(g, 1));
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d.front().rule, "acyclic");
  EXPECT_EQ(d.front().message.rfind("cycle through ", 0), 0u);
}

TEST(ModelIr, AddChannelMismatch) {
  GraphBuilder b;
  b.input("x", 3).mix("A", "x", 4).mix("B", "x", 5).add("s", {"A", "B"}).output("y", "s");
  const auto g = b.build();
  const auto d = validate(g, random_weights(g, 1));
  ASSERT_TRUE(has_rule(d, "channel-mismatch"));
}

TEST(ModelIr, OtherDiagnostics) {
  GraphBuilder b;
  b.input("x", 3).mix("A", "x", 4).mix("B", "A", 2).output("y", "A");
  auto g = b.build();
  EXPECT_TRUE(has_rule(validate(g, random_weights(g, 1)), "dangling"));

  auto g2 = testing::chain3();
  auto w2 = random_weights(g2, 1);
  w2.erase("B");
  EXPECT_TRUE(has_rule(validate(g2, w2), "weights"));
  g2.layers.push_back(g2.layers[1]);
  EXPECT_TRUE(has_rule(validate(g2, w2), "unique-id"));
}

TEST(ModelIr, MaskDiagnostics) {
  const auto g = testing::residual_block();
  ChannelMask m;
  m.retained["B"] = {0, 4};
  EXPECT_TRUE(has_rule(validate_mask(g, m), "mask-range"));
  m.retained["B"] = {2, 1};
  EXPECT_TRUE(has_rule(validate_mask(g, m), "mask-sorted"));
  m.retained["B"] = {};
  EXPECT_TRUE(has_rule(validate_mask(g, m), "mask-empty"));
  m.retained = {{"relu", {0}}};
  EXPECT_TRUE(has_rule(validate_mask(g, m), "mask-layer"));
  m.retained = {{"B", {0, 3}}};
  EXPECT_TRUE(validate_mask(g, m).empty());
}

TEST(ModelIr, ParseErrors) {
  EXPECT_THROW(parse_model("{"), ParseError);
  EXPECT_THROW(parse_model(R"({"version":2,"layers":[],"edges":[]})"), ParseError);
  EXPECT_THROW(parse_model(R"({"version":1,"layers":[{"id":"x","kind":"conv"}],"edges":[]})"), ParseError);
  EXPECT_THROW(parse_weights(R"({"version":1,"tensors":{"A":{"shape":[2],"data":"no"}}})"), ParseError);
  EXPECT_THROW(parse_mask(R"({"version":1,"retained":{"A":[0.5]}})"), ParseError);
}

TEST(ModelIr, LoadModelReportsErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "slicepack_ir_test";
  std::filesystem::create_directories(dir);
  EXPECT_THROW(load_model(dir / "missing.json", dir / "missing.json"), IoError);
  auto g = testing::chain3();
  auto w = random_weights(g, 3);
  w["B"].shape = {3, 4};
  write_text_file(dir / "m.json", serialize_model(g));
  write_text_file(dir / "w.json", serialize_weights(w));
  EXPECT_THROW(load_model(dir / "m.json", dir / "w.json"), ValidationError);
}

TEST(ModelIr, RoundTripIsBitIdentical) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = testing::random_dag(seed);
    const auto w = random_weights(g, seed);
    ASSERT_TRUE(validate(g, w).empty()) << format_diagnostics(validate(g, w));
    const auto text = serialize_model(g);
    const auto g2 = parse_model(text);
    EXPECT_EQ(g2, g);
    EXPECT_EQ(serialize_model(g2), text);
    const auto wt = serialize_weights(w);
    const auto w2 = parse_weights(wt);
    EXPECT_EQ(w2, w);  // doubles included, bit for bit
    EXPECT_EQ(serialize_weights(w2), wt);
  }
  ChannelMask m{MaskTarget::kOutput, {{"A", {0, 2}}, {"B", {1}}}};
  EXPECT_EQ(parse_mask(serialize_mask(m)), m);
}

TEST(ModelIr, SliceAndGatherRoundTrip) {
  GraphBuilder b;
  b.input("x", 4).slice("s", "x", 1, 2).mix("A", "s", 2).gather("g", "A", {1, 0}).output("y", "g");
  const auto g = b.build();
  EXPECT_TRUE(validate(g, random_weights(g, 1)).empty());
  EXPECT_EQ(parse_model(serialize_model(g)), g);
}

TEST(ModelIr, BuilderGraphsValidate) {
  for (const auto& f : testing::all_fixtures()) {
    EXPECT_TRUE(validate(f.graph, f.weights).empty()) << f.name;
    EXPECT_TRUE(validate_mask(f.graph, f.masks).empty()) << f.name;
  }
}

}  // namespace
}  // namespace slicepack
