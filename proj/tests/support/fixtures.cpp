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

#include "fixtures.hpp"

#include <random>

namespace slicepack::testing {

WeightStore random_weights(const ModelGraph& graph, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  WeightStore w;
  for (const auto& l : graph.layers) {
    if (l.kind == LayerKind::kChannelMix) {
      Tensor t;
      t.shape = {static_cast<std::size_t>(l.out_channels), static_cast<std::size_t>(l.in_channels)};
      t.data.resize(t.shape[0] * t.shape[1]);
      for (auto& v : t.data) v = normal(rng);
      w[l.id] = std::move(t);
    } else if (l.kind == LayerKind::kPerChannel) {
      Tensor t;
      t.shape = {static_cast<std::size_t>(l.out_channels)};
      t.data.resize(t.shape[0]);
      for (auto& v : t.data) v = normal(rng);
      w[l.id] = std::move(t);
    }
  }
  return w;
}

ModelGraph residual_block() {
  GraphBuilder b;
  b.input("x", 3).mix("A", "x", 4).mix("B", "A", 3).mix("C", "B", 4);
  b.add("sum", {"A", "C"}).pass("relu", "sum").mix("D", "relu", 3).output("y", "D");
  return b.build();
}

namespace {

Fixture make(std::string name, ModelGraph g, std::map<LayerId, std::vector<int>> retained,
             MaskTarget target = MaskTarget::kInput) {
  Fixture f;
  f.name = std::move(name);
  f.weights = random_weights(g, 7);
  f.graph = std::move(g);
  f.masks.target = target;
  f.masks.retained = std::move(retained);
  return f;
}

}  // namespace

Fixture residual_disjoint() { return make("residual_disjoint", residual_block(), {{"B", {0, 2}}, {"D", {1, 3}}}); }
Fixture residual_shared() { return make("residual_shared", residual_block(), {{"B", {0, 2}}, {"D", {1, 2}}}); }

ModelGraph fan_out_block() {
  GraphBuilder b;
  b.input("x", 3).mix("A", "x", 4).mix("B", "A", 2).mix("C", "A", 2).mix("D", "A", 2);
  b.concat("cat", {"B", "C", "D"}).output("y", "cat");
  return b.build();
}

Fixture fan_out_gather() {
  return make("fan_out_gather", fan_out_block(), {{"B", {0, 2, 3}}, {"C", {1, 2, 3}}, {"D", {0, 3}}});
}
Fixture fan_out_exclusive() { return make("fan_out_exclusive", fan_out_block(), {{"B", {0, 2, 3}}, {"C", {1, 2, 3}}, {"D", {0, 1}}}); }

ModelGraph chain3() {
  GraphBuilder b;
  b.input("x", 3).mix("A", "x", 4).mix("B", "A", 4).mix("C", "B", 3).output("y", "C");
  return b.build();
}

Fixture output_pair() {
  GraphBuilder b;
  b.input("x", 3).mix("P", "x", 4).mix("Q", "x", 4).add("sum", {"P", "Q"});
  b.mix("U", "sum", 2).mix("V", "sum", 2).concat("cat", {"U", "V"}).output("y", "cat");
  return make("output_pair", b.build(), {{"P", {0, 2, 3}}, {"Q", {0, 1, 3}}}, MaskTarget::kOutput);
}

ModelGraph projection_block() {
  GraphBuilder b;
  b.input("x", 3).mix("A", "x", 4).mix("B", "A", 3).mix("C", "B", 5).mix("S", "A", 5);
  b.add("sum", {"C", "S"}).pass("relu", "sum").mix("D", "relu", 3).output("y", "D");
  return b.build();
}

std::vector<Fixture> all_fixtures() {
  return {residual_disjoint(), residual_shared(), fan_out_gather(), fan_out_exclusive(), output_pair()};
}

}  // namespace slicepack::testing
