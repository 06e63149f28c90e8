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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slicepack/model_ir.hpp"

namespace slicepack::testing {

struct Fixture {
  std::string name;
  ModelGraph graph;
  WeightStore weights;
  ChannelMask masks;
};

// Standard-normal weights for every ChannelMix and PerChannel layer.
WeightStore random_weights(const ModelGraph& graph, std::uint64_t seed);

// x(3) -> A(4) -> B(3) -> C(4); add(A, C) -> relu -> D(3) -> y.
// A and C feed B and D. Masks are 0-based and given per case.
ModelGraph residual_block();
Fixture residual_disjoint();  // B{0,2}, D{1,3}: disjoint
Fixture residual_shared();  // B{0,2}, D{1,2}: one shared channel

// x(3) -> A(4) -> {B, C, D}(2 each) -> concat -> y.
ModelGraph fan_out_block();
Fixture fan_out_gather();  // B{0,2,3}, C{1,2,3}, D{0,3}
Fixture fan_out_exclusive();       // B{0,2,3}, C{1,2,3}, D{0,1}

// x(3) -> A(4) -> B(4) -> C(3) -> y.
ModelGraph chain3();

// Two producers summed, then two consumers: x -> P, Q; add(P, Q) -> U, V -> concat -> y.
// Output masks P keeps {0,2,3}, Q keeps {0,1,3}.
Fixture output_pair();

// Multi-branch block with a projection shortcut: x -> A; A -> B -> C; A -> S;
// add(C, S) -> D -> y. A feeds B and S; C and S feed D.
ModelGraph projection_block();

std::vector<Fixture> all_fixtures();

}  // namespace slicepack::testing
