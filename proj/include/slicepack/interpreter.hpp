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
#include <vector>

#include "slicepack/kernels.hpp"
#include "slicepack/model_ir.hpp"

namespace slicepack {

using Activation = std::vector<double>;

// Evaluates the graph on one channel vector. Masks given for the input side
// zero a consumer's pruned input channels before its matrix; output-side
// masks zero a producer's pruned filters. Outputs of several Output layers are
// concatenated in topological order. Throws Error on shape mismatch or when
// the graph does not have exactly one Input.
Activation run(const ModelGraph& graph, const WeightStore& weights, const Activation& input,
               const ChannelMask* masks = nullptr, ExecPolicy policy = ExecPolicy::kSerial);

// |a - b| / max(|a|, |b|), with 0 when both are 0.
double relative_deviation(double a, double b);

struct EquivalenceReport {
  int trials = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Runs both models on `trials` standard-normal inputs. Trial t draws from a
// generator seeded with seed + t, so serial and parallel runs agree exactly.
EquivalenceReport check_equivalence(const ModelGraph& original, const WeightStore& original_weights,
                                    const ChannelMask* masks, const ModelGraph& exported,
                                    const WeightStore& exported_weights, int trials, double tol,
                                    std::uint64_t seed = 0, ExecPolicy policy = ExecPolicy::kSerial);

int input_width(const ModelGraph& graph);

}  // namespace slicepack
