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
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "slicepack/model_ir.hpp"

namespace slicepack {

enum class Heuristic { kL1, kL2, kLamp, kRandom };
std::string_view to_string(Heuristic h);
std::optional<Heuristic> parse_heuristic(std::string_view name);

// Importance per layer and channel: input columns for input pruning, output
// filters (rows) for output pruning.
using ChannelScores = std::map<LayerId, std::vector<double>>;

// Column scores of every ChannelMix layer.
ChannelScores score_channels(const ModelGraph& graph, const WeightStore& weights, Heuristic h,
                             std::uint64_t seed = 0);
// Row scores of every ChannelMix layer.
ChannelScores score_filters(const ModelGraph& graph, const WeightStore& weights, Heuristic h,
                            std::uint64_t seed = 0);

// l1, l2 and lamp over a list of weight vectors (one per channel).
std::vector<double> score_vectors(const std::vector<std::vector<double>>& vectors, Heuristic h);

enum class MaskMode { kUnconstrained, kConstrained };

struct MaskOptions {
  double sparsity = 0.0;  // fraction of prunable channels to remove, in [0, 1)
  MaskMode mode = MaskMode::kUnconstrained;
  MaskTarget target = MaskTarget::kInput;
  bool per_layer = false;  // threshold each layer on its own instead of globally
};

// Prunes the lowest-scoring channels. Layers whose segment reaches a model
// input or output are never masked, and neither are output filters feeding a
// per-channel offset. Every masked layer keeps at least one channel. In
// constrained mode the channel scores of a segment are summed per shared
// channel and all its layers prune the same channels.
// Throws ValidationError when sparsity is outside [0, 1).
ChannelMask make_masks(const ModelGraph& graph, const ChannelScores& scores, const MaskOptions& options);

// Pruned fraction of the channels make_masks may touch.
double achieved_sparsity(const ModelGraph& graph, const ChannelMask& masks);

}  // namespace slicepack
