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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slicepack/consumer_graph.hpp"
#include "slicepack/model_ir.hpp"
#include "slicepack/ordering.hpp"

namespace slicepack {

// How a consumer reads its (rewritten) input tensor.
struct ConsumerAccess {
  enum class Mode { kSlice, kGather };
  Mode mode = Mode::kSlice;
  int start = 0;   // kSlice
  int length = 0;  // kSlice
  // kSlice: original input column for each slice position.
  std::vector<int> perm;
  // kGather: positions in the new input tensor, by ascending original column.
  std::vector<int> indices;

  int reads() const { return mode == Mode::kSlice ? length : static_cast<int>(indices.size()); }
  bool operator==(const ConsumerAccess&) const = default;
};

struct CopyStats {
  int total_reads = 0;
  int copied = 0;
  int zero_copy_optimal = 0;
  int interior_copied = 0;  // channels gathered inside the segment to align joins
  int slice_reads = 0;

  CopyStats& operator+=(const CopyStats& o);
  double copied_fraction() const { return total_reads ? static_cast<double>(copied) / total_reads : 0.0; }
  bool operator==(const CopyStats&) const = default;
};

struct ProducerPerm {
  std::vector<int> source;   // new row k = original row source[k]
  std::vector<int> dropped;  // original rows removed, ascending
  bool operator==(const ProducerPerm&) const = default;
};

// Export plan for one segment.
struct ExportPlan {
  int segment = 0;
  std::vector<LayerId> producers;
  std::vector<LayerId> consumers;
  int channel_space = 0;
  // Interior selections and join targets follow `order` when set; otherwise
  // every tensor keeps its original channel sequence.
  bool reorder = false;
  // The segment could not be traced; consumers read original positions.
  bool fallback = false;
  std::vector<int> order;
  std::vector<int> dropped;
  std::map<LayerId, ProducerPerm> producer_perms;
  std::map<LayerId, ConsumerAccess> access;
  std::map<LayerId, std::vector<int>> per_channel;  // new position k = original position source[k]
  CopyStats stats;

  bool operator==(const ExportPlan&) const = default;
};

enum class Strategy { kUpscale, kBaseline, kConstrained };
std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

// All segment plans for one model.
struct ModelPlan {
  Strategy strategy = Strategy::kUpscale;
  MaskTarget target = MaskTarget::kInput;
  std::vector<ExportPlan> segments;
  bool operator==(const ModelPlan&) const = default;
};

// Input pruning, reordered by `order`. Pinned segments keep their layout and
// drop nothing. Classes no consumer retains are dropped unless a tensor would
// be left empty, in which case its smallest class stays (appended to order).
ExportPlan plan_export(const SegmentAnalysis& analysis, const ChannelOrder& order, const ChannelMask& masks);

// Full upscale pipeline for one segment: reorder graph, paths, order, plan.
// When the path order still copies and the segment has at most
// kExactLayoutNodes distinct retained sets over kExactLayoutChannels kept
// classes, every permutation of the kept classes is tried and the first with
// the fewest copies wins (unless `exact_layout` is false). Falls back to the baseline plan if that is cheaper.
inline constexpr int kExactLayoutNodes = 6;
inline constexpr int kExactLayoutChannels = 8;
ExportPlan plan_upscale(const SegmentAnalysis& analysis, const ChannelMask& masks, const MrapOptions& options = {},
                        bool exact_layout = true);

// No reordering. Constrained masks drop the common pruned channels and every
// consumer reads a full slice; otherwise every strict consumer gathers.
ExportPlan plan_baseline(const SegmentAnalysis& analysis, const ChannelMask& masks);

// Output pruning: producers are the reorder-graph nodes; joins become a sum
// over shared bands and a concatenation of unique bands. `reorder` false gives
// the infill baseline. Throws OutputPruningHazard for strict masks on pinned
// segments or segments holding a PerChannel layer.
ExportPlan plan_export_output(const SegmentAnalysis& analysis, const ChannelMask& masks, bool reorder,
                              const MrapOptions& options = {});

// Identity plan for a segment that failed tracing: consumers gather their
// retained original columns.
ExportPlan plan_fallback(const ModelGraph& graph, const Segment& segment, const ChannelMask& masks);

// Rewrites graph and weights. Inputs are not modified. Throws PlanError when a
// plan does not fit the graph.
std::pair<ModelGraph, WeightStore> apply_plan(const ModelPlan& plan, const ModelGraph& graph,
                                              const WeightStore& weights);

CopyStats copy_report(const std::vector<ExportPlan>& plans);

// Per segment, every consumer (or producer, in output mode) keeps the union of
// the segment's retained channels that it can see.
ChannelMask constrain_masks(const ModelGraph& graph, const ChannelMask& masks);

// True when, for every class, the consumers that see it all keep it or all
// prune it.
bool masks_constrained(const SegmentAnalysis& analysis, const ChannelMask& masks);

std::string serialize_plan(const ModelPlan& plan);
ModelPlan parse_plan(std::string_view text);

}  // namespace slicepack
