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
#include <vector>

#include "slicepack/channel_set.hpp"
#include "slicepack/model_ir.hpp"
#include "slicepack/segmenter.hpp"

namespace slicepack {

// Producer-local output channel k maps to segment class to_space[k].
struct ProducerEquivalence {
  LayerId producer;
  std::vector<int> to_space;
};

// Throws UnsupportedTopology when the segment interior mixes two channels of
// the same producer or duplicates a class inside one tensor.
std::vector<ProducerEquivalence> reduce_producers(const Segment& segment, const ModelGraph& graph);

// Everything the planners need to know about one segment's channel flow.
struct SegmentAnalysis {
  Segment segment;
  ChannelTrace trace;
  std::vector<ProducerEquivalence> equivalences;
  std::map<LayerId, Layer> layers;                   // every member of the segment
  std::map<LayerId, std::vector<LayerId>> inputs;    // predecessors of interior, consumer and output layers

  // Classes of the tensor a consumer (or Output) reads, by input column.
  const std::vector<int>& input_classes(const LayerId& reader) const;
  // Classes a producer writes, by output row.
  const std::vector<int>& output_classes(const LayerId& producer) const;
};

// Traces the segment and runs reduce_producers.
SegmentAnalysis analyze_segment(const ModelGraph& graph, const Segment& segment);

struct RGNode {
  std::vector<LayerId> members;  // consumers (or producers in output mode) sharing this retained set
  ChannelSet retained;
  int reward = 0;
};

struct RGEdge {
  int u = 0;  // u < v
  int v = 0;
  ChannelSet shared;
  int reward = 0;
};

struct SubsetRelation {
  int parent = 0;
  std::vector<int> children;
};

class ReorderGraph {
 public:
  ReorderGraph() = default;
  explicit ReorderGraph(int channel_space) : channel_space_(channel_space) {}

  // Adds a member with its retained set. Members with an equal retained set
  // share one node. Returns the node id.
  int add_member(const LayerId& member, const ChannelSet& retained);
  // Computes edges and subset relations; call once after the last add_member.
  void finalize();

  int channel_space() const { return channel_space_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<RGNode>& nodes() const { return nodes_; }
  const RGNode& node(int n) const { return nodes_.at(static_cast<std::size_t>(n)); }
  const std::vector<RGEdge>& edges() const { return edges_; }
  const std::vector<SubsetRelation>& subsets() const { return subsets_; }

  bool adjacent(int a, int b) const { return edge_index(a, b) >= 0; }
  int edge_reward(int a, int b) const;  // 0 when the pair shares no edge
  const std::vector<int>& neighbors(int n) const { return neighbors_.at(static_cast<std::size_t>(n)); }
  // One retained set strictly contains the other.
  bool related(int a, int b) const;
  bool is_parent(int n) const;
  std::vector<int> children_of(int parent) const;
  std::optional<int> node_of(const LayerId& member) const;

 private:
  int edge_index(int a, int b) const;

  int channel_space_ = 0;
  std::vector<RGNode> nodes_;
  std::vector<RGEdge> edges_;
  std::vector<SubsetRelation> subsets_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<int>> edge_at_;
  std::map<LayerId, int> member_node_;
};

// Input pruning: one node per consumer, retained = classes of its kept input
// columns. Consumers without a mask entry keep every column.
// Throws ValidationError on out-of-range indices.
ReorderGraph build_reorder_graph(const SegmentAnalysis& analysis, const ChannelMask& masks);

// Builds from explicit retained sets (tests, output pruning).
ReorderGraph build_reorder_graph(int channel_space, const std::vector<std::pair<LayerId, ChannelSet>>& retained);

std::vector<SubsetRelation> detect_subsets(const ReorderGraph& graph);

// Retained class set of one consumer under `masks`.
ChannelSet consumer_retained(const SegmentAnalysis& analysis, const ChannelMask& masks, const LayerId& consumer);

}  // namespace slicepack
