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

#include "slicepack/consumer_graph.hpp"

#include <algorithm>

#include "slicepack/error.hpp"

namespace slicepack {

std::vector<ProducerEquivalence> reduce_producers(const Segment& segment, const ModelGraph& graph) {
  auto trace = trace_channels(graph, segment);
  if (!trace.violations.empty()) throw UnsupportedTopology(segment.id, trace.violations.front());
  std::vector<ProducerEquivalence> out;
  for (const auto& p : segment.producers) out.push_back({p, trace.tensor_classes.at(p)});
  return out;
}

const std::vector<int>& SegmentAnalysis::input_classes(const LayerId& reader) const {
  auto it = trace.reads.find(reader);
  if (it == trace.reads.end()) throw Error(reader + " does not read segment " + std::to_string(segment.id));
  return trace.tensor_classes.at(it->second);
}

const std::vector<int>& SegmentAnalysis::output_classes(const LayerId& producer) const {
  auto it = trace.tensor_classes.find(producer);
  if (it == trace.tensor_classes.end()) throw Error(producer + " is not in segment " + std::to_string(segment.id));
  return it->second;
}

SegmentAnalysis analyze_segment(const ModelGraph& graph, const Segment& segment) {
  SegmentAnalysis a;
  a.segment = segment;
  a.trace = trace_channels(graph, segment);
  if (!a.trace.violations.empty()) throw UnsupportedTopology(segment.id, a.trace.violations.front());
  for (const auto& p : segment.producers) a.equivalences.push_back({p, a.trace.tensor_classes.at(p)});
  GraphIndex g(graph);
  auto keep = [&](const std::vector<LayerId>& ids, bool with_inputs) {
    for (const auto& id : ids) {
      const auto i = g.at(id);
      a.layers[id] = g.layer(i);
      if (!with_inputs) continue;
      auto& in = a.inputs[id];
      for (auto p : g.preds(i)) in.push_back(g.layer(p).id);
    }
  };
  keep(segment.producers, false);
  keep(segment.interior, true);
  keep(segment.consumers, true);
  keep(segment.outputs, true);
  return a;
}

int ReorderGraph::add_member(const LayerId& member, const ChannelSet& retained) {
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    if (nodes_[n].retained == retained) {
      nodes_[n].members.push_back(member);
      member_node_[member] = static_cast<int>(n);
      return static_cast<int>(n);
    }
  }
  nodes_.push_back({{member}, retained, retained.size()});
  member_node_[member] = size() - 1;
  return size() - 1;
}

void ReorderGraph::finalize() {
  const auto n = nodes_.size();
  edges_.clear();
  neighbors_.assign(n, {});
  edge_at_.assign(n, std::vector<int>(n, -1));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      auto shared = nodes_[u].retained & nodes_[v].retained;
      if (shared.empty()) continue;
      const int k = static_cast<int>(edges_.size());
      const int w = -shared.size();
      edges_.push_back({static_cast<int>(u), static_cast<int>(v), std::move(shared), w});
      edge_at_[u][v] = edge_at_[v][u] = k;
      neighbors_[u].push_back(static_cast<int>(v));
      neighbors_[v].push_back(static_cast<int>(u));
    }
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
  subsets_ = detect_subsets(*this);
}

int ReorderGraph::edge_index(int a, int b) const {
  if (a < 0 || b < 0 || a >= size() || b >= size()) throw Error("reorder graph node out of range");
  return edge_at_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

int ReorderGraph::edge_reward(int a, int b) const {
  const int e = edge_index(a, b);
  return e < 0 ? 0 : edges_[static_cast<std::size_t>(e)].reward;
}

bool ReorderGraph::related(int a, int b) const {
  const auto& ra = node(a).retained;
  const auto& rb = node(b).retained;
  return ra.is_strict_subset_of(rb) || rb.is_strict_subset_of(ra);
}

bool ReorderGraph::is_parent(int n) const {
  return std::any_of(subsets_.begin(), subsets_.end(), [&](const auto& s) { return s.parent == n; });
}

std::vector<int> ReorderGraph::children_of(int parent) const {
  for (const auto& s : subsets_)
    if (s.parent == parent) return s.children;
  return {};
}

std::optional<int> ReorderGraph::node_of(const LayerId& member) const {
  auto it = member_node_.find(member);
  if (it == member_node_.end()) return std::nullopt;
  return it->second;
}

std::vector<SubsetRelation> detect_subsets(const ReorderGraph& graph) {
  std::vector<SubsetRelation> out;
  for (int p = 0; p < graph.size(); ++p) {
    SubsetRelation rel{p, {}};
    for (int c = 0; c < graph.size(); ++c)
      if (c != p && graph.node(c).retained.is_strict_subset_of(graph.node(p).retained)) rel.children.push_back(c);
    if (!rel.children.empty()) out.push_back(std::move(rel));
  }
  return out;
}

ChannelSet consumer_retained(const SegmentAnalysis& analysis, const ChannelMask& masks, const LayerId& consumer) {
  const auto& cols = analysis.input_classes(consumer);
  ChannelSet s(analysis.trace.channel_space);
  auto it = masks.retained.find(consumer);
  if (it == masks.retained.end()) {
    for (int c : cols) s.insert(c);
    return s;
  }
  for (int k : it->second) {
    if (k < 0 || k >= static_cast<int>(cols.size()))
      throw ValidationError("mask for " + consumer + ": index " + std::to_string(k) + " out of range");
    s.insert(cols[static_cast<std::size_t>(k)]);
  }
  if (s.empty()) throw ValidationError("mask for " + consumer + " retains nothing");
  return s;
}

ReorderGraph build_reorder_graph(const SegmentAnalysis& analysis, const ChannelMask& masks) {
  ReorderGraph g(analysis.trace.channel_space);
  for (const auto& c : analysis.segment.consumers) g.add_member(c, consumer_retained(analysis, masks, c));
  g.finalize();
  return g;
}

ReorderGraph build_reorder_graph(int channel_space, const std::vector<std::pair<LayerId, ChannelSet>>& retained) {
  ReorderGraph g(channel_space);
  for (const auto& [id, set] : retained) {
    if (set.universe() != channel_space) throw ValidationError("retained set of " + id + " has the wrong universe");
    if (set.empty()) throw ValidationError("retained set of " + id + " is empty");
    g.add_member(id, set);
  }
  g.finalize();
  return g;
}

}  // namespace slicepack
