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

#include "slicepack/model_ir.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "slicepack/error.hpp"

namespace slicepack {

namespace {

constexpr std::pair<LayerKind, std::string_view> kKindNames[] = {
    {LayerKind::kInput, "input"},
    {LayerKind::kOutput, "output"},
    {LayerKind::kChannelMix, "channel_mix"},
    {LayerKind::kAdd, "add"},
    {LayerKind::kConcat, "concat"},
    {LayerKind::kPassThrough, "pass_through"},
    {LayerKind::kPerChannel, "per_channel"},
    {LayerKind::kSlice, "slice"},
    {LayerKind::kGather, "gather"},
};

void diag(std::vector<Diagnostic>& out, const LayerId& id, std::string rule, std::string msg) {
  out.push_back({id, std::move(rule), std::move(msg)});
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<LayerKind> parse_layer_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

bool is_interior_kind(LayerKind kind) {
  switch (kind) {
    case LayerKind::kAdd:
    case LayerKind::kConcat:
    case LayerKind::kPassThrough:
    case LayerKind::kPerChannel:
    case LayerKind::kSlice:
    case LayerKind::kGather:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(MaskTarget target) {
  return target == MaskTarget::kInput ? "input" : "output";
}

std::optional<MaskTarget> parse_mask_target(std::string_view name) {
  if (name == "input") return MaskTarget::kInput;
  if (name == "output") return MaskTarget::kOutput;
  return std::nullopt;
}

const Layer* ModelGraph::find(const LayerId& id) const {
  for (const auto& l : layers)
    if (l.id == id) return &l;
  return nullptr;
}

Layer* ModelGraph::find(const LayerId& id) {
  for (auto& l : layers)
    if (l.id == id) return &l;
  return nullptr;
}

GraphIndex::GraphIndex(const ModelGraph& graph) : graph_(&graph) {
  const std::size_t n = graph.layers.size();
  for (std::size_t i = 0; i < n; ++i) ids_.emplace(graph.layers[i].id, i);
  preds_.resize(n);
  succs_.resize(n);
  for (const auto& e : graph.edges) {
    auto s = ids_.find(e.src);
    auto d = ids_.find(e.dst);
    if (s == ids_.end() || d == ids_.end()) continue;
    succs_[s->second].push_back(d->second);
    preds_[d->second].push_back(s->second);
  }
  std::vector<std::size_t> indeg(n);
  for (std::size_t i = 0; i < n; ++i) indeg[i] = preds_[i].size();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  while (!ready.empty()) {
    auto i = ready.top();
    ready.pop();
    topo_.push_back(i);
    for (auto s : succs_[i])
      if (--indeg[s] == 0) ready.push(s);
  }
  rank_.assign(n, n);
  for (std::size_t r = 0; r < topo_.size(); ++r) rank_[topo_[r]] = r;
}

std::optional<std::size_t> GraphIndex::index_of(const LayerId& id) const {
  auto it = ids_.find(id);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t GraphIndex::at(const LayerId& id) const {
  auto i = index_of(id);
  if (!i) throw Error("unknown layer id '" + id + "'");
  return *i;
}

std::vector<Diagnostic> validate(const ModelGraph& graph, const WeightStore& weights) {
  std::vector<Diagnostic> out;
  std::set<LayerId> seen;
  for (const auto& l : graph.layers) {
    if (l.id.empty()) diag(out, l.id, "id", "empty layer id");
    if (!seen.insert(l.id).second) diag(out, l.id, "unique-id", "duplicate layer id " + l.id);
  }
  if (!out.empty()) return out;

  for (const auto& e : graph.edges) {
    if (!graph.find(e.src)) diag(out, e.src, "edge", "edge source " + e.src + " is not a layer");
    if (!graph.find(e.dst)) diag(out, e.dst, "edge", "edge target " + e.dst + " is not a layer");
    if (e.src == e.dst) diag(out, e.src, "acyclic", "cycle through " + e.src);
  }
  if (!out.empty()) return out;

  GraphIndex index(graph);
  if (!index.acyclic()) {
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (index.topo_rank(i) == index.size()) {
        diag(out, index.layer(i).id, "acyclic", "cycle through " + index.layer(i).id);
        break;
      }
    }
    return out;
  }

  bool has_input = false;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Layer& l = index.layer(i);
    const auto& preds = index.preds(i);
    const auto npred = preds.size();
    if (l.kind == LayerKind::kInput) has_input = true;

    if (l.in_channels < 1 || l.out_channels < 1)
      diag(out, l.id, "channels", l.id + " must have at least one input and output channel");

    // Arity.
    switch (l.kind) {
      case LayerKind::kInput:
        if (npred != 0) diag(out, l.id, "arity", "input " + l.id + " has predecessors");
        break;
      case LayerKind::kAdd:
      case LayerKind::kConcat:
        if (npred < 2)
          diag(out, l.id, "arity", std::string(to_string(l.kind)) + " " + l.id + " needs at least 2 predecessors");
        break;
      default:
        if (npred != 1) diag(out, l.id, "arity", l.id + " must have exactly one predecessor");
    }
    if (l.kind == LayerKind::kOutput) {
      if (!index.succs(i).empty()) diag(out, l.id, "arity", "output " + l.id + " has successors");
    } else if (index.succs(i).empty()) {
      diag(out, l.id, "dangling", l.id + " has no successor");
    }

    // Shape rules for the layer itself.
    switch (l.kind) {
      case LayerKind::kChannelMix:
        break;
      case LayerKind::kSlice:
        if (l.offset < 0 || l.offset + l.out_channels > l.in_channels)
          diag(out, l.id, "slice-range", "slice " + l.id + " range exceeds its input");
        break;
      case LayerKind::kGather:
        if (static_cast<int>(l.indices.size()) != l.out_channels)
          diag(out, l.id, "gather-size", "gather " + l.id + " index count differs from out_channels");
        for (int k : l.indices)
          if (k < 0 || k >= l.in_channels) {
            diag(out, l.id, "gather-range", "gather " + l.id + " index out of range");
            break;
          }
        break;
      default:
        if (l.in_channels != l.out_channels)
          diag(out, l.id, "width", l.id + " must have equal input and output channel counts");
    }

    // Channel compatibility with predecessors.
    if (npred == 0) continue;
    if (l.kind == LayerKind::kConcat) {
      int sum = 0;
      for (auto p : preds) sum += index.layer(p).out_channels;
      if (sum != l.in_channels)
        diag(out, l.id, "channel-mismatch", "concat " + l.id + " inputs sum to " + std::to_string(sum) +
                                                " channels, declared " + std::to_string(l.in_channels));
    } else {
      for (auto p : preds) {
        const Layer& src = index.layer(p);
        if (src.out_channels != l.in_channels)
          diag(out, l.id, "channel-mismatch",
               l.id + " expects " + std::to_string(l.in_channels) + " channels but " + src.id + " produces " +
                   std::to_string(src.out_channels));
      }
    }
  }
  if (!has_input) diag(out, "", "input", "graph has no input layer");

  // Weights.
  for (const auto& l : graph.layers) {
    auto it = weights.find(l.id);
    if (l.kind == LayerKind::kChannelMix) {
      if (it == weights.end()) {
        diag(out, l.id, "weights", "missing weight for " + l.id);
        continue;
      }
      const Tensor& t = it->second;
      if (t.shape.size() != 2 || t.shape[0] != static_cast<std::size_t>(l.out_channels) ||
          t.shape[1] != static_cast<std::size_t>(l.in_channels))
        diag(out, l.id, "weight-shape",
             "weight for " + l.id + " must be " + std::to_string(l.out_channels) + "x" +
                 std::to_string(l.in_channels));
    } else if (l.kind == LayerKind::kPerChannel) {
      if (it == weights.end()) {
        diag(out, l.id, "weights", "missing vector for " + l.id);
        continue;
      }
      const Tensor& t = it->second;
      if (t.shape.size() != 1 || t.shape[0] != static_cast<std::size_t>(l.out_channels))
        diag(out, l.id, "weight-shape",
             "vector for " + l.id + " must have length " + std::to_string(l.out_channels));
    } else if (it != weights.end()) {
      diag(out, l.id, "weights", std::string(to_string(l.kind)) + " " + l.id + " takes no weights");
    }
  }
  for (const auto& [id, t] : weights) {
    if (!graph.find(id)) diag(out, id, "weights", "weight for unknown layer " + id);
    std::size_t n = 1;
    for (auto d : t.shape) n *= d;
    if (t.shape.empty() || n != t.data.size())
      diag(out, id, "weight-shape", "tensor " + id + " data length does not match its shape");
  }
  return out;
}

std::vector<Diagnostic> validate_mask(const ModelGraph& graph, const ChannelMask& mask) {
  std::vector<Diagnostic> out;
  for (const auto& [id, idx] : mask.retained) {
    const Layer* l = graph.find(id);
    if (!l) {
      diag(out, id, "mask-layer", "mask for unknown layer " + id);
      continue;
    }
    if (l->kind != LayerKind::kChannelMix) {
      diag(out, id, "mask-layer", "mask on non channel-mix layer " + id);
      continue;
    }
    const int limit = mask.target == MaskTarget::kInput ? l->in_channels : l->out_channels;
    if (idx.empty()) diag(out, id, "mask-empty", "mask for " + id + " retains nothing");
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= limit) {
        diag(out, id, "mask-range", "mask index " + std::to_string(idx[k]) + " out of range for " + id);
        break;
      }
      if (k > 0 && idx[k] <= idx[k - 1]) {
        diag(out, id, "mask-sorted", "mask for " + id + " is not strictly ascending");
        break;
      }
    }
  }
  return out;
}

Layer& GraphBuilder::push(Layer layer, const std::vector<LayerId>& from) {
  for (const auto& f : from) graph_.edges.push_back({f, layer.id});
  graph_.layers.push_back(std::move(layer));
  return graph_.layers.back();
}

int GraphBuilder::channels(const LayerId& id) const {
  const Layer* l = graph_.find(id);
  if (!l) throw Error("builder: unknown layer " + id);
  return l->out_channels;
}

GraphBuilder& GraphBuilder::input(const LayerId& id, int channels) {
  push({id, LayerKind::kInput, channels, channels, 0, {}}, {});
  return *this;
}

GraphBuilder& GraphBuilder::output(const LayerId& id, const LayerId& from) {
  const int c = channels(from);
  push({id, LayerKind::kOutput, c, c, 0, {}}, {from});
  return *this;
}

GraphBuilder& GraphBuilder::mix(const LayerId& id, const LayerId& from, int out_channels) {
  push({id, LayerKind::kChannelMix, channels(from), out_channels, 0, {}}, {from});
  return *this;
}

GraphBuilder& GraphBuilder::add(const LayerId& id, const std::vector<LayerId>& from) {
  const int c = channels(from.at(0));
  push({id, LayerKind::kAdd, c, c, 0, {}}, from);
  return *this;
}

GraphBuilder& GraphBuilder::concat(const LayerId& id, const std::vector<LayerId>& from) {
  int c = 0;
  for (const auto& f : from) c += channels(f);
  push({id, LayerKind::kConcat, c, c, 0, {}}, from);
  return *this;
}

GraphBuilder& GraphBuilder::pass(const LayerId& id, const LayerId& from) {
  const int c = channels(from);
  push({id, LayerKind::kPassThrough, c, c, 0, {}}, {from});
  return *this;
}

GraphBuilder& GraphBuilder::per_channel(const LayerId& id, const LayerId& from) {
  const int c = channels(from);
  push({id, LayerKind::kPerChannel, c, c, 0, {}}, {from});
  return *this;
}

GraphBuilder& GraphBuilder::slice(const LayerId& id, const LayerId& from, int offset, int length) {
  push({id, LayerKind::kSlice, channels(from), length, offset, {}}, {from});
  return *this;
}

GraphBuilder& GraphBuilder::gather(const LayerId& id, const LayerId& from, std::vector<int> indices) {
  const int n = static_cast<int>(indices.size());
  push({id, LayerKind::kGather, channels(from), n, 0, std::move(indices)}, {from});
  return *this;
}

}  // namespace slicepack
