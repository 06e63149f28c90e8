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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace slicepack {

using LayerId = std::string;

enum class LayerKind {
  kInput,
  kOutput,
  kChannelMix,   // weight maps in-channels to out-channels (conv, dense)
  kAdd,          // elementwise sum of equal-width inputs
  kConcat,       // channel concatenation, inputs in edge order
  kPassThrough,  // channel-independent, width preserving; evaluated as max(0, x)
  kPerChannel,   // adds one learned scalar per channel
  kSlice,        // contiguous channel view [offset, offset + out_channels)
  kGather,       // explicit channel copy by index list
};

std::string_view to_string(LayerKind kind);
std::optional<LayerKind> parse_layer_kind(std::string_view name);

// True for kinds that carry channels between producers and consumers without
// mixing them.
bool is_interior_kind(LayerKind kind);

struct Layer {
  LayerId id;
  LayerKind kind = LayerKind::kPassThrough;
  int in_channels = 0;
  int out_channels = 0;
  int offset = 0;            // kSlice only
  std::vector<int> indices;  // kGather only

  bool operator==(const Layer&) const = default;
};

struct Edge {
  LayerId src;
  LayerId dst;
  bool operator==(const Edge&) const = default;
};

// Layers in declaration order plus ordered edges. Predecessor order of a layer
// is the order its incoming edges appear in `edges`, which fixes Concat layout.
struct ModelGraph {
  std::vector<Layer> layers;
  std::vector<Edge> edges;

  const Layer* find(const LayerId& id) const;
  Layer* find(const LayerId& id);
  bool operator==(const ModelGraph&) const = default;
};

// Dense row-major real tensor. ChannelMix weights are [out, in]; PerChannel
// vectors are [channels].
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }
  bool operator==(const Tensor&) const = default;
};

using WeightStore = std::map<LayerId, Tensor>;

// Per-layer retained index lists. For input pruning the key is a consumer and
// the indices address its pre-pruning input channels; for output pruning the
// key is a producer and the indices address its output filters.
enum class MaskTarget { kInput, kOutput };
std::string_view to_string(MaskTarget target);
std::optional<MaskTarget> parse_mask_target(std::string_view name);

struct ChannelMask {
  MaskTarget target = MaskTarget::kInput;
  std::map<LayerId, std::vector<int>> retained;
  bool operator==(const ChannelMask&) const = default;
};

struct Diagnostic {
  LayerId layer;
  std::string rule;
  std::string message;
};

std::vector<Diagnostic> validate(const ModelGraph& graph, const WeightStore& weights);

// Diagnostics for a mask against a validated graph: unknown layer, wrong layer
// kind, index out of range, unsorted or duplicate indices, empty set.
std::vector<Diagnostic> validate_mask(const ModelGraph& graph, const ChannelMask& mask);

// Adjacency view over a graph. Holds indices into graph.layers; the graph must
// outlive it and stay unmodified.
class GraphIndex {
 public:
  explicit GraphIndex(const ModelGraph& graph);

  const ModelGraph& graph() const { return *graph_; }
  std::size_t size() const { return graph_->layers.size(); }
  const Layer& layer(std::size_t i) const { return graph_->layers[i]; }
  std::optional<std::size_t> index_of(const LayerId& id) const;
  std::size_t at(const LayerId& id) const;  // throws Error on unknown id

  const std::vector<std::size_t>& preds(std::size_t i) const { return preds_[i]; }
  const std::vector<std::size_t>& succs(std::size_t i) const { return succs_[i]; }

  // Kahn order with ties broken by declaration order; empty when cyclic.
  const std::vector<std::size_t>& topo_order() const { return topo_; }
  std::size_t topo_rank(std::size_t i) const { return rank_[i]; }
  bool acyclic() const { return topo_.size() == size(); }

 private:
  const ModelGraph* graph_;
  std::unordered_map<LayerId, std::size_t> ids_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::vector<std::size_t>> succs_;
  std::vector<std::size_t> topo_;
  std::vector<std::size_t> rank_;
};

// Small builder used by fixtures and tests.
class GraphBuilder {
 public:
  GraphBuilder& input(const LayerId& id, int channels);
  GraphBuilder& output(const LayerId& id, const LayerId& from);
  GraphBuilder& mix(const LayerId& id, const LayerId& from, int out_channels);
  GraphBuilder& add(const LayerId& id, const std::vector<LayerId>& from);
  GraphBuilder& concat(const LayerId& id, const std::vector<LayerId>& from);
  GraphBuilder& pass(const LayerId& id, const LayerId& from);
  GraphBuilder& per_channel(const LayerId& id, const LayerId& from);
  GraphBuilder& slice(const LayerId& id, const LayerId& from, int offset, int length);
  GraphBuilder& gather(const LayerId& id, const LayerId& from, std::vector<int> indices);

  int channels(const LayerId& id) const;
  const ModelGraph& graph() const { return graph_; }
  ModelGraph build() const { return graph_; }

 private:
  Layer& push(Layer layer, const std::vector<LayerId>& from);
  ModelGraph graph_;
};

}  // namespace slicepack
