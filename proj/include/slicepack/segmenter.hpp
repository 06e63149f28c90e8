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
#include <set>
#include <string>
#include <vector>

#include "slicepack/model_ir.hpp"

namespace slicepack {

// A closed group of producers and consumers sharing one channel space. Every
// list is in topological order of the graph.
struct Segment {
  int id = 0;
  std::vector<LayerId> producers;  // ChannelMix or Input layers
  std::vector<LayerId> consumers;  // ChannelMix layers reading the space
  std::vector<LayerId> interior;   // Add/Concat/PassThrough/PerChannel/Slice/Gather
  std::vector<LayerId> outputs;    // Output layers reading the space
  int channel_space = 0;
  bool has_input_producer = false;

  // Layout must stay in original order: reordering would change the model's
  // external inputs or outputs.
  bool pinned() const { return has_input_producer || !outputs.empty(); }
};

// All ChannelMix layers reachable from any producer's output through interior
// layers only. Throws Error on unknown ids or non-producer kinds.
std::set<LayerId> consumers_of(const ModelGraph& graph, const std::set<LayerId>& producers);

// Mirror of consumers_of, walking backwards to ChannelMix or Input layers.
std::set<LayerId> producers_of(const ModelGraph& graph, const std::set<LayerId>& consumers);

// Fixed-point closure starting from every unassigned producer in topological
// order. Segments are numbered in discovery order.
std::vector<Segment> find_segments(const ModelGraph& graph);

// How each tensor inside a segment maps onto the segment's channel classes.
// Channels are identified across producers by Add (position-wise) and kept
// apart by Concat; Slice and Gather select; PassThrough and PerChannel keep.
// Classes are numbered by first appearance over producers in segment order,
// then by producer-local channel index.
struct ChannelTrace {
  int channel_space = 0;
  // Output tensor classes of every producer and interior layer, by position.
  std::map<LayerId, std::vector<int>> tensor_classes;
  // Tensor each consumer / output layer reads (its single predecessor).
  std::map<LayerId, LayerId> reads;
  // Human-readable reasons the trace breaks the reduction assumptions.
  std::vector<std::string> violations;
};

ChannelTrace trace_channels(const ModelGraph& graph, const Segment& segment);

}  // namespace slicepack
