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

#include "slicepack/ordering.hpp"

#include "slicepack/error.hpp"

namespace slicepack {

ChannelOrder order_channels(const std::vector<Path>& paths, const ReorderGraph& graph, int channel_space) {
  ChannelOrder out;
  ChannelSet placed(channel_space);
  auto emit = [&](const ChannelSet& block) {
    for (int c : (block - placed).to_vector()) out.order.push_back(c);
    placed |= block;
  };
  for (const auto& path : paths) {
    const auto& nodes = path.nodes;
    for (int n : nodes)
      if (n < 0 || n >= graph.size()) throw Error("path references unknown node " + std::to_string(n));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      ChannelSet unique = graph.node(nodes[i]).retained;
      if (i > 0) unique -= graph.node(nodes[i - 1]).retained;
      if (i + 1 < nodes.size()) unique -= graph.node(nodes[i + 1]).retained;
      emit(unique);
      if (i + 1 < nodes.size()) emit(graph.node(nodes[i]).retained & graph.node(nodes[i + 1]).retained);
    }
  }
  ChannelSet retained(channel_space);
  for (const auto& node : graph.nodes()) retained |= node.retained;
  emit(retained);
  for (int c = 0; c < channel_space; ++c)
    if (!retained.contains(c)) out.dropped.push_back(c);
  return out;
}

std::vector<int> positions(const std::vector<int>& order, int channel_space) {
  std::vector<int> pos(static_cast<std::size_t>(channel_space), -1);
  for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
  return pos;
}

}  // namespace slicepack
