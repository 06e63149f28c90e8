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

#include <vector>

#include "slicepack/consumer_graph.hpp"
#include "slicepack/mrap.hpp"

namespace slicepack {

struct ChannelOrder {
  std::vector<int> order;    // retained classes, each once
  std::vector<int> dropped;  // classes no node retains, ascending

  bool operator==(const ChannelOrder&) const = default;
};

// Emits, per path, the unique channels of the first node, the channels it
// shares with the next node, the unique channels of that node and so on,
// skipping channels an earlier block already placed. Blocks are ascending.
// Throws Error if a path references an unknown node.
ChannelOrder order_channels(const std::vector<Path>& paths, const ReorderGraph& graph, int channel_space);

// Position of every class in `order`, -1 for classes not in it.
std::vector<int> positions(const std::vector<int>& order, int channel_space);

}  // namespace slicepack
