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

namespace slicepack {

struct Path {
  std::vector<int> nodes;
  int reward = 0;
  // Parents off the path whose channels the path's children cover; they are
  // credited in `reward` and count as placed.
  std::vector<int> covered;

  bool operator==(const Path&) const = default;
};

struct MrapOptions {
  int exact_node_limit = 20;  // exact DP up to this many nodes, then per component, then greedy
};

// Parents not on the path (and marked active) whose retained set is covered by
// the union of their children on the path.
std::vector<int> covered_parents(const ReorderGraph& graph, const std::vector<int>& nodes,
                                 const std::vector<bool>& active);

// Node rewards plus consecutive edge rewards plus the parent bonus.
int path_reward(const ReorderGraph& graph, const std::vector<int>& nodes);
int path_reward(const ReorderGraph& graph, const std::vector<int>& nodes, const std::vector<bool>& active);

// No two non-consecutive nodes share an edge unless they are parent and child.
bool is_acyclic_path(const ReorderGraph& graph, const std::vector<int>& nodes);

// Maximum reward acyclic path over the active nodes (all when `active` is
// empty). Ties resolve to the lexicographically smallest node sequence. Above
// `exact_node_limit` active nodes, components are solved separately and
// concatenated by smallest node; components still over the limit use greedy.
Path solve_mrap(const ReorderGraph& graph, const std::vector<bool>& active = {}, const MrapOptions& options = {});

// Exhaustive search over ordered subsets. Throws Error above 10 nodes.
Path brute_force_mrap(const ReorderGraph& graph);

// Repeated solve_mrap on the remaining nodes. Covered parents are removed with
// the path that covers them.
std::vector<Path> decompose_paths(const ReorderGraph& graph, const MrapOptions& options = {});

}  // namespace slicepack
