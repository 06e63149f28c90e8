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

#include <gtest/gtest.h>

#include <random>

#include "slicepack/consumer_graph.hpp"
#include "slicepack/error.hpp"
#include "slicepack/mrap.hpp"
#include "support/fixtures.hpp"

namespace slicepack {
namespace {

ReorderGraph graph_of(int space, const std::vector<std::pair<LayerId, std::vector<int>>>& sets) {
  std::vector<std::pair<LayerId, ChannelSet>> r;
  for (const auto& [id, v] : sets) r.emplace_back(id, ChannelSet::from_indices(space, v));
  return build_reorder_graph(space, r);
}

TEST(ReorderGraph, DisjointNodesHaveNoEdge) {
  // 1-based {1,3} and {2,4}.
  const auto g = graph_of(4, {{"B", {0, 2}}, {"D", {1, 3}}});
  ASSERT_EQ(g.size(), 2);
  EXPECT_EQ(g.node(0).reward, 2);
  EXPECT_EQ(g.node(1).reward, 2);
  EXPECT_TRUE(g.edges().empty());
  EXPECT_FALSE(g.adjacent(0, 1));
  EXPECT_EQ(g.edge_reward(0, 1), 0);
}

TEST(ReorderGraph, SharedChannelEdge) {
  const auto g = graph_of(4, {{"B", {0, 2}}, {"D", {1, 2}}});
  ASSERT_EQ(g.edges().size(), 1u);
  EXPECT_EQ(g.edges()[0].reward, -1);
  EXPECT_EQ(g.edge_reward(1, 0), -1);
  EXPECT_EQ(g.edges()[0].shared, ChannelSet(4, {2}));
}

TEST(ReorderGraph, Triangle) {
  const auto g = graph_of(5, {{"B", {0, 1}}, {"D", {1, 2, 3}}, {"E", {0, 2, 4}}});
  EXPECT_EQ(g.node(0).reward, 2);
  EXPECT_EQ(g.node(1).reward, 3);
  EXPECT_EQ(g.node(2).reward, 3);
  ASSERT_EQ(g.edges().size(), 3u);
  for (const auto& e : g.edges()) EXPECT_EQ(e.reward, -1);
}

TEST(ReorderGraph, FromSegmentMasks) {
  const auto f = testing::residual_shared();
  const auto segs = find_segments(f.graph);
  const Segment* s = nullptr;
  for (const auto& x : segs)
    if (x.producers == std::vector<LayerId>{"A", "C"}) s = &x;
  ASSERT_NE(s, nullptr);
  const auto a = analyze_segment(f.graph, *s);
  const auto g = build_reorder_graph(a, f.masks);
  ASSERT_EQ(g.size(), 2);
  EXPECT_EQ(g.node(*g.node_of("B")).retained, ChannelSet(4, {0, 2}));
  EXPECT_EQ(g.node(*g.node_of("D")).retained, ChannelSet(4, {1, 2}));
  EXPECT_EQ(g.edge_reward(0, 1), -1);

  // A consumer without a mask keeps everything and becomes a parent.
  ChannelMask partial{MaskTarget::kInput, {{"B", {0, 2}}}};
  const auto pg = build_reorder_graph(a, partial);
  EXPECT_EQ(pg.node(*pg.node_of("D")).retained, ChannelSet::full(4));
  EXPECT_TRUE(pg.is_parent(*pg.node_of("D")));

  ChannelMask bad{MaskTarget::kInput, {{"B", {0, 9}}}};
  EXPECT_THROW(build_reorder_graph(a, bad), ValidationError);
}

TEST(ReorderGraph, Subsets) {
  const auto g = graph_of(3, {{"A", {0, 1, 2}}, {"B", {0, 1}}, {"C", {1, 2}}});
  const auto s = detect_subsets(g);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].parent, 0);
  EXPECT_EQ(s[0].children, (std::vector<int>{1, 2}));
  EXPECT_TRUE(g.related(0, 1));
  EXPECT_FALSE(g.related(1, 2));

  EXPECT_TRUE(detect_subsets(graph_of(4, {{"A", {0, 1}}, {"B", {2, 3}}})).empty());
}

TEST(ReorderGraph, IdenticalMasksMerge) {
  const auto g = graph_of(3, {{"B", {0, 1}}, {"B2", {0, 1}}, {"C", {2}}});
  ASSERT_EQ(g.size(), 2);
  EXPECT_EQ(g.node(0).members, (std::vector<LayerId>{"B", "B2"}));
  EXPECT_EQ(*g.node_of("B2"), 0);
}

TEST(ReorderGraph, Properties) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int space = 1 + static_cast<int>(rng() % 12);
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<std::pair<LayerId, ChannelSet>> r;
    std::set<std::vector<int>> distinct;
    for (int i = 0; i < n; ++i) {
      ChannelSet s(space);
      for (int c = 0; c < space; ++c)
        if (rng() % 2) s.insert(c);
      if (s.empty()) s.insert(0);
      distinct.insert(s.to_vector());
      r.emplace_back("n" + std::to_string(i), s);
    }
    const auto g = build_reorder_graph(space, r);
    EXPECT_EQ(static_cast<std::size_t>(g.size()), distinct.size());
    for (int u = 0; u < g.size(); ++u) {
      EXPECT_EQ(g.node(u).reward, g.node(u).retained.size());
      for (int v = 0; v < g.size(); ++v) {
        if (u == v) continue;
        EXPECT_EQ(g.edge_reward(u, v), g.edge_reward(v, u));
        EXPECT_EQ(g.adjacent(u, v), g.node(u).retained.intersects(g.node(v).retained));
        EXPECT_EQ(g.edge_reward(u, v), -g.node(u).retained.intersection_size(g.node(v).retained));
      }
    }
    // A chain whose only overlaps are between neighbours rewards its union.
    std::vector<int> path;
    ChannelSet uni(space);
    for (int u = 0; u < g.size(); ++u) {
      bool ok = true;
      for (std::size_t k = 0; k + 1 < path.size(); ++k)
        ok = ok && !g.node(path[k]).retained.intersects(g.node(u).retained);
      if (!ok) continue;
      path.push_back(u);
      uni |= g.node(u).retained;
    }
    if (g.subsets().empty()) { EXPECT_EQ(path_reward(g, path), uni.size()); }
  }
}

}  // namespace
}  // namespace slicepack
