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

#include "slicepack/mrap.hpp"

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <unordered_map>

#include "slicepack/error.hpp"

namespace slicepack {

namespace {

std::vector<bool> all_active(const ReorderGraph& g, const std::vector<bool>& active) {
  if (active.empty()) return std::vector<bool>(static_cast<std::size_t>(g.size()), true);
  if (static_cast<int>(active.size()) != g.size()) throw Error("active mask size does not match the reorder graph");
  return active;
}

void check_nodes(const ReorderGraph& g, const std::vector<int>& nodes) {
  for (int n : nodes)
    if (n < 0 || n >= g.size()) throw Error("path references unknown node " + std::to_string(n));
}

// Connected components over active nodes, each sorted, ordered by smallest node.
std::vector<std::vector<int>> components(const ReorderGraph& g, const std::vector<bool>& active) {
  std::vector<int> comp(static_cast<std::size_t>(g.size()), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < g.size(); ++s) {
    if (!active[static_cast<std::size_t>(s)] || comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> members{s};
    comp[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      for (int n : g.neighbors(members[k])) {
        if (!active[static_cast<std::size_t>(n)] || comp[static_cast<std::size_t>(n)] >= 0) continue;
        comp[static_cast<std::size_t>(n)] = static_cast<int>(out.size());
        members.push_back(n);
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

// DP over a node subset in local indices.
class ComponentSolver {
 public:
  ComponentSolver(const ReorderGraph& g, const std::vector<int>& nodes) : g_(g), nodes_(nodes) {
    const auto m = nodes.size();
    reward_.resize(m);
    edge_.assign(m, std::vector<int>(m, 0));
    inval_.assign(m, 0);
    for (std::size_t a = 0; a < m; ++a) {
      reward_[a] = g.node(nodes[a]).reward;
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        edge_[a][b] = g.edge_reward(nodes[a], nodes[b]);
        if (g.adjacent(nodes[a], nodes[b]) && !g.related(nodes[a], nodes[b])) inval_[a] |= bit(b);
      }
    }
    for (std::size_t p = 0; p < m; ++p) {
      Parent par{p, 0};
      for (std::size_t c = 0; c < m; ++c)
        if (c != p && g.node(nodes[c]).retained.is_strict_subset_of(g.node(nodes[p]).retained)) par.children |= bit(c);
      if (par.children) {
        parents_.push_back(par);
        related_ |= bit(p) | par.children;
      }
    }
  }

  Path solve() {
    int best = 0;
    int best_s = -1;
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
      const int v = reward_[s] + f(s, bit(s), related_ & bit(s));
      if (v > best) {
        best = v;
        best_s = static_cast<int>(s);
      }
    }
    Path p;
    p.reward = best;
    auto s = static_cast<std::size_t>(best_s);
    std::uint64_t inv = bit(s);
    std::uint64_t vis = related_ & bit(s);
    p.nodes.push_back(nodes_[s]);
    while (true) {
      const int next = memo_.at(key(s, inv, vis)).second;
      if (next < 0) break;
      const auto n = static_cast<std::size_t>(next);
      inv |= bit(n) | inval_[s];
      vis |= related_ & bit(n);
      s = n;
      p.nodes.push_back(nodes_[s]);
    }
    return p;
  }

 private:
  struct Parent {
    std::size_t node;
    std::uint64_t children;
  };

  static std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }
  static std::uint64_t key(std::size_t s, std::uint64_t inv, std::uint64_t vis) {
    return (static_cast<std::uint64_t>(s) << 40) | (inv << 20) | vis;
  }

  int bonus(std::uint64_t vis) const {
    int total = 0;
    for (const auto& par : parents_) {
      if (vis & bit(par.node)) continue;
      const std::uint64_t on = vis & par.children;
      if (!on) continue;
      ChannelSet cover(g_.channel_space());
      for (std::size_t c = 0; c < nodes_.size(); ++c)
        if (on & bit(c)) cover |= g_.node(nodes_[c]).retained;
      if (g_.node(nodes_[par.node]).retained.is_subset_of(cover)) total += reward_[par.node];
    }
    return total;
  }

  int f(std::size_t s, std::uint64_t inv, std::uint64_t vis) {
    const auto k = key(s, inv, vis);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second.first;
    int best = bonus(vis);
    int next = -1;
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
      if (inv & bit(n)) continue;
      const int v = reward_[n] + edge_[s][n] + f(n, inv | bit(n) | inval_[s], vis | (related_ & bit(n)));
      if (v > best) {
        best = v;
        next = static_cast<int>(n);
      }
    }
    memo_.emplace(k, std::make_pair(best, next));
    return best;
  }

  const ReorderGraph& g_;
  const std::vector<int>& nodes_;
  std::vector<int> reward_;
  std::vector<std::vector<int>> edge_;
  std::vector<std::uint64_t> inval_;
  std::vector<Parent> parents_;
  std::uint64_t related_ = 0;
  std::unordered_map<std::uint64_t, std::pair<int, int>> memo_;
};

// Best-neighbor extension from the highest-reward node.
std::vector<int> greedy_path(const ReorderGraph& g, const std::vector<int>& nodes) {
  int s = nodes.front();
  for (int n : nodes)
    if (g.node(n).reward > g.node(s).reward) s = n;
  std::vector<int> path{s};
  std::vector<bool> invalid(static_cast<std::size_t>(g.size()), false);
  invalid[static_cast<std::size_t>(s)] = true;
  while (true) {
    int best = 0;
    int pick = -1;
    for (int n : nodes) {
      if (invalid[static_cast<std::size_t>(n)]) continue;
      const int gain = g.node(n).reward + g.edge_reward(s, n);
      if (gain > best) {
        best = gain;
        pick = n;
      }
    }
    if (pick < 0) break;
    for (int a : g.neighbors(s))
      if (!g.related(s, a)) invalid[static_cast<std::size_t>(a)] = true;
    invalid[static_cast<std::size_t>(pick)] = true;
    path.push_back(pick);
    s = pick;
  }
  return path;
}

}  // namespace

std::vector<int> covered_parents(const ReorderGraph& graph, const std::vector<int>& nodes,
                                 const std::vector<bool>& active) {
  check_nodes(graph, nodes);
  const auto act = all_active(graph, active);
  std::vector<bool> on(static_cast<std::size_t>(graph.size()), false);
  for (int n : nodes) on[static_cast<std::size_t>(n)] = true;
  std::vector<int> out;
  for (const auto& rel : graph.subsets()) {
    const auto p = static_cast<std::size_t>(rel.parent);
    if (on[p] || !act[p]) continue;
    ChannelSet cover(graph.channel_space());
    bool any = false;
    for (int c : rel.children) {
      if (on[static_cast<std::size_t>(c)]) {
        cover |= graph.node(c).retained;
        any = true;
      }
    }
    if (any && graph.node(rel.parent).retained.is_subset_of(cover)) out.push_back(rel.parent);
  }
  return out;
}

int path_reward(const ReorderGraph& graph, const std::vector<int>& nodes) { return path_reward(graph, nodes, {}); }

int path_reward(const ReorderGraph& graph, const std::vector<int>& nodes, const std::vector<bool>& active) {
  check_nodes(graph, nodes);
  int r = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    r += graph.node(nodes[i]).reward;
    if (i) r += graph.edge_reward(nodes[i - 1], nodes[i]);
  }
  for (int p : covered_parents(graph, nodes, active)) r += graph.node(p).reward;
  return r;
}

bool is_acyclic_path(const ReorderGraph& graph, const std::vector<int>& nodes) {
  check_nodes(graph, nodes);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[i] == nodes[j]) return false;
      if (j == i + 1) continue;
      if (graph.adjacent(nodes[i], nodes[j]) && !graph.related(nodes[i], nodes[j])) return false;
    }
  }
  return true;
}

Path solve_mrap(const ReorderGraph& graph, const std::vector<bool>& active, const MrapOptions& options) {
  const auto act = all_active(graph, active);
  Path out;
  // Jumps between components can separate neighbours, so a small graph is
  // solved as a whole rather than per component.
  std::vector<int> all;
  for (int n = 0; n < graph.size(); ++n)
    if (act[static_cast<std::size_t>(n)]) all.push_back(n);
  if (!all.empty() && static_cast<int>(all.size()) <= options.exact_node_limit) {
    out.nodes = ComponentSolver(graph, all).solve().nodes;
    out.reward = path_reward(graph, out.nodes, act);
    out.covered = covered_parents(graph, out.nodes, act);
    return out;
  }
  for (const auto& comp : components(graph, act)) {
    std::vector<int> nodes;
    if (static_cast<int>(comp.size()) > options.exact_node_limit) {
      std::cerr << "warning: reorder graph component of " << comp.size() << " nodes exceeds the exact limit of "
                << options.exact_node_limit << "; using greedy paths\n";
      nodes = greedy_path(graph, comp);
    } else {
      nodes = ComponentSolver(graph, comp).solve().nodes;
    }
    out.nodes.insert(out.nodes.end(), nodes.begin(), nodes.end());
  }
  out.reward = path_reward(graph, out.nodes, act);
  out.covered = covered_parents(graph, out.nodes, act);
  return out;
}

namespace {

void enumerate(const ReorderGraph& g, std::vector<int>& path, std::vector<bool>& used, Path& best) {
  if (!path.empty()) {
    const int r = path_reward(g, path);
    if (best.nodes.empty() || r > best.reward) {
      best.nodes = path;
      best.reward = r;
    }
  }
  for (int n = 0; n < g.size(); ++n) {
    if (used[static_cast<std::size_t>(n)]) continue;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < path.size() && ok; ++i)
      if (g.adjacent(path[i], n) && !g.related(path[i], n)) ok = false;
    if (!ok) continue;
    used[static_cast<std::size_t>(n)] = true;
    path.push_back(n);
    enumerate(g, path, used, best);
    path.pop_back();
    used[static_cast<std::size_t>(n)] = false;
  }
}

}  // namespace

Path brute_force_mrap(const ReorderGraph& graph) {
  if (graph.size() > 10) throw Error("brute_force_mrap supports at most 10 nodes");
  Path best;
  std::vector<int> path;
  std::vector<bool> used(static_cast<std::size_t>(graph.size()), false);
  enumerate(graph, path, used, best);
  best.covered = covered_parents(graph, best.nodes, {});
  return best;
}

std::vector<Path> decompose_paths(const ReorderGraph& graph, const MrapOptions& options) {
  std::vector<bool> active(static_cast<std::size_t>(graph.size()), true);
  std::vector<Path> out;
  while (std::find(active.begin(), active.end(), true) != active.end()) {
    Path p = solve_mrap(graph, active, options);
    for (int n : p.nodes) active[static_cast<std::size_t>(n)] = false;
    for (int n : p.covered) active[static_cast<std::size_t>(n)] = false;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace slicepack
