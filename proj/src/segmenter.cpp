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

#include "slicepack/segmenter.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "slicepack/error.hpp"

namespace slicepack {

namespace {

bool is_producer_kind(LayerKind k) { return k == LayerKind::kChannelMix || k == LayerKind::kInput; }

struct Reach {
  std::set<std::size_t> consumers;
  std::set<std::size_t> outputs;
  std::set<std::size_t> interior;
  std::set<std::size_t> producers;
};

Reach walk_forward(const GraphIndex& g, const std::set<std::size_t>& producers) {
  Reach r;
  std::deque<std::size_t> work(producers.begin(), producers.end());
  std::set<std::size_t> visited;
  while (!work.empty()) {
    auto i = work.front();
    work.pop_front();
    for (auto s : g.succs(i)) {
      const auto kind = g.layer(s).kind;
      if (kind == LayerKind::kChannelMix) {
        r.consumers.insert(s);
      } else if (kind == LayerKind::kOutput) {
        r.outputs.insert(s);
      } else if (is_interior_kind(kind) && visited.insert(s).second) {
        r.interior.insert(s);
        work.push_back(s);
      }
    }
  }
  return r;
}

Reach walk_backward(const GraphIndex& g, const std::set<std::size_t>& sinks) {
  Reach r;
  std::deque<std::size_t> work(sinks.begin(), sinks.end());
  std::set<std::size_t> visited;
  while (!work.empty()) {
    auto i = work.front();
    work.pop_front();
    for (auto p : g.preds(i)) {
      const auto kind = g.layer(p).kind;
      if (is_producer_kind(kind)) {
        r.producers.insert(p);
      } else if (is_interior_kind(kind) && visited.insert(p).second) {
        r.interior.insert(p);
        work.push_back(p);
      }
    }
  }
  return r;
}

std::vector<LayerId> ids_in_topo_order(const GraphIndex& g, const std::set<std::size_t>& nodes) {
  std::vector<std::size_t> v(nodes.begin(), nodes.end());
  std::sort(v.begin(), v.end(), [&](auto a, auto b) { return g.topo_rank(a) < g.topo_rank(b); });
  std::vector<LayerId> out;
  out.reserve(v.size());
  for (auto i : v) out.push_back(g.layer(i).id);
  return out;
}

std::set<LayerId> to_ids(const GraphIndex& g, const std::set<std::size_t>& nodes) {
  std::set<LayerId> out;
  for (auto i : nodes) out.insert(g.layer(i).id);
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

std::set<LayerId> consumers_of(const ModelGraph& graph, const std::set<LayerId>& producers) {
  GraphIndex g(graph);
  std::set<std::size_t> start;
  for (const auto& id : producers) {
    auto i = g.at(id);
    if (!is_producer_kind(g.layer(i).kind)) throw Error(id + " is not a producer (channel_mix or input)");
    start.insert(i);
  }
  return to_ids(g, walk_forward(g, start).consumers);
}

std::set<LayerId> producers_of(const ModelGraph& graph, const std::set<LayerId>& consumers) {
  GraphIndex g(graph);
  std::set<std::size_t> start;
  for (const auto& id : consumers) {
    auto i = g.at(id);
    const auto kind = g.layer(i).kind;
    if (kind != LayerKind::kChannelMix && kind != LayerKind::kOutput)
      throw Error(id + " is not a consumer (channel_mix or output)");
    start.insert(i);
  }
  return to_ids(g, walk_backward(g, start).producers);
}

std::vector<Segment> find_segments(const ModelGraph& graph) {
  GraphIndex g(graph);
  std::vector<bool> assigned(g.size(), false);
  std::vector<Segment> segments;
  for (auto i : g.topo_order()) {
    if (assigned[i] || !is_producer_kind(g.layer(i).kind)) continue;
    std::set<std::size_t> producers{i};
    Reach fwd;
    std::size_t last = 0;
    while (true) {
      fwd = walk_forward(g, producers);
      std::set<std::size_t> sinks = fwd.consumers;
      sinks.insert(fwd.outputs.begin(), fwd.outputs.end());
      auto back = walk_backward(g, sinks);
      back.producers.insert(producers.begin(), producers.end());
      producers = std::move(back.producers);
      const auto size = producers.size() + fwd.consumers.size() + fwd.outputs.size();
      if (size == last) break;
      last = size;
    }
    Segment s;
    s.id = static_cast<int>(segments.size());
    s.producers = ids_in_topo_order(g, producers);
    s.consumers = ids_in_topo_order(g, fwd.consumers);
    s.interior = ids_in_topo_order(g, fwd.interior);
    s.outputs = ids_in_topo_order(g, fwd.outputs);
    for (auto p : producers) {
      assigned[p] = true;
      if (g.layer(p).kind == LayerKind::kInput) s.has_input_producer = true;
    }
    s.channel_space = trace_channels(graph, s).channel_space;
    segments.push_back(std::move(s));
  }
  return segments;
}

ChannelTrace trace_channels(const ModelGraph& graph, const Segment& segment) {
  GraphIndex g(graph);
  ChannelTrace trace;

  std::map<LayerId, int> base;
  int atoms = 0;
  for (const auto& p : segment.producers) {
    base[p] = atoms;
    atoms += graph.find(p)->out_channels;
  }
  UnionFind uf(static_cast<std::size_t>(atoms));
  std::map<LayerId, std::vector<int>> atom_of;
  for (const auto& p : segment.producers) {
    std::vector<int> a(static_cast<std::size_t>(graph.find(p)->out_channels));
    std::iota(a.begin(), a.end(), base[p]);
    atom_of[p] = std::move(a);
  }
  for (const auto& id : segment.interior) {
    const auto i = g.at(id);
    const Layer& l = g.layer(i);
    std::vector<const std::vector<int>*> in;
    for (auto p : g.preds(i)) {
      auto it = atom_of.find(g.layer(p).id);
      if (it == atom_of.end()) throw Error("segment interior " + id + " reads from outside the segment");
      in.push_back(&it->second);
    }
    std::vector<int> out;
    switch (l.kind) {
      case LayerKind::kPassThrough:
      case LayerKind::kPerChannel:
        out = *in[0];
        break;
      case LayerKind::kConcat:
        for (auto* v : in) out.insert(out.end(), v->begin(), v->end());
        break;
      case LayerKind::kSlice:
        out.assign(in[0]->begin() + l.offset, in[0]->begin() + l.offset + l.out_channels);
        break;
      case LayerKind::kGather:
        for (int k : l.indices) out.push_back((*in[0])[static_cast<std::size_t>(k)]);
        break;
      case LayerKind::kAdd:
        out = *in[0];
        for (std::size_t k = 0; k < out.size(); ++k)
          for (auto* v : in) uf.unite(out[k], (*v)[k]);
        break;
      default:
        throw Error("unexpected interior kind at " + id);
    }
    atom_of[id] = std::move(out);
  }

  std::vector<int> class_of_root(static_cast<std::size_t>(atoms), -1);
  int next = 0;
  for (const auto& p : segment.producers) {
    for (int a : atom_of[p]) {
      auto r = static_cast<std::size_t>(uf.find(a));
      if (class_of_root[r] < 0) class_of_root[r] = next++;
    }
  }
  trace.channel_space = next;
  for (const auto& [id, a] : atom_of) {
    std::vector<int> cls;
    cls.reserve(a.size());
    for (int x : a) cls.push_back(class_of_root[static_cast<std::size_t>(uf.find(x))]);
    trace.tensor_classes[id] = std::move(cls);
  }

  for (const auto& p : segment.producers) {
    const auto& cls = trace.tensor_classes[p];
    std::map<int, int> first;
    for (std::size_t k = 0; k < cls.size(); ++k) {
      auto [it, fresh] = first.emplace(cls[k], static_cast<int>(k));
      if (!fresh)
        trace.violations.push_back("producer " + p + " channel " + std::to_string(k) + " is mixed with its channel " +
                                   std::to_string(it->second));
    }
  }
  for (const auto& id : segment.interior) {
    const auto& cls = trace.tensor_classes[id];
    std::set<int> seen;
    for (int c : cls) {
      if (!seen.insert(c).second) {
        trace.violations.push_back("layer " + id + " carries channel class " + std::to_string(c) + " twice");
        break;
      }
    }
  }

  std::vector<LayerId> sinks = segment.consumers;
  sinks.insert(sinks.end(), segment.outputs.begin(), segment.outputs.end());
  for (const auto& c : sinks) {
    const auto i = g.at(c);
    trace.reads[c] = g.layer(g.preds(i).at(0)).id;
  }
  return trace;
}

}  // namespace slicepack
