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

#include <algorithm>
#include <numeric>
#include <set>

#include "layout.hpp"
#include "slicepack/error.hpp"
#include "slicepack/export_planner.hpp"
#include "slicepack/model_io.hpp"

namespace slicepack {

namespace {

// Edits a graph copy while keeping the incoming-edge order of every layer.
class Rewriter {
 public:
  explicit Rewriter(ModelGraph& g) : g_(g) {
    for (const auto& l : g.layers) ids_.insert(l.id);
  }

  Layer& layer(const LayerId& id) {
    Layer* l = g_.find(id);
    if (!l) throw PlanError("plan references unknown layer " + id);
    return *l;
  }

  LayerId fresh(const LayerId& base) {
    LayerId id = base;
    for (int k = 2; ids_.count(id); ++k) id = base + "~" + std::to_string(k);
    ids_.insert(id);
    return id;
  }

  // Inserts `l` just before layer `before` in declaration order.
  void insert(Layer l, const LayerId& before) {
    auto it = std::find_if(g_.layers.begin(), g_.layers.end(), [&](const Layer& x) { return x.id == before; });
    g_.layers.insert(it, std::move(l));
  }

  // Indices into edges of the incoming edges of `dst`, in order.
  std::vector<std::size_t> incoming(const LayerId& dst) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < g_.edges.size(); ++e)
      if (g_.edges[e].dst == dst) out.push_back(e);
    return out;
  }

  // src -> dst becomes src -> mid -> dst, with mid taking the old edge slot.
  void interpose(std::size_t edge, const LayerId& mid) {
    const LayerId src = g_.edges[edge].src;
    g_.edges[edge].src = mid;
    g_.edges.push_back({src, mid});
  }

  void remove_incoming(const LayerId& dst) {
    std::erase_if(g_.edges, [&](const Edge& e) { return e.dst == dst; });
  }

  void connect(const LayerId& src, const LayerId& dst) { g_.edges.push_back({src, dst}); }

 private:
  ModelGraph& g_;
  std::set<LayerId> ids_;
};

Layer selection_layer(const LayerId& id, int in_width, const std::vector<int>& positions) {
  Layer l;
  l.id = id;
  l.in_channels = in_width;
  l.out_channels = static_cast<int>(positions.size());
  if (detail::consecutive(positions)) {
    l.kind = LayerKind::kSlice;
    l.offset = positions.front();
  } else {
    l.kind = LayerKind::kGather;
    l.indices = positions;
  }
  return l;
}

void check_indices(const std::vector<int>& idx, int bound, bool distinct, const std::string& what) {
  std::set<int> seen;
  for (int k : idx) {
    if (k < 0 || k >= bound) throw PlanError(what + ": index " + std::to_string(k) + " out of range");
    if (distinct && !seen.insert(k).second) throw PlanError(what + ": index " + std::to_string(k) + " repeats");
  }
}

Tensor& weight(WeightStore& w, const LayerId& id) {
  auto it = w.find(id);
  if (it == w.end()) throw PlanError("no weights for " + id);
  return it->second;
}

void select_rows(Tensor& t, const std::vector<int>& rows) {
  Tensor r;
  r.shape = {rows.size(), t.cols()};
  for (int k : rows)
    for (std::size_t c = 0; c < t.cols(); ++c) r.data.push_back(t.at(static_cast<std::size_t>(k), c));
  t = std::move(r);
}

void select_cols(Tensor& t, const std::vector<int>& cols) {
  Tensor r;
  r.shape = {t.rows(), cols.size()};
  for (std::size_t row = 0; row < t.rows(); ++row)
    for (int k : cols) r.data.push_back(t.at(row, static_cast<std::size_t>(k)));
  t = std::move(r);
}

void select_vector(Tensor& t, const std::vector<int>& src) {
  Tensor r;
  r.shape = {src.size()};
  for (int k : src) r.data.push_back(t.data[static_cast<std::size_t>(k)]);
  t = std::move(r);
}

// Consumer side: optional Slice/Gather in front of the consumer, then column
// selection of its weights. `cols[k]` is the original column read at position k.
void rewire_consumer(Rewriter& rw, WeightStore& w, const LayerId& c, int width, const ConsumerAccess& acc,
                     const std::vector<int>& cols) {
  std::vector<int> positions;
  if (acc.mode == ConsumerAccess::Mode::kSlice) {
    positions.resize(static_cast<std::size_t>(acc.length));
    std::iota(positions.begin(), positions.end(), acc.start);
  } else {
    positions = acc.indices;
  }
  const bool whole = acc.mode == ConsumerAccess::Mode::kSlice && acc.start == 0 && acc.length == width;
  if (!whole) {
    const auto suffix = acc.mode == ConsumerAccess::Mode::kSlice ? "/slice" : "/gather";
    const LayerId mid = rw.fresh(c + suffix);
    auto in = rw.incoming(c);
    if (in.size() != 1) throw PlanError("consumer " + c + " must have one input");
    rw.interpose(in.front(), mid);
    rw.insert(selection_layer(mid, width, positions), c);
  }
  rw.layer(c).in_channels = static_cast<int>(positions.size());
  select_cols(weight(w, c), cols);
}

void apply_fallback(Rewriter& rw, WeightStore& w, const ModelGraph& graph, const Segment& seg,
                    const ExportPlan& sp) {
  for (const auto& p : seg.producers) {
    const auto& src = sp.producer_perms.at(p).source;
    std::vector<int> id(static_cast<std::size_t>(graph.find(p)->out_channels));
    std::iota(id.begin(), id.end(), 0);
    if (src != id) throw PlanError("fallback plan for segment " + std::to_string(seg.id) + " permutes " + p);
  }
  for (const auto& c : seg.consumers) {
    auto it = sp.access.find(c);
    if (it == sp.access.end()) throw PlanError("plan has no access record for " + c);
    const auto& acc = it->second;
    const int width = graph.find(c)->in_channels;
    std::vector<int> cols;
    if (acc.mode == ConsumerAccess::Mode::kSlice) {
      if (acc.start < 0 || acc.length < 1 || acc.start + acc.length > width ||
          static_cast<int>(acc.perm.size()) != acc.length)
        throw PlanError("bad slice for " + c);
      check_indices(acc.perm, width, true, "slice perm of " + c);
      cols = acc.perm;
    } else {
      check_indices(acc.indices, width, true, "gather of " + c);
      cols = acc.indices;
    }
    rewire_consumer(rw, w, c, width, acc, cols);
  }
}

void apply_segment(Rewriter& rw, WeightStore& w, const ModelGraph& graph, const Segment& seg,
                   const ExportPlan& sp) {
  SegmentAnalysis a;
  try {
    a = analyze_segment(graph, seg);
  } catch (const UnsupportedTopology& e) {
    throw PlanError(std::string("plan needs a fallback segment: ") + e.what());
  }
  // Producer layouts.
  std::map<LayerId, std::vector<int>> producer_layout;
  for (const auto& p : seg.producers) {
    auto it = sp.producer_perms.find(p);
    if (it == sp.producer_perms.end()) throw PlanError("plan has no permutation for producer " + p);
    const auto& cls = a.output_classes(p);
    const auto& src = it->second.source;
    check_indices(src, static_cast<int>(cls.size()), true, "producer " + p);
    if (src.empty()) throw PlanError("producer " + p + " keeps no filters");
    auto& layout = producer_layout[p];
    for (int k : src) layout.push_back(cls[static_cast<std::size_t>(k)]);
    if (a.layers.at(p).kind == LayerKind::kInput) {
      std::vector<int> id(cls.size());
      std::iota(id.begin(), id.end(), 0);
      if (src != id) throw PlanError("plan permutes input " + p);
      continue;
    }
    select_rows(weight(w, p), src);
    rw.layer(p).out_channels = static_cast<int>(src.size());
  }
  check_indices(sp.order, a.trace.channel_space, true, "order of segment " + std::to_string(seg.id));

  detail::Layouts lay;
  try {
    lay = detail::realize(a, producer_layout, sp.order, sp.reorder);
  } catch (const Error& e) {
    throw PlanError(e.what());
  }
  auto width_of = [&](const LayerId& id) { return static_cast<int>(lay.tensor.at(id).size()); };

  for (const auto& id : seg.interior) {
    const Layer orig = *graph.find(id);
    const auto& ins = a.inputs.at(id);
    const int width = width_of(id);
    switch (orig.kind) {
      case LayerKind::kPassThrough:
      case LayerKind::kConcat:
        rw.layer(id).in_channels = rw.layer(id).out_channels = width;
        break;
      case LayerKind::kPerChannel: {
        auto it = sp.per_channel.find(id);
        if (it == sp.per_channel.end()) throw PlanError("plan has no permutation for " + id);
        const auto& src = it->second;
        const auto& orig_cls = a.trace.tensor_classes.at(id);
        check_indices(src, static_cast<int>(orig_cls.size()), true, "per-channel " + id);
        if (static_cast<int>(src.size()) != width) throw PlanError("per-channel " + id + " has the wrong length");
        select_vector(weight(w, id), src);
        rw.layer(id).in_channels = rw.layer(id).out_channels = width;
        break;
      }
      case LayerKind::kSlice:
      case LayerKind::kGather: {
        const auto& sel = lay.selections.at(id);
        Layer l = selection_layer(id, width_of(ins.front()), sel.positions);
        rw.layer(id) = l;
        break;
      }
      case LayerKind::kAdd: {
        const auto& join = lay.joins.at(id);
        if (join.aligned) {
          rw.layer(id).in_channels = rw.layer(id).out_channels = width;
          break;
        }
        auto term_source = [&](const detail::Term& t, const LayerId& name) -> LayerId {
          const LayerId& src = ins[t.input];
          if (t.whole) return src;
          const LayerId mid = rw.fresh(name);
          rw.insert(selection_layer(mid, width_of(src), t.positions), id);
          rw.connect(src, mid);
          return mid;
        };
        if (join.runs.size() == 1) {
          const auto edges = rw.incoming(id);
          for (const auto& t : join.runs.front().terms) {
            if (t.whole) continue;
            const LayerId mid = rw.fresh(id + ".in" + std::to_string(t.input));
            rw.interpose(edges.at(t.input), mid);
            rw.insert(selection_layer(mid, width_of(ins[t.input]), t.positions), id);
          }
          rw.layer(id).in_channels = rw.layer(id).out_channels = width;
          break;
        }
        rw.remove_incoming(id);
        std::vector<LayerId> parts;
        for (std::size_t r = 0; r < join.runs.size(); ++r) {
          const auto& run = join.runs[r];
          const auto base = id + ".run" + std::to_string(r);
          if (run.terms.size() == 1) {
            parts.push_back(term_source(run.terms.front(), base));
            continue;
          }
          std::vector<LayerId> terms;
          for (const auto& t : run.terms) terms.push_back(term_source(t, base + ".in" + std::to_string(t.input)));
          Layer sum;
          sum.id = rw.fresh(base);
          sum.kind = LayerKind::kAdd;
          sum.in_channels = sum.out_channels = static_cast<int>(run.classes.size());
          rw.insert(sum, id);
          for (const auto& t : terms) rw.connect(t, sum.id);
          parts.push_back(sum.id);
        }
        Layer& cat = rw.layer(id);
        cat.kind = LayerKind::kConcat;
        cat.in_channels = cat.out_channels = width;
        for (const auto& p : parts) rw.connect(p, id);
        break;
      }
      default:
        throw PlanError("unexpected interior kind at " + id);
    }
  }

  for (const auto& c : seg.consumers) {
    auto it = sp.access.find(c);
    if (it == sp.access.end()) throw PlanError("plan has no access record for " + c);
    const auto& acc = it->second;
    const auto& layout = lay.tensor.at(a.trace.reads.at(c));
    const int width = static_cast<int>(layout.size());
    const int orig_width = a.layers.at(c).in_channels;
    std::vector<int> cols;
    if (acc.mode == ConsumerAccess::Mode::kSlice) {
      if (acc.start < 0 || acc.length < 1 || acc.start + acc.length > width ||
          static_cast<int>(acc.perm.size()) != acc.length)
        throw PlanError("bad slice for " + c);
      check_indices(acc.perm, orig_width, true, "slice perm of " + c);
      cols = acc.perm;
    } else {
      check_indices(acc.indices, width, true, "gather of " + c);
      if (acc.indices.empty()) throw PlanError("empty gather for " + c);
      const auto& orig_cls = a.input_classes(c);
      std::map<int, int> col_of;
      for (std::size_t k = 0; k < orig_cls.size(); ++k) col_of[orig_cls[k]] = static_cast<int>(k);
      for (int k : acc.indices) cols.push_back(col_of.at(layout[static_cast<std::size_t>(k)]));
    }
    rewire_consumer(rw, w, c, width, acc, cols);
  }

  for (const auto& o : seg.outputs) {
    if (lay.tensor.at(a.trace.reads.at(o)) != a.input_classes(o))
      throw PlanError("plan changes the layout read by output " + o);
  }
}

}  // namespace

std::pair<ModelGraph, WeightStore> apply_plan(const ModelPlan& plan, const ModelGraph& graph,
                                              const WeightStore& weights) {
  const auto segments = find_segments(graph);
  ModelGraph out = graph;
  WeightStore w = weights;
  Rewriter rw(out);
  std::set<int> seen;
  for (const auto& sp : plan.segments) {
    if (sp.segment < 0 || sp.segment >= static_cast<int>(segments.size()))
      throw PlanError("plan names unknown segment " + std::to_string(sp.segment));
    if (!seen.insert(sp.segment).second) throw PlanError("plan lists segment " + std::to_string(sp.segment) + " twice");
    const auto& seg = segments[static_cast<std::size_t>(sp.segment)];
    if (sp.producers != seg.producers || sp.consumers != seg.consumers)
      throw PlanError("plan segment " + std::to_string(sp.segment) + " does not match the graph");
    if (sp.fallback)
      apply_fallback(rw, w, graph, seg, sp);
    else
      apply_segment(rw, w, graph, seg, sp);
  }
  auto diags = validate(out, w);
  if (!diags.empty()) throw PlanError("rewritten model is invalid: " + format_diagnostics(diags));
  return {std::move(out), std::move(w)};
}

}  // namespace slicepack
