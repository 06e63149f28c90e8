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

#include "slicepack/export_planner.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "layout.hpp"
#include "slicepack/error.hpp"

namespace slicepack {

CopyStats& CopyStats::operator+=(const CopyStats& o) {
  total_reads += o.total_reads;
  copied += o.copied;
  zero_copy_optimal += o.zero_copy_optimal;
  interior_copied += o.interior_copied;
  slice_reads += o.slice_reads;
  return *this;
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kUpscale: return "upscale";
    case Strategy::kBaseline: return "baseline";
    case Strategy::kConstrained: return "constrained";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "upscale") return Strategy::kUpscale;
  if (name == "baseline") return Strategy::kBaseline;
  if (name == "constrained") return Strategy::kConstrained;
  return std::nullopt;
}

CopyStats copy_report(const std::vector<ExportPlan>& plans) {
  CopyStats total;
  for (const auto& p : plans) total += p.stats;
  return total;
}

namespace {

int space(const SegmentAnalysis& a) { return a.trace.channel_space; }

ExportPlan skeleton(const SegmentAnalysis& a) {
  ExportPlan p;
  p.segment = a.segment.id;
  p.producers = a.segment.producers;
  p.consumers = a.segment.consumers;
  p.channel_space = space(a);
  return p;
}

bool has_per_channel(const SegmentAnalysis& a) {
  return std::any_of(a.segment.interior.begin(), a.segment.interior.end(),
                     [&](const auto& id) { return a.layers.at(id).kind == LayerKind::kPerChannel; });
}

// Adds the smallest class of every tensor that would otherwise be empty.
void keep_alive(const SegmentAnalysis& a, ChannelSet& kept, std::vector<int>& order) {
  auto visit = [&](const LayerId& id) {
    const auto& cls = a.trace.tensor_classes.at(id);
    if (std::any_of(cls.begin(), cls.end(), [&](int c) { return kept.contains(c); })) return;
    const int c = *std::min_element(cls.begin(), cls.end());
    kept.insert(c);
    order.push_back(c);
  };
  for (const auto& p : a.segment.producers) visit(p);
  for (const auto& id : a.segment.interior) visit(id);
}

// Producer rows whose class is kept, ordered by `rank` (position in the order,
// or original row when rank is empty).
ProducerPerm producer_rows(const std::vector<int>& cls, const ChannelSet& kept, const std::vector<int>& rank) {
  ProducerPerm perm;
  for (std::size_t k = 0; k < cls.size(); ++k) {
    if (kept.contains(cls[k]))
      perm.source.push_back(static_cast<int>(k));
    else
      perm.dropped.push_back(static_cast<int>(k));
  }
  if (!rank.empty())
    std::stable_sort(perm.source.begin(), perm.source.end(), [&](int x, int y) {
      return rank[static_cast<std::size_t>(cls[static_cast<std::size_t>(x)])] <
             rank[static_cast<std::size_t>(cls[static_cast<std::size_t>(y)])];
    });
  return perm;
}

std::map<LayerId, std::vector<int>> producer_layouts(const SegmentAnalysis& a, const ExportPlan& plan) {
  std::map<LayerId, std::vector<int>> out;
  for (const auto& p : a.segment.producers) {
    const auto& cls = a.output_classes(p);
    auto& layout = out[p];
    for (int k : plan.producer_perms.at(p).source) layout.push_back(cls[static_cast<std::size_t>(k)]);
  }
  return out;
}

bool strict_input_mask(const SegmentAnalysis& a, const ChannelMask& masks, const LayerId& c) {
  auto it = masks.retained.find(c);
  return it != masks.retained.end() && static_cast<int>(it->second.size()) < a.layers.at(c).in_channels;
}

void fill_per_channel(const SegmentAnalysis& a, const detail::Layouts& lay, ExportPlan& plan) {
  for (const auto& id : a.segment.interior) {
    if (a.layers.at(id).kind != LayerKind::kPerChannel) continue;
    const auto& orig = a.trace.tensor_classes.at(id);
    std::map<int, int> at;
    for (std::size_t k = 0; k < orig.size(); ++k) at[orig[k]] = static_cast<int>(k);
    auto& src = plan.per_channel[id];
    for (int c : lay.tensor.at(id)) src.push_back(at.at(c));
  }
}

// Consumer accesses and statistics for input pruning.
void finish_input(const SegmentAnalysis& a, const ChannelMask& masks, bool force_gather, ExportPlan& plan) {
  const auto lay = detail::realize(a, producer_layouts(a, plan), plan.order, plan.reorder);
  fill_per_channel(a, lay, plan);
  plan.stats.interior_copied = lay.interior_copied;
  for (const auto& c : a.segment.consumers) {
    const auto& layout = lay.tensor.at(a.trace.reads.at(c));
    const auto& cols = a.input_classes(c);
    std::map<int, int> col_of, pos_of;
    for (std::size_t k = 0; k < cols.size(); ++k) col_of[cols[k]] = static_cast<int>(k);
    for (std::size_t k = 0; k < layout.size(); ++k) pos_of[layout[k]] = static_cast<int>(k);
    const auto retained = consumer_retained(a, masks, c);

    // Positions by ascending original column.
    std::vector<int> by_col;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (!retained.contains(cols[k])) continue;
      auto it = pos_of.find(cols[k]);
      if (it == pos_of.end()) throw Error("consumer " + c + " retains a dropped channel");
      by_col.push_back(it->second);
    }
    std::vector<int> sorted = by_col;
    std::sort(sorted.begin(), sorted.end());

    ConsumerAccess acc;
    const bool gather = (force_gather && strict_input_mask(a, masks, c)) || !detail::consecutive(sorted);
    if (gather) {
      acc.mode = ConsumerAccess::Mode::kGather;
      acc.indices = by_col;
      plan.stats.copied += retained.size();
    } else {
      acc.mode = ConsumerAccess::Mode::kSlice;
      acc.start = sorted.front();
      acc.length = static_cast<int>(sorted.size());
      for (int k = 0; k < acc.length; ++k)
        acc.perm.push_back(col_of.at(layout[static_cast<std::size_t>(acc.start + k)]));
      plan.stats.slice_reads += retained.size();
    }
    plan.stats.total_reads += retained.size();
    plan.access[c] = std::move(acc);
  }
}

// Keeps every channel in its original position.
ExportPlan identity_plan(const SegmentAnalysis& a, const ChannelMask& masks, bool force_gather) {
  ExportPlan plan = skeleton(a);
  plan.order.resize(static_cast<std::size_t>(space(a)));
  std::iota(plan.order.begin(), plan.order.end(), 0);
  const auto all = ChannelSet::full(space(a));
  for (const auto& p : a.segment.producers) plan.producer_perms[p] = producer_rows(a.output_classes(p), all, {});
  finish_input(a, masks, force_gather, plan);
  return plan;
}

}  // namespace

bool masks_constrained(const SegmentAnalysis& a, const ChannelMask& masks) {
  std::vector<int> state(static_cast<std::size_t>(space(a)), -1);
  for (const auto& c : a.segment.consumers) {
    const auto retained = consumer_retained(a, masks, c);
    for (int cls : a.input_classes(c)) {
      const int r = retained.contains(cls) ? 1 : 0;
      auto& s = state[static_cast<std::size_t>(cls)];
      if (s >= 0 && s != r) return false;
      s = r;
    }
  }
  return true;
}

ExportPlan plan_export(const SegmentAnalysis& a, const ChannelOrder& order, const ChannelMask& masks) {
  if (a.segment.pinned()) return identity_plan(a, masks, false);
  ExportPlan plan = skeleton(a);
  plan.reorder = true;
  plan.order = order.order;
  ChannelSet kept = ChannelSet::from_indices(space(a), plan.order);
  if (kept.size() != static_cast<int>(plan.order.size())) throw Error("channel order repeats a channel");
  keep_alive(a, kept, plan.order);
  for (int c = 0; c < space(a); ++c)
    if (!kept.contains(c)) plan.dropped.push_back(c);
  const auto rank = positions(plan.order, space(a));
  for (const auto& p : a.segment.producers) plan.producer_perms[p] = producer_rows(a.output_classes(p), kept, rank);
  finish_input(a, masks, false, plan);
  return plan;
}

ExportPlan plan_baseline(const SegmentAnalysis& a, const ChannelMask& masks) {
  if (a.segment.pinned() || !masks_constrained(a, masks)) return identity_plan(a, masks, true);
  ExportPlan plan = skeleton(a);
  ChannelSet kept(space(a));
  for (const auto& c : a.segment.consumers) kept |= consumer_retained(a, masks, c);
  plan.order = kept.to_vector();
  keep_alive(a, kept, plan.order);
  for (int c = 0; c < space(a); ++c)
    if (!kept.contains(c)) plan.dropped.push_back(c);
  for (const auto& p : a.segment.producers) plan.producer_perms[p] = producer_rows(a.output_classes(p), kept, {});
  finish_input(a, masks, false, plan);
  return plan;
}

ExportPlan plan_upscale(const SegmentAnalysis& a, const ChannelMask& masks, const MrapOptions& options,
                        bool exact_layout) {
  const auto rg = build_reorder_graph(a, masks);
  const auto paths = decompose_paths(rg, options);
  auto plan = plan_export(a, order_channels(paths, rg, space(a)), masks);
  // Paths can miss an ordering that a small segment admits; try them all.
  if (exact_layout && plan.stats.copied > 0 && !plan.fallback && plan.reorder && rg.size() <= kExactLayoutNodes &&
      static_cast<int>(plan.order.size()) <= kExactLayoutChannels) {
    std::vector<int> perm = plan.order;
    std::sort(perm.begin(), perm.end());
    do {
      auto trial = plan_export(a, ChannelOrder{perm, {}}, masks);
      if (trial.stats.copied < plan.stats.copied) plan = std::move(trial);
    } while (plan.stats.copied > 0 && std::next_permutation(perm.begin(), perm.end()));
  }
  auto base = plan_baseline(a, masks);
  if (base.stats.copied < plan.stats.copied) return base;
  return plan;
}

namespace {

ChannelSet producer_retained(const SegmentAnalysis& a, const ChannelMask& masks, const LayerId& p) {
  const auto& cls = a.output_classes(p);
  ChannelSet s(space(a));
  auto it = masks.retained.find(p);
  if (it == masks.retained.end()) {
    for (int c : cls) s.insert(c);
    return s;
  }
  for (int k : it->second) {
    if (k < 0 || k >= static_cast<int>(cls.size()))
      throw ValidationError("mask for " + p + ": index " + std::to_string(k) + " out of range");
    s.insert(cls[static_cast<std::size_t>(k)]);
  }
  if (s.empty()) throw ValidationError("mask for " + p + " retains nothing");
  return s;
}

bool is_block_of(const std::vector<int>& part, const std::vector<int>& whole) {
  auto it = std::search(whole.begin(), whole.end(), part.begin(), part.end());
  return it != whole.end();
}

}  // namespace

ExportPlan plan_export_output(const SegmentAnalysis& a, const ChannelMask& masks, bool reorder,
                              const MrapOptions& options) {
  std::vector<std::pair<LayerId, ChannelSet>> kept_by;
  bool strict = false;
  for (const auto& p : a.segment.producers) {
    auto r = producer_retained(a, masks, p);
    if (r.size() < a.layers.at(p).out_channels) strict = true;
    kept_by.emplace_back(p, std::move(r));
  }
  if (strict && a.segment.pinned())
    throw OutputPruningHazard(a.segment.id, "output pruning would change a model input or output");
  if (strict && has_per_channel(a))
    throw OutputPruningHazard(a.segment.id, "a per-channel offset sits between a pruned producer and its readers");

  ExportPlan plan = skeleton(a);
  plan.reorder = reorder && !a.segment.pinned();
  ChannelSet kept(space(a));
  for (const auto& [p, r] : kept_by) kept |= r;
  if (plan.reorder) {
    const auto rg = build_reorder_graph(space(a), kept_by);
    plan.order = order_channels(decompose_paths(rg, options), rg, space(a)).order;
  } else {
    plan.order = kept.to_vector();
  }
  for (int c = 0; c < space(a); ++c)
    if (!kept.contains(c)) plan.dropped.push_back(c);
  const auto rank = positions(plan.order, space(a));
  for (const auto& [p, r] : kept_by)
    plan.producer_perms[p] = producer_rows(a.output_classes(p), r, plan.reorder ? rank : std::vector<int>{});

  detail::Layouts lay;
  try {
    lay = detail::realize(a, producer_layouts(a, plan), plan.order, plan.reorder);
  } catch (const Error& e) {
    throw UnsupportedTopology(a.segment.id, e.what());
  }
  fill_per_channel(a, lay, plan);
  plan.stats.interior_copied = lay.interior_copied;
  for (const auto& c : a.segment.consumers) {
    const auto& layout = lay.tensor.at(a.trace.reads.at(c));
    const auto& cols = a.input_classes(c);
    std::map<int, int> col_of;
    for (std::size_t k = 0; k < cols.size(); ++k) col_of[cols[k]] = static_cast<int>(k);
    ConsumerAccess acc;
    acc.length = static_cast<int>(layout.size());
    for (int cls : layout) acc.perm.push_back(col_of.at(cls));
    plan.access[c] = std::move(acc);
  }
  for (const auto& [p, r] : kept_by) plan.stats.total_reads += r.size();
  plan.stats.slice_reads = plan.stats.total_reads;

  // A join input that is not one contiguous block of the join target has to
  // be scattered into it.
  for (const auto& [id, join] : lay.joins) {
    const auto& target = lay.tensor.at(id);
    const std::set<int> target_set(target.begin(), target.end());
    std::vector<const std::vector<int>*> ins;
    for (const auto& pid : a.inputs.at(id)) ins.push_back(&lay.tensor.at(pid));
    if (plan.reorder) {
      for (auto* v : ins)
        if (!is_block_of(*v, target)) plan.stats.copied += static_cast<int>(v->size());
    } else {
      for (auto* v : ins)
        if (std::set<int>(v->begin(), v->end()) != target_set) plan.stats.copied += static_cast<int>(v->size());
    }
  }
  plan.stats.slice_reads -= std::min(plan.stats.copied, plan.stats.slice_reads);

  if (plan.reorder) {
    auto base = plan_export_output(a, masks, false, options);
    if (base.stats.copied < plan.stats.copied) return base;
  }
  return plan;
}

ExportPlan plan_fallback(const ModelGraph& graph, const Segment& segment, const ChannelMask& masks) {
  ExportPlan plan;
  plan.segment = segment.id;
  plan.producers = segment.producers;
  plan.consumers = segment.consumers;
  plan.channel_space = segment.channel_space;
  plan.fallback = true;
  for (const auto& p : segment.producers) {
    auto& perm = plan.producer_perms[p];
    perm.source.resize(static_cast<std::size_t>(graph.find(p)->out_channels));
    std::iota(perm.source.begin(), perm.source.end(), 0);
  }
  for (const auto& c : segment.consumers) {
    const int width = graph.find(c)->in_channels;
    ConsumerAccess acc;
    auto it = masks.target == MaskTarget::kInput ? masks.retained.find(c) : masks.retained.end();
    if (it == masks.retained.end() || static_cast<int>(it->second.size()) == width) {
      acc.length = width;
      acc.perm.resize(static_cast<std::size_t>(width));
      std::iota(acc.perm.begin(), acc.perm.end(), 0);
      plan.stats.slice_reads += width;
    } else {
      acc.mode = ConsumerAccess::Mode::kGather;
      acc.indices = it->second;
      plan.stats.copied += static_cast<int>(acc.indices.size());
    }
    plan.stats.total_reads += acc.reads();
    plan.access[c] = std::move(acc);
  }
  return plan;
}

ChannelMask constrain_masks(const ModelGraph& graph, const ChannelMask& masks) {
  ChannelMask out;
  out.target = masks.target;
  for (const auto& seg : find_segments(graph)) {
    const auto& members = masks.target == MaskTarget::kInput ? seg.consumers : seg.producers;
    SegmentAnalysis a;
    try {
      a = analyze_segment(graph, seg);
    } catch (const UnsupportedTopology&) {
      for (const auto& m : members)
        if (auto it = masks.retained.find(m); it != masks.retained.end()) out.retained.insert(*it);
      continue;
    }
    // Channels of pinned segments cannot be dropped, so a shared mask there
    // keeps everything; output masks also cannot cross a per-channel offset.
    if (seg.pinned() || (masks.target == MaskTarget::kOutput && has_per_channel(a))) continue;
    ChannelSet uni(space(a));
    for (const auto& m : members)
      uni |= masks.target == MaskTarget::kInput ? consumer_retained(a, masks, m) : producer_retained(a, masks, m);
    for (const auto& m : members) {
      const auto& cls = masks.target == MaskTarget::kInput ? a.input_classes(m) : a.output_classes(m);
      std::vector<int> keep;
      for (std::size_t k = 0; k < cls.size(); ++k)
        if (uni.contains(cls[k])) keep.push_back(static_cast<int>(k));
      if (keep.size() < cls.size()) out.retained[m] = std::move(keep);
    }
  }
  return out;
}

}  // namespace slicepack
