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

#include "layout.hpp"

#include <algorithm>

#include "slicepack/error.hpp"

namespace slicepack::detail {

bool consecutive(const std::vector<int>& positions) {
  for (std::size_t k = 1; k < positions.size(); ++k)
    if (positions[k] != positions[k - 1] + 1) return false;
  return true;
}

namespace {

std::map<int, int> index_of(const std::vector<int>& layout) {
  std::map<int, int> pos;
  for (std::size_t k = 0; k < layout.size(); ++k) pos[layout[k]] = static_cast<int>(k);
  return pos;
}

}  // namespace

Layouts realize(const SegmentAnalysis& analysis,
                const std::map<LayerId, std::vector<int>>& producer_layout, const std::vector<int>& order,
                bool reorder) {
  Layouts out;
  for (const auto& p : analysis.segment.producers) {
    auto it = producer_layout.find(p);
    if (it == producer_layout.end()) throw Error("no layout for producer " + p);
    if (it->second.empty()) throw Error("producer " + p + " would keep no channels");
    out.tensor[p] = it->second;
    out.upstream[p] = {p};
  }
  std::map<int, int> order_pos;
  for (std::size_t k = 0; k < order.size(); ++k) order_pos[order[k]] = static_cast<int>(k);

  for (const auto& id : analysis.segment.interior) {
    const Layer& l = analysis.layers.at(id);
    std::vector<const std::vector<int>*> in;
    std::set<LayerId> up;
    for (const auto& pid : analysis.inputs.at(id)) {
      in.push_back(&out.tensor.at(pid));
      up.insert(out.upstream.at(pid).begin(), out.upstream.at(pid).end());
    }
    out.upstream[id] = std::move(up);
    std::vector<int> layout;
    switch (l.kind) {
      case LayerKind::kPassThrough:
      case LayerKind::kPerChannel:
        layout = *in[0];
        break;
      case LayerKind::kConcat:
        for (auto* v : in) layout.insert(layout.end(), v->begin(), v->end());
        break;
      case LayerKind::kSlice:
      case LayerKind::kGather: {
        const auto pos = index_of(*in[0]);
        Selection sel;
        for (int c : analysis.trace.tensor_classes.at(id)) {
          auto it = pos.find(c);
          if (it != pos.end()) sel.positions.push_back(it->second);
        }
        if (reorder) std::sort(sel.positions.begin(), sel.positions.end());
        sel.contiguous = consecutive(sel.positions);
        for (int k : sel.positions) layout.push_back((*in[0])[static_cast<std::size_t>(k)]);
        out.selections[id] = std::move(sel);
        break;
      }
      case LayerKind::kAdd: {
        Join join;
        join.aligned = std::all_of(in.begin(), in.end(), [&](auto* v) { return *v == *in[0]; });
        if (join.aligned) {
          layout = *in[0];
        } else {
          std::set<int> uni;
          for (auto* v : in) uni.insert(v->begin(), v->end());
          for (int c : uni)
            if (!order_pos.count(c)) throw Error("join " + id + " receives a class missing from the order");
          for (int c : order)
            if (uni.count(c)) layout.push_back(c);
          std::vector<std::map<int, int>> pos;
          for (auto* v : in) pos.push_back(index_of(*v));
          std::vector<bool> prev;
          for (int c : layout) {
            std::vector<bool> members;
            for (auto& p : pos) members.push_back(p.count(c) > 0);
            if (join.runs.empty() || members != prev) join.runs.push_back({});
            join.runs.back().classes.push_back(c);
            prev = std::move(members);
          }
          for (auto& run : join.runs) {
            for (std::size_t k = 0; k < in.size(); ++k) {
              if (!pos[k].count(run.classes.front())) continue;
              Term t;
              t.input = k;
              for (int c : run.classes) t.positions.push_back(pos[k].at(c));
              t.contiguous = consecutive(t.positions);
              t.whole = t.contiguous && t.positions.size() == in[k]->size();
              if (!t.contiguous) out.interior_copied += static_cast<int>(t.positions.size());
              run.terms.push_back(std::move(t));
            }
          }
        }
        out.joins[id] = std::move(join);
        break;
      }
      default:
        throw Error("unexpected interior kind at " + id);
    }
    if (layout.empty()) throw Error("tensor " + id + " would keep no channels");
    out.tensor[id] = std::move(layout);
  }
  return out;
}

}  // namespace slicepack::detail
