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

#include "slicepack/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>

#include "slicepack/consumer_graph.hpp"
#include "slicepack/error.hpp"
#include "slicepack/segmenter.hpp"

namespace slicepack {

std::string_view to_string(Heuristic h) {
  switch (h) {
    case Heuristic::kL1: return "l1";
    case Heuristic::kL2: return "l2";
    case Heuristic::kLamp: return "lamp";
    case Heuristic::kRandom: return "random";
  }
  return "?";
}

std::optional<Heuristic> parse_heuristic(std::string_view name) {
  if (name == "l1") return Heuristic::kL1;
  if (name == "l2") return Heuristic::kL2;
  if (name == "lamp") return Heuristic::kLamp;
  if (name == "random") return Heuristic::kRandom;
  return std::nullopt;
}

std::vector<double> score_vectors(const std::vector<std::vector<double>>& vectors, Heuristic h) {
  if (h == Heuristic::kRandom) throw Error("random scores have no weight formula");
  std::vector<double> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    double s = 0.0;
    for (double x : v) s += h == Heuristic::kL1 ? std::fabs(x) : x * x;
    out.push_back(h == Heuristic::kL2 ? std::sqrt(s) : s);
  }
  if (h != Heuristic::kLamp) return out;
  // Squared norm over the sum of squared norms ranked at or above it.
  std::vector<std::size_t> rank(out.size());
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(), [&](auto a, auto b) { return out[a] < out[b]; });
  std::vector<double> lamp(out.size(), 0.0);
  double suffix = 0.0;
  for (auto it = rank.rbegin(); it != rank.rend(); ++it) {
    suffix += out[*it];
    lamp[*it] = suffix > 0.0 ? out[*it] / suffix : 0.0;
  }
  return lamp;
}

namespace {

ChannelScores score(const ModelGraph& graph, const WeightStore& weights, Heuristic h, std::uint64_t seed,
                    bool columns) {
  ChannelScores out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (const auto& l : graph.layers) {
    if (l.kind != LayerKind::kChannelMix) continue;
    auto it = weights.find(l.id);
    if (it == weights.end()) throw ValidationError("no weights for " + l.id);
    const Tensor& w = it->second;
    const std::size_t n = columns ? w.cols() : w.rows();
    if (h == Heuristic::kRandom) {
      auto& s = out[l.id];
      for (std::size_t k = 0; k < n; ++k) s.push_back(uniform(rng));
      continue;
    }
    std::vector<std::vector<double>> vecs(n);
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < w.cols(); ++c) vecs[columns ? c : r].push_back(w.at(r, c));
    out[l.id] = score_vectors(vecs, h);
  }
  return out;
}

struct Prunable {
  SegmentAnalysis analysis;
  std::vector<LayerId> members;
};

std::vector<Prunable> prunable_segments(const ModelGraph& graph, MaskTarget target) {
  std::vector<Prunable> out;
  for (const auto& seg : find_segments(graph)) {
    if (seg.pinned()) continue;
    Prunable p;
    try {
      p.analysis = analyze_segment(graph, seg);
    } catch (const UnsupportedTopology&) {
      continue;
    }
    if (target == MaskTarget::kOutput) {
      const bool offset = std::any_of(seg.interior.begin(), seg.interior.end(), [&](const auto& id) {
        return p.analysis.layers.at(id).kind == LayerKind::kPerChannel;
      });
      if (offset) continue;
      p.members = seg.producers;
    } else {
      p.members = seg.consumers;
    }
    if (!p.members.empty()) out.push_back(std::move(p));
  }
  return out;
}

int width(const Prunable& p, const LayerId& m, MaskTarget target) {
  const Layer& l = p.analysis.layers.at(m);
  return target == MaskTarget::kInput ? l.in_channels : l.out_channels;
}

const std::vector<int>& classes(const Prunable& p, const LayerId& m, MaskTarget target) {
  return target == MaskTarget::kInput ? p.analysis.input_classes(m) : p.analysis.output_classes(m);
}

const std::vector<double>& scores_of(const ChannelScores& scores, const LayerId& id, int n) {
  auto it = scores.find(id);
  if (it == scores.end() || static_cast<int>(it->second.size()) != n)
    throw ValidationError("scores do not cover every channel of " + id);
  return it->second;
}

void keep_best(std::vector<bool>& pruned, const std::vector<double>& s) {
  if (std::find(pruned.begin(), pruned.end(), false) != pruned.end()) return;
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.size(); ++k)
    if (s[k] > s[best]) best = k;
  pruned[best] = false;
}

void emit(ChannelMask& mask, const LayerId& id, const std::vector<bool>& pruned) {
  std::vector<int> keep;
  for (std::size_t k = 0; k < pruned.size(); ++k)
    if (!pruned[k]) keep.push_back(static_cast<int>(k));
  if (keep.size() < pruned.size()) mask.retained[id] = std::move(keep);
}

ChannelMask unconstrained(const std::vector<Prunable>& segs, const ChannelScores& scores, const MaskOptions& o) {
  std::map<LayerId, std::vector<bool>> pruned;
  std::vector<std::tuple<double, LayerId, int>> items;
  for (const auto& p : segs) {
    for (const auto& m : p.members) {
      const int n = width(p, m, o.target);
      const auto& s = scores_of(scores, m, n);
      pruned[m].assign(static_cast<std::size_t>(n), false);
      if (o.per_layer) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return s[static_cast<std::size_t>(a)] < s[static_cast<std::size_t>(b)]; });
        const auto k = static_cast<std::size_t>(std::floor(o.sparsity * n));
        for (std::size_t i = 0; i < k; ++i) pruned[m][static_cast<std::size_t>(idx[i])] = true;
      } else {
        for (int k = 0; k < n; ++k) items.emplace_back(s[static_cast<std::size_t>(k)], m, k);
      }
    }
  }
  if (!o.per_layer) {
    std::sort(items.begin(), items.end());
    const auto k = static_cast<std::size_t>(std::floor(o.sparsity * static_cast<double>(items.size())));
    for (std::size_t i = 0; i < k; ++i) pruned[std::get<1>(items[i])][static_cast<std::size_t>(std::get<2>(items[i]))] = true;
  }
  ChannelMask mask;
  mask.target = o.target;
  for (auto& [id, pr] : pruned) {
    keep_best(pr, scores.at(id));
    emit(mask, id, pr);
  }
  return mask;
}

ChannelMask constrained(const std::vector<Prunable>& segs, const ChannelScores& scores, const MaskOptions& o) {
  ChannelMask mask;
  mask.target = o.target;
  for (const auto& p : segs) {
    const int space = p.analysis.trace.channel_space;
    std::vector<double> cls_score(static_cast<std::size_t>(space), 0.0);
    for (const auto& m : p.members) {
      const auto& s = scores_of(scores, m, width(p, m, o.target));
      const auto& cls = classes(p, m, o.target);
      for (std::size_t k = 0; k < cls.size(); ++k) cls_score[static_cast<std::size_t>(cls[k])] += s[k];
    }
    std::vector<int> idx(static_cast<std::size_t>(space));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return cls_score[static_cast<std::size_t>(a)] < cls_score[static_cast<std::size_t>(b)];
    });
    std::vector<bool> pruned(static_cast<std::size_t>(space), false);
    const auto k = static_cast<std::size_t>(std::floor(o.sparsity * space));
    for (std::size_t i = 0; i < k; ++i) pruned[static_cast<std::size_t>(idx[i])] = true;
    // Every member and every producer band keeps at least one channel.
    auto rescue = [&](const std::vector<int>& cls) {
      std::vector<bool> local;
      std::vector<double> s;
      for (int c : cls) {
        local.push_back(pruned[static_cast<std::size_t>(c)]);
        s.push_back(cls_score[static_cast<std::size_t>(c)]);
      }
      keep_best(local, s);
      for (std::size_t j = 0; j < cls.size(); ++j)
        if (!local[j]) pruned[static_cast<std::size_t>(cls[j])] = false;
    };
    for (const auto& m : p.members) rescue(classes(p, m, o.target));
    for (const auto& pr : p.analysis.segment.producers) rescue(p.analysis.output_classes(pr));
    for (const auto& m : p.members) {
      const auto& cls = classes(p, m, o.target);
      std::vector<bool> local;
      for (int c : cls) local.push_back(pruned[static_cast<std::size_t>(c)]);
      emit(mask, m, local);
    }
  }
  return mask;
}

}  // namespace

ChannelScores score_channels(const ModelGraph& graph, const WeightStore& weights, Heuristic h, std::uint64_t seed) {
  return score(graph, weights, h, seed, true);
}

ChannelScores score_filters(const ModelGraph& graph, const WeightStore& weights, Heuristic h, std::uint64_t seed) {
  return score(graph, weights, h, seed, false);
}

ChannelMask make_masks(const ModelGraph& graph, const ChannelScores& scores, const MaskOptions& options) {
  if (!(options.sparsity >= 0.0 && options.sparsity < 1.0))
    throw ValidationError("sparsity must be in [0, 1), got " + std::to_string(options.sparsity));
  const auto segs = prunable_segments(graph, options.target);
  return options.mode == MaskMode::kConstrained ? constrained(segs, scores, options)
                                                : unconstrained(segs, scores, options);
}

double achieved_sparsity(const ModelGraph& graph, const ChannelMask& masks) {
  long total = 0, pruned = 0;
  for (const auto& p : prunable_segments(graph, masks.target)) {
    for (const auto& m : p.members) {
      const int n = width(p, m, masks.target);
      total += n;
      if (auto it = masks.retained.find(m); it != masks.retained.end())
        pruned += n - static_cast<long>(it->second.size());
    }
  }
  return total ? static_cast<double>(pruned) / static_cast<double>(total) : 0.0;
}

}  // namespace slicepack
