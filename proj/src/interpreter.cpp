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

#include "slicepack/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "slicepack/error.hpp"

namespace slicepack {

namespace {

const Tensor& weight_of(const WeightStore& w, const LayerId& id) {
  auto it = w.find(id);
  if (it == w.end()) throw Error("no weights for " + id);
  return it->second;
}

void apply_mask(Activation& v, const ChannelMask& masks, const LayerId& id) {
  auto it = masks.retained.find(id);
  if (it == masks.retained.end()) return;
  std::vector<bool> keep(v.size(), false);
  for (int k : it->second) {
    if (k < 0 || static_cast<std::size_t>(k) >= v.size()) throw Error("mask index out of range for " + id);
    keep[static_cast<std::size_t>(k)] = true;
  }
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!keep[k]) v[k] = 0.0;
}

}  // namespace

int input_width(const ModelGraph& graph) {
  const Layer* in = nullptr;
  for (const auto& l : graph.layers) {
    if (l.kind != LayerKind::kInput) continue;
    if (in) throw Error("the interpreter expects exactly one input layer");
    in = &l;
  }
  if (!in) throw Error("the interpreter expects exactly one input layer");
  return in->out_channels;
}

Activation run(const ModelGraph& graph, const WeightStore& weights, const Activation& input,
               const ChannelMask* masks, ExecPolicy policy) {
  GraphIndex g(graph);
  if (!g.acyclic()) throw Error("cannot evaluate a cyclic graph");
  if (static_cast<int>(input.size()) != input_width(graph))
    throw Error("input has " + std::to_string(input.size()) + " channels, model expects " +
                std::to_string(input_width(graph)));
  const bool mask_in = masks && masks->target == MaskTarget::kInput;
  const bool mask_out = masks && masks->target == MaskTarget::kOutput;
  std::vector<Activation> val(g.size());
  Activation out;
  for (auto i : g.topo_order()) {
    const Layer& l = g.layer(i);
    const auto& preds = g.preds(i);
    auto in = [&](std::size_t k) -> const Activation& { return val[preds.at(k)]; };
    Activation v;
    switch (l.kind) {
      case LayerKind::kInput:
        v = input;
        break;
      case LayerKind::kOutput:
        v = in(0);
        out.insert(out.end(), v.begin(), v.end());
        break;
      case LayerKind::kChannelMix: {
        Activation x = in(0);
        if (mask_in) apply_mask(x, *masks, l.id);
        const Tensor& w = weight_of(weights, l.id);
        if (w.cols() != x.size()) throw Error("shape mismatch at " + l.id);
        v.resize(w.rows());
        matvec(w, x.data(), v.data(), policy);
        if (mask_out) apply_mask(v, *masks, l.id);
        break;
      }
      case LayerKind::kAdd:
        v = in(0);
        for (std::size_t k = 1; k < preds.size(); ++k) {
          if (in(k).size() != v.size()) throw Error("shape mismatch at " + l.id);
          for (std::size_t c = 0; c < v.size(); ++c) v[c] += in(k)[c];
        }
        break;
      case LayerKind::kConcat:
        for (std::size_t k = 0; k < preds.size(); ++k) v.insert(v.end(), in(k).begin(), in(k).end());
        break;
      case LayerKind::kPassThrough:
        v = in(0);
        for (auto& x : v) x = std::max(0.0, x);
        break;
      case LayerKind::kPerChannel: {
        v = in(0);
        const Tensor& w = weight_of(weights, l.id);
        if (w.data.size() != v.size()) throw Error("shape mismatch at " + l.id);
        for (std::size_t c = 0; c < v.size(); ++c) v[c] += w.data[c];
        break;
      }
      case LayerKind::kSlice:
        if (l.offset < 0 || static_cast<std::size_t>(l.offset + l.out_channels) > in(0).size())
          throw Error("slice out of range at " + l.id);
        v.assign(in(0).begin() + l.offset, in(0).begin() + l.offset + l.out_channels);
        break;
      case LayerKind::kGather:
        for (int k : l.indices) {
          if (k < 0 || static_cast<std::size_t>(k) >= in(0).size()) throw Error("gather out of range at " + l.id);
          v.push_back(in(0)[static_cast<std::size_t>(k)]);
        }
        break;
    }
    if (l.kind != LayerKind::kOutput && static_cast<int>(v.size()) != l.out_channels)
      throw Error("shape mismatch at " + l.id);
    val[i] = std::move(v);
  }
  return out;
}

double relative_deviation(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

EquivalenceReport check_equivalence(const ModelGraph& original, const WeightStore& original_weights,
                                    const ChannelMask* masks, const ModelGraph& exported,
                                    const WeightStore& exported_weights, int trials, double tol,
                                    std::uint64_t seed, ExecPolicy policy) {
  const int width = input_width(original);
  if (input_width(exported) != width) throw Error("models disagree on input width");
  std::vector<double> dev(static_cast<std::size_t>(std::max(trials, 0)), 0.0);
  std::vector<int> bad(dev.size(), 0);
  auto trial = [&](int t) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
    std::normal_distribution<double> normal(0.0, 1.0);
    Activation x(static_cast<std::size_t>(width));
    for (auto& v : x) v = normal(rng);
    const auto a = run(original, original_weights, x, masks);
    const auto b = run(exported, exported_weights, x);
    if (a.size() != b.size()) {
      bad[static_cast<std::size_t>(t)] = 1;
      return;
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, relative_deviation(a[k], b[k]));
    dev[static_cast<std::size_t>(t)] = m;
  };
  if (policy == ExecPolicy::kParallel) {
    std::vector<std::string> errors(dev.size());
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
      try {
        trial(t);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(t)] = e.what();
      }
    }
    for (const auto& e : errors)
      if (!e.empty()) throw Error(e);
  } else {
    for (int t = 0; t < trials; ++t) trial(t);
  }
  if (std::any_of(bad.begin(), bad.end(), [](int b) { return b != 0; }))
    throw Error("models disagree on output width");
  EquivalenceReport r;
  r.trials = trials;
  r.tolerance = tol;
  for (double d : dev) r.max_deviation = std::max(r.max_deviation, d);
  r.passed = r.max_deviation <= tol;
  return r;
}

}  // namespace slicepack
