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

// Serial against OpenMP for the three parallel paths: the dense kernel,
// equivalence trials and per-segment planning.
#include <benchmark/benchmark.h>

#include <random>

#include "slicepack/interpreter.hpp"
#include "slicepack/kernels.hpp"
#include "slicepack/masking.hpp"
#include "slicepack/pipeline.hpp"

namespace {

using namespace slicepack;

Tensor random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Tensor t;
  t.shape = {rows, cols};
  t.data.resize(rows * cols);
  for (auto& v : t.data) v = n(rng);
  return t;
}

// `blocks` residual blocks of `width` channels, each with a two-mix branch,
// and a transition mix after every third block.
std::pair<ModelGraph, WeightStore> residual_stack(int blocks, int width) {
  GraphBuilder b;
  b.input("x", width).mix("stem", "x", width);
  std::string prev = "stem";
  for (int i = 0; i < blocks; ++i) {
    const auto k = std::to_string(i);
    b.mix("b" + k + "a", prev, width).pass("b" + k + "r", "b" + k + "a").mix("b" + k + "b", "b" + k + "r", width);
    b.add("b" + k + "s", {prev, "b" + k + "b"});
    prev = "b" + k + "s";
    if (i % 3 == 2) {
      b.mix("t" + k, prev, width);
      prev = "t" + k;
    }
  }
  b.mix("head", prev, width).output("y", "head");
  auto g = b.build();
  WeightStore w;
  std::uint64_t seed = 1;
  for (const auto& l : g.layers)
    if (l.kind == LayerKind::kChannelMix)
      w[l.id] = random_matrix(static_cast<std::size_t>(l.out_channels), static_cast<std::size_t>(l.in_channels), seed++);
  return {std::move(g), std::move(w)};
}

void BM_Matvec(benchmark::State& state, ExecPolicy policy) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto w = random_matrix(n, n, 3);
  std::vector<double> x(n, 1.0), y(n);
  for (auto _ : state) {
    matvec(w, x.data(), y.data(), policy);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}

void BM_Equivalence(benchmark::State& state, ExecPolicy policy) {
  const auto [g, w] = residual_stack(4, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = check_equivalence(g, w, nullptr, g, w, 16, 1e-9, 0, policy);
    benchmark::DoNotOptimize(r.max_deviation);
  }
}

void BM_PlanModel(benchmark::State& state, ExecPolicy policy) {
  const auto [g, w] = residual_stack(static_cast<int>(state.range(0)), 12);
  MaskOptions mo;
  mo.sparsity = 0.4;
  const auto masks = make_masks(g, score_channels(g, w, Heuristic::kL2), mo);
  ExportOptions o;
  o.policy = policy;
  for (auto _ : state) {
    auto r = plan_model(g, masks, o);
    benchmark::DoNotOptimize(r.plan.segments.data());
  }
}

BENCHMARK_CAPTURE(BM_Matvec, serial, ExecPolicy::kSerial)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_Matvec, parallel, ExecPolicy::kParallel)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_Equivalence, serial, ExecPolicy::kSerial)->Arg(128);
BENCHMARK_CAPTURE(BM_Equivalence, parallel, ExecPolicy::kParallel)->Arg(128);
BENCHMARK_CAPTURE(BM_PlanModel, serial, ExecPolicy::kSerial)->Arg(32);
BENCHMARK_CAPTURE(BM_PlanModel, parallel, ExecPolicy::kParallel)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
