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

#include "slicepack/pipeline.hpp"

#include <exception>

#include "slicepack/error.hpp"

namespace slicepack {

namespace {

ExportPlan plan_segment(const ModelGraph& graph, const Segment& seg, const ChannelMask& masks,
                        const ExportOptions& o) {
  SegmentAnalysis a;
  try {
    a = analyze_segment(graph, seg);
  } catch (const UnsupportedTopology&) {
    const auto& members = masks.target == MaskTarget::kInput ? seg.consumers : seg.producers;
    bool strict_output = false;
    if (masks.target == MaskTarget::kOutput)
      for (const auto& m : members)
        if (auto it = masks.retained.find(m);
            it != masks.retained.end() && static_cast<int>(it->second.size()) < graph.find(m)->out_channels)
          strict_output = true;
    if (!o.allow_fallback || strict_output) throw;
    return plan_fallback(graph, seg, masks);
  }
  if (masks.target == MaskTarget::kOutput) return plan_export_output(a, masks, o.strategy == Strategy::kUpscale, o.mrap);
  if (o.strategy == Strategy::kUpscale) return plan_upscale(a, masks, o.mrap, o.exact_layout);
  return plan_baseline(a, masks);
}

}  // namespace

ExportResult plan_model(const ModelGraph& graph, const ChannelMask& masks, const ExportOptions& options) {
  ExportResult r;
  r.masks = options.strategy == Strategy::kConstrained ? constrain_masks(graph, masks) : masks;
  r.plan.strategy = options.strategy;
  r.plan.target = masks.target;
  const auto segments = find_segments(graph);
  const auto n = static_cast<long>(segments.size());
  r.plan.segments.resize(segments.size());
  std::vector<std::exception_ptr> errors(segments.size());
  auto one = [&](long i) {
    try {
      r.plan.segments[static_cast<std::size_t>(i)] =
          plan_segment(graph, segments[static_cast<std::size_t>(i)], r.masks, options);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (options.policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) one(i);
  } else {
    for (long i = 0; i < n; ++i) one(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return r;
}

}  // namespace slicepack
