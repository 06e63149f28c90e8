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

#pragma once

#include <string>
#include <vector>

#include "slicepack/export_planner.hpp"
#include "slicepack/kernels.hpp"
#include "slicepack/mrap.hpp"

namespace slicepack {

struct ExportOptions {
  Strategy strategy = Strategy::kUpscale;
  // Export segments that break the channel-identification rules through an
  // identity plan instead of failing.
  bool allow_fallback = false;
  MrapOptions mrap;
  // Search all orderings of small segments the path order cannot fit.
  bool exact_layout = true;
  ExecPolicy policy = ExecPolicy::kSerial;
};

struct ExportResult {
  ModelPlan plan;
  ChannelMask masks;  // the masks the plan realizes (projected for constrained)
};

// Plans every segment. Segments are independent and planned in parallel under
// ExecPolicy::kParallel; the result does not depend on the policy.
// Throws UnsupportedTopology or OutputPruningHazard naming the segment.
ExportResult plan_model(const ModelGraph& graph, const ChannelMask& masks, const ExportOptions& options);

}  // namespace slicepack
