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

#include "slicepack/consumer_graph.hpp"
#include "slicepack/segmenter.hpp"

namespace slicepack::testing {

// Analysis of the segment whose producer list is exactly `producers`.
inline SegmentAnalysis analysis_of(const ModelGraph& g, const std::vector<LayerId>& producers) {
  for (const auto& s : find_segments(g))
    if (s.producers == producers) return analyze_segment(g, s);
  throw std::runtime_error("no segment with the given producers");
}

}  // namespace slicepack::testing
