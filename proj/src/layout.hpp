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

#include <map>
#include <set>
#include <vector>

#include "slicepack/consumer_graph.hpp"
#include "slicepack/model_ir.hpp"

namespace slicepack::detail {

// One input's contribution to a run of an Add target.
struct Term {
  std::size_t input = 0;        // predecessor index of the Add
  std::vector<int> positions;   // into that input's layout, in target order
  bool contiguous = false;      // positions are consecutive and increasing
  bool whole = false;           // the input is exactly this run
};

// Maximal stretch of target positions fed by the same inputs.
struct Run {
  std::vector<int> classes;
  std::vector<Term> terms;
};

struct Join {
  bool aligned = true;  // every input already has the same layout
  std::vector<Run> runs;
};

struct Selection {
  std::vector<int> positions;  // into the input layout
  bool contiguous = false;
};

struct Layouts {
  std::map<LayerId, std::vector<int>> tensor;  // class at each position
  std::map<LayerId, Join> joins;
  std::map<LayerId, Selection> selections;
  std::map<LayerId, std::set<LayerId>> upstream;  // producers feeding each tensor
  int interior_copied = 0;
};

// Propagates producer layouts through the segment interior. With `reorder`,
// re-selected Slice/Gather channels follow their input layout; otherwise they
// keep their original sequence. A misaligned Add targets `order` restricted to
// the classes it receives. Throws Error if a tensor would be left empty.
Layouts realize(const SegmentAnalysis& analysis,
                const std::map<LayerId, std::vector<int>>& producer_layout, const std::vector<int>& order,
                bool reorder);

bool consecutive(const std::vector<int>& positions);

}  // namespace slicepack::detail
