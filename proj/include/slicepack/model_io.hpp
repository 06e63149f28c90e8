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

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>

#include "slicepack/model_ir.hpp"

namespace slicepack {

inline constexpr int kFormatVersion = 1;

// Model document:
//   {"version": 1,
//    "layers": [{"id", "kind", "in_channels", "out_channels"[, "offset"][, "indices"]}, ...],
//    "edges": [[src, dst], ...]}
std::string serialize_model(const ModelGraph& graph);
ModelGraph parse_model(std::string_view text);

// Weights document: {"version": 1, "tensors": {id: {"shape": [...], "data": [...]}}}
std::string serialize_weights(const WeightStore& weights);
WeightStore parse_weights(std::string_view text);

// Mask document: {"version": 1, "target": "input"|"output", "retained": {id: [indices]}}
// "target" defaults to "input" when absent.
std::string serialize_mask(const ChannelMask& mask);
ChannelMask parse_mask(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Parses both documents and validates them together. Throws ParseError or
// ValidationError (whose message lists every diagnostic).
std::pair<ModelGraph, WeightStore> load_model(const std::filesystem::path& model_file,
                                              const std::filesystem::path& weights_file);
ChannelMask load_mask(const std::filesystem::path& mask_file, const ModelGraph& graph);

std::string format_diagnostics(const std::vector<Diagnostic>& diags);

}  // namespace slicepack
