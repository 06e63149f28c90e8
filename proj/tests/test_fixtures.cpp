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

#include <gtest/gtest.h>

#include <filesystem>

#include "slicepack/model_io.hpp"
#include "support/fixtures.hpp"

namespace slicepack {
namespace {

// The checked-in JSON must match the builders byte for byte.
TEST(Fixtures, FilesMatchBuilders) {
  const std::filesystem::path dir = SLICEPACK_FIXTURE_DIR;
  for (const auto& f : testing::all_fixtures()) {
    EXPECT_EQ(read_text_file(dir / (f.name + ".model.json")), serialize_model(f.graph)) << f.name;
    EXPECT_EQ(read_text_file(dir / (f.name + ".weights.json")), serialize_weights(f.weights)) << f.name;
    EXPECT_EQ(read_text_file(dir / (f.name + ".masks.json")), serialize_mask(f.masks)) << f.name;
  }
}

TEST(Fixtures, FilesLoadAndValidate) {
  const std::filesystem::path dir = SLICEPACK_FIXTURE_DIR;
  for (const auto& f : testing::all_fixtures()) {
    const auto [g, w] = load_model(dir / (f.name + ".model.json"), dir / (f.name + ".weights.json"));
    EXPECT_EQ(g, f.graph);
    EXPECT_EQ(load_mask(dir / (f.name + ".masks.json"), g), f.masks);
  }
}

}  // namespace
}  // namespace slicepack
