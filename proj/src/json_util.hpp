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

#include <json.hpp>

#include "slicepack/error.hpp"

namespace slicepack::detail {

// nlohmann converts 0.5 to 0 silently; index fields must be integral.
inline void require_integers(const nlohmann::json& j, const std::string& what) {
  if (j.is_array()) {
    for (const auto& v : j) require_integers(v, what);
    return;
  }
  if (!j.is_number_integer()) throw ParseError(what + ": expected an integer, got " + j.dump());
}

}  // namespace slicepack::detail
