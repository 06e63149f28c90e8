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

#include <cstddef>

#include "slicepack/model_ir.hpp"

namespace slicepack {

enum class ExecPolicy { kSerial, kParallel };

// y = W x for a row-major [rows, cols] matrix. The parallel version splits
// rows across OpenMP threads; each row is summed in the same order as the
// serial version, so results are bit-identical.
void matvec_serial(const Tensor& w, const double* x, double* y);
void matvec_parallel(const Tensor& w, const double* x, double* y);

inline void matvec(const Tensor& w, const double* x, double* y, ExecPolicy policy) {
  if (policy == ExecPolicy::kParallel)
    matvec_parallel(w, x, y);
  else
    matvec_serial(w, x, y);
}

int max_threads();

}  // namespace slicepack
