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

#include "slicepack/kernels.hpp"

#include <omp.h>

namespace slicepack {

void matvec_serial(const Tensor& w, const double* x, double* y) {
  const std::size_t rows = w.rows(), cols = w.cols();
  const double* a = w.data.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += a[r * cols + c] * x[c];
    y[r] = acc;
  }
}

void matvec_parallel(const Tensor& w, const double* x, double* y) {
  const auto rows = static_cast<long>(w.rows());
  const std::size_t cols = w.cols();
  const double* a = w.data.data();
#pragma omp parallel for schedule(static) if (rows * static_cast<long>(cols) > 4096)
  for (long r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = a + static_cast<std::size_t>(r) * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace slicepack
