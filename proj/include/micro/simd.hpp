// Copyright 2026 The micro-rec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Runtime-dispatched vector kernels. Every kernel has a portable scalar
// reference; an AVX2 variant is compiled separately and selected when the CPU
// supports it. Elementwise kernels (axpy, scale, add) are bitwise identical
// across variants. Reductions (dot) reassociate and agree to rounding only.

#include <cstddef>
#include <string_view>

namespace micro::simd {

struct KernelTable {
  const char* name;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scale)(double a, double* x, std::size_t n);
  // y[i] += x[i]
  void (*add)(const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_kernels();

// Active table. Chosen once from MICRO_SIMD (scalar | avx2 | auto, default
// auto); falls back to scalar when the request cannot be honored.
const KernelTable& active();

// Overrides the active table; used by tests and benchmarks.
void set_active(const KernelTable& table);

inline double dot(const double* x, const double* y, std::size_t n) {
  return active().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy(a, x, y, n);
}
inline void scale(double a, double* x, std::size_t n) { active().scale(a, x, n); }
inline void add(const double* x, double* y, std::size_t n) { active().add(x, y, n); }

}  // namespace micro::simd
