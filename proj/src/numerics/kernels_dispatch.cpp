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

#include <atomic>
#include <cstdlib>
#include <string>

#include "micro/simd.hpp"

namespace micro::simd {

const KernelTable* avx2_table_if_compiled();

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* select_default() {
  const char* env = std::getenv("MICRO_SIMD");
  const std::string request = env ? env : "auto";
  if (request == "scalar") return &scalar_kernels();
  const KernelTable* avx2 = avx2_kernels();
  return avx2 ? avx2 : &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{select_default()};
  return table;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable* table =
      cpu_has_avx2() ? avx2_table_if_compiled() : nullptr;
  return table;
}

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

void set_active(const KernelTable& table) {
  slot().store(&table, std::memory_order_relaxed);
}

}  // namespace micro::simd
