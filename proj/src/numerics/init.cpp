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

#include "micro/init.hpp"

#include <cmath>

#include "micro/error.hpp"

namespace micro {

double xavier_bound(std::size_t rows, std::size_t cols) {
  return std::sqrt(6.0 / static_cast<double>(rows + cols));
}

DenseMatrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng) {
  require(rows >= 1 && cols >= 1, "xavier_init: dimensions must be >= 1, got " +
                                      std::to_string(rows) + "x" + std::to_string(cols));
  const double bound = xavier_bound(rows, cols);
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-bound, bound);
  return m;
}

DenseMatrix xavier_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  return xavier_init(rows, cols, rng);
}

}  // namespace micro
