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

#include <cstdint>

#include "micro/dense.hpp"
#include "micro/rng.hpp"

namespace micro {

// Glorot uniform: U(-sqrt(6 / (rows + cols)), +sqrt(6 / (rows + cols))).
DenseMatrix xavier_init(std::size_t rows, std::size_t cols, std::uint64_t seed);
DenseMatrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng);

double xavier_bound(std::size_t rows, std::size_t cols);

}  // namespace micro
