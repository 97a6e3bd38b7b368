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
#include <string>
#include <vector>

#include "micro/interactions.hpp"

namespace micro {

enum class SplitMode { kWarm, kCold };

struct SplitSpec {
  SplitMode mode = SplitMode::kWarm;
  double train_ratio = 0.8;
  double valid_ratio = 0.1;
  double test_ratio = 0.1;
  // Fraction of items held out entirely in cold mode; half go to valid.
  double cold_fraction = 0.2;
  std::uint64_t seed = 2022;

  void validate() const;
};

struct SplitResult {
  InteractionTable table;
  SplitSpec spec;
  std::vector<std::uint32_t> cold_valid_items;
  std::vector<std::uint32_t> cold_test_items;
  // Warm: users with fewer than 3 interactions (kept entirely in train).
  // Cold: users left with no training interactions (not evaluated).
  std::size_t warnings = 0;

  bool is_cold_item(std::uint32_t item) const;
  // JSON: seed, spec, per-tag counts, cold item ids.
  std::string to_json() const;
};

SplitResult make_warm_split(const InteractionTable& table, const SplitSpec& spec);
SplitResult make_cold_split(const InteractionTable& table, const SplitSpec& spec);
SplitResult make_split(const InteractionTable& table, const SplitSpec& spec);

}  // namespace micro
