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
#include <filesystem>

#include <nlohmann/json.hpp>

#include "micro/adam.hpp"
#include "micro/params.hpp"

namespace micro {

struct BestMetric {
  std::uint64_t epoch = 0;
  double recall = 0.0;
  std::uint32_t k = 20;
};

/// Binary layout ("MCK1"), little-endian:
///   magic, u32 version, u64 config length, config JSON bytes,
///   u32 tensor count, tensors, Adam record, best-metric record.
/// A tensor is u32 name length, name bytes, u32 rows, u32 cols, f64 values.
/// The Adam record is u64 step, f64 lr/beta1/beta2/eps/weight decay, then
/// the first- and second-moment tensor lists.
struct Checkpoint {
  nlohmann::json config;
  ParameterSet params;
  AdamState adam;
  BestMetric best;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace micro
