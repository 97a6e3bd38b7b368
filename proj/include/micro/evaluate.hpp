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

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "micro/checkpoint.hpp"
#include "micro/features.hpp"
#include "micro/metrics.hpp"
#include "micro/model.hpp"
#include "micro/split.hpp"

namespace micro {

// Config blob stored in checkpoints: trainer settings plus dataset shape.
nlohmann::json checkpoint_config(const MicroModel& model);

// Rebuilds the model described by a checkpoint and loads its parameters.
// Shape disagreements with the dataset are incompatibility errors.
MicroModel restore_model(const Checkpoint& checkpoint, const InteractionTable& table,
                         std::vector<FeatureMatrix> features,
                         const std::filesystem::path& graph_cache = {});

// Test-split metrics of `model` on `split`, one report per k. The protocol
// tag follows the split mode.
std::vector<MetricReport> evaluate_model(const MicroModel& model, const SplitResult& split,
                                         std::span<const std::size_t> ks);

}  // namespace micro
