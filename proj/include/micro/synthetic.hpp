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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "micro/features.hpp"
#include "micro/interactions.hpp"

namespace micro {

struct SyntheticSpec {
  std::size_t users = 200;
  std::size_t items = 100;
  std::vector<std::pair<std::string, std::size_t>> modalities{{"visual", 32}, {"textual", 16}};
  std::size_t rank = 8;
  double noise = 0.1;
  std::uint64_t seed = 2022;
  std::size_t min_interactions = 8;
  std::size_t max_interactions = 16;
  // Each user draws from the top `pool_factor * n_u` items by latent score.
  double pool_factor = 2.0;

  void validate() const;
};

struct SyntheticDataset {
  InteractionTable table;
  std::vector<FeatureMatrix> features;
  DenseMatrix user_factors;
  DenseMatrix item_factors;
};

// Shared latent-factor generator: interactions come from high-scoring
// user-item pairs and every modality is a noisy linear view of the item
// factors, so co-interacted items are more similar by construction.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace micro
