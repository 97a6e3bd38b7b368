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
#include <vector>

#include "micro/interactions.hpp"
#include "micro/rng.hpp"

namespace micro {

/// BPR training triples (user, positive, negative).
struct TripleBatch {
  std::vector<std::uint32_t> users;
  std::vector<std::uint32_t> positives;
  std::vector<std::uint32_t> negatives;

  std::size_t size() const noexcept { return users.size(); }
};

/// Draws positives uniformly over train-tagged interactions and negatives
/// uniformly over items outside the user's positive set in every split.
class TripleSampler {
 public:
  explicit TripleSampler(const InteractionTable& table);

  TripleBatch sample(std::size_t batch_size, Rng& rng) const;

  std::size_t train_size() const noexcept { return train_.size(); }
  // Train interactions skipped because the user has interacted with every item.
  std::size_t saturated_skipped() const noexcept { return saturated_; }

 private:
  const InteractionTable* table_;
  std::vector<Interaction> train_;
  std::size_t saturated_ = 0;
};

TripleBatch sample_triples(const InteractionTable& table, std::size_t batch_size, Rng& rng);

}  // namespace micro
