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

#include "micro/sampler.hpp"

#include "micro/error.hpp"

namespace micro {

TripleSampler::TripleSampler(const InteractionTable& table) : table_(&table) {
  for (std::size_t u = 0; u < table.num_users(); ++u) {
    const auto row = table.of_user(u);
    const bool saturated = row.size() >= table.num_items();
    for (const auto& x : row) {
      if (x.tag != SplitTag::kTrain) continue;
      if (saturated) {
        saturated_ += 1;
      } else {
        train_.push_back(x);
      }
    }
  }
  require(!train_.empty(), "triple sampler: no train interactions with a possible negative");
}

TripleBatch TripleSampler::sample(std::size_t batch_size, Rng& rng) const {
  TripleBatch batch;
  batch.users.reserve(batch_size);
  batch.positives.reserve(batch_size);
  batch.negatives.reserve(batch_size);
  const std::size_t n_items = table_->num_items();
  for (std::size_t b = 0; b < batch_size; ++b) {
    const Interaction& x = train_[rng.index(train_.size())];
    std::uint32_t j = 0;
    do {
      j = static_cast<std::uint32_t>(rng.index(n_items));
    } while (table_->is_positive(x.user, j));
    batch.users.push_back(x.user);
    batch.positives.push_back(x.item);
    batch.negatives.push_back(j);
  }
  return batch;
}

TripleBatch sample_triples(const InteractionTable& table, std::size_t batch_size, Rng& rng) {
  return TripleSampler(table).sample(batch_size, rng);
}

}  // namespace micro
