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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "micro/features.hpp"
#include "micro/interactions.hpp"

namespace micro {

/// Mean cosine similarity over all item pairs versus co-interacted pairs.
struct CointeractionSimilarity {
  std::string modality;
  double all_pairs_mean = 0.0;
  std::optional<double> co_interacted_mean;  // empty when no user has two items
  std::size_t co_interacted_pairs = 0;
  bool all_pairs_sampled = false;
};

// Exact over distinct pairs for N <= exact_limit, otherwise a uniform sample
// of `sample_pairs` distinct-item pairs. Co-interacted pairs are deduplicated
// across users and taken from every split.
CointeractionSimilarity pilot_cointeraction_similarity(const FeatureMatrix& features,
                                                       const InteractionTable& table,
                                                       std::size_t exact_limit = 5000,
                                                       std::size_t sample_pairs = 1000000,
                                                       std::uint64_t seed = 2022);

/// Fraction of users (with >= 2 items) owning a pair i1, i2 where one is
/// among the k most similar items of the other (self excluded).
struct SimilarPurchaseProportion {
  std::string modality;
  std::vector<std::size_t> k_values;
  std::vector<double> proportions;
  std::size_t eligible_users = 0;
};

SimilarPurchaseProportion pilot_similar_purchase_proportion(const FeatureMatrix& features,
                                                            const InteractionTable& table,
                                                            const std::vector<std::size_t>& k_list);

nlohmann::json pilot_report_json(const std::vector<CointeractionSimilarity>& similarity,
                                 const std::vector<SimilarPurchaseProportion>& proportions);

}  // namespace micro
