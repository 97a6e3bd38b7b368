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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "micro/dense.hpp"
#include "micro/interactions.hpp"

namespace micro {

// Items by descending score, ties to the lower index, `exclusions` (sorted)
// removed. Only the first `limit` positions are ordered when limit > 0.
std::vector<std::uint32_t> rank_items(std::span<const double> scores,
                                      std::span<const std::uint32_t> exclusions,
                                      std::size_t limit = 0);

// `relevant` must be sorted. Binary gains; IDCG over min(|relevant|, k).
double recall_at_k(std::span<const std::uint32_t> ranked,
                   std::span<const std::uint32_t> relevant, std::size_t k);
double precision_at_k(std::span<const std::uint32_t> ranked,
                      std::span<const std::uint32_t> relevant, std::size_t k);
double ndcg_at_k(std::span<const std::uint32_t> ranked,
                 std::span<const std::uint32_t> relevant, std::size_t k);

/// Per-user ranked candidate lists and held-out positives.
struct RankingResult {
  std::vector<std::vector<std::uint32_t>> ranked;
  std::vector<std::vector<std::uint32_t>> relevant;
  std::size_t k = 20;
};

struct MetricReport {
  std::string protocol = "warm";  // warm | cold
  std::string split = "test";     // valid | test
  std::size_t k = 20;
  double recall = 0.0;
  double precision = 0.0;
  double ndcg = 0.0;
  std::size_t users = 0;

  nlohmann::json to_json() const;
};

// Averages over users with a nonempty relevant set.
MetricReport summarize(const RankingResult& result);

// Full-catalog ranking of `scores` (users x items) against the interactions
// tagged `target`, excluding each user's train items. Users without train
// interactions or without targets are skipped. One report per k.
std::vector<MetricReport> evaluate_scores(const DenseMatrix& scores,
                                          const InteractionTable& table, SplitTag target,
                                          std::span<const std::size_t> ks,
                                          const std::string& protocol);

}  // namespace micro
