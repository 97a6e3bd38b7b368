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

#include "micro/pilot.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "micro/error.hpp"
#include "micro/rng.hpp"

namespace micro {

namespace {

DenseMatrix unit_rows(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    const double n = norm2(row);
    if (!(n > 0.0)) fail("pilot: zero-norm feature row " + std::to_string(i));
    for (double& v : row) v /= n;
  }
  return out;
}

// Distinct (a < b) pairs that co-occur in some user's item set.
std::vector<std::uint64_t> cointeracted_pairs(const InteractionTable& table) {
  std::vector<std::uint64_t> keys;
  for (std::size_t u = 0; u < table.num_users(); ++u) {
    const auto row = table.of_user(u);
    for (std::size_t a = 0; a < row.size(); ++a) {
      for (std::size_t b = a + 1; b < row.size(); ++b) {
        keys.push_back((std::uint64_t{row[a].item} << 32) | row[b].item);
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

}  // namespace

CointeractionSimilarity pilot_cointeraction_similarity(const FeatureMatrix& features,
                                                       const InteractionTable& table,
                                                       std::size_t exact_limit,
                                                       std::size_t sample_pairs,
                                                       std::uint64_t seed) {
  const std::size_t n = features.values.rows();
  require(n == table.num_items(), "pilot: feature rows do not match item count");
  require(n >= 2, "pilot: need at least two items");
  const DenseMatrix unit = unit_rows(features.values);

  CointeractionSimilarity out;
  out.modality = features.modality;
  double total = 0.0;
  if (n <= exact_limit) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        total += dot(unit.row(i), unit.row(j));
        ++count;
      }
    }
    out.all_pairs_mean = total / static_cast<double>(count);
  } else {
    Rng rng = Rng::stream(seed, "pilot-pairs");
    for (std::size_t s = 0; s < sample_pairs; ++s) {
      const std::size_t i = rng.index(n);
      std::size_t j = rng.index(n - 1);
      if (j >= i) ++j;
      total += dot(unit.row(i), unit.row(j));
    }
    out.all_pairs_mean = total / static_cast<double>(sample_pairs);
    out.all_pairs_sampled = true;
  }

  const auto pairs = cointeracted_pairs(table);
  out.co_interacted_pairs = pairs.size();
  if (!pairs.empty()) {
    double sum = 0.0;
    for (const std::uint64_t key : pairs) {
      sum += dot(unit.row(key >> 32), unit.row(key & 0xffffffffULL));
    }
    out.co_interacted_mean = sum / static_cast<double>(pairs.size());
  }
  return out;
}

SimilarPurchaseProportion pilot_similar_purchase_proportion(
    const FeatureMatrix& features, const InteractionTable& table,
    const std::vector<std::size_t>& k_list) {
  const std::size_t n = features.values.rows();
  require(n == table.num_items(), "pilot: feature rows do not match item count");
  for (const std::size_t k : k_list) {
    require(k >= 1 && k + 1 <= n, "pilot: k must lie in [1, N-1], got " + std::to_string(k));
  }
  const DenseMatrix unit = unit_rows(features.values);

  std::vector<std::vector<std::uint32_t>> users_of(n);
  for (std::size_t u = 0; u < table.num_users(); ++u) {
    for (const auto& x : table.of_user(u)) users_of[x.item].push_back(static_cast<std::uint32_t>(u));
  }

  // best[u]: smallest rank r such that some pair of u's items has one item
  // at position r in the other's neighbor list.
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> best(table.num_users(), kNone);
  std::vector<double> sims(n);
  std::vector<std::uint32_t> order(n);
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (users_of[i].empty()) continue;
    for (std::size_t j = 0; j < n; ++j) sims[j] = dot(unit.row(i), unit.row(j));
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if ((a == i) != (b == i)) return b == i;  // self goes last
      if (sims[a] != sims[b]) return sims[a] > sims[b];
      return a < b;
    });
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r + 1;
    for (const std::uint32_t u : users_of[i]) {
      for (const auto& x : table.of_user(u)) {
        if (x.item == i) continue;
        best[u] = std::min(best[u], rank[x.item]);
      }
    }
  }

  SimilarPurchaseProportion out;
  out.modality = features.modality;
  out.k_values = k_list;
  for (std::size_t u = 0; u < table.num_users(); ++u) {
    if (table.of_user(u).size() >= 2) out.eligible_users += 1;
  }
  for (const std::size_t k : k_list) {
    std::size_t hits = 0;
    for (std::size_t u = 0; u < table.num_users(); ++u) {
      if (table.of_user(u).size() >= 2 && best[u] <= k) ++hits;
    }
    out.proportions.push_back(out.eligible_users == 0
                                  ? 0.0
                                  : static_cast<double>(hits) /
                                        static_cast<double>(out.eligible_users));
  }
  return out;
}

nlohmann::json pilot_report_json(const std::vector<CointeractionSimilarity>& similarity,
                                 const std::vector<SimilarPurchaseProportion>& proportions) {
  nlohmann::json table1 = nlohmann::json::array();
  for (const auto& s : similarity) {
    nlohmann::json row{{"modality", s.modality},
                       {"all_pairs", s.all_pairs_mean},
                       {"all_pairs_sampled", s.all_pairs_sampled},
                       {"co_interacted_pairs", s.co_interacted_pairs}};
    if (s.co_interacted_mean) {
      row["co_interacted"] = *s.co_interacted_mean;
      row["co_interacted_higher"] = *s.co_interacted_mean > s.all_pairs_mean;
    } else {
      row["co_interacted"] = nullptr;
      row["co_interacted_higher"] = nullptr;
    }
    table1.push_back(row);
  }
  nlohmann::json table2 = nlohmann::json::array();
  for (const auto& p : proportions) {
    nlohmann::json by_k = nlohmann::json::object();
    bool monotone = true;
    for (std::size_t t = 0; t < p.k_values.size(); ++t) {
      by_k[std::to_string(p.k_values[t])] = p.proportions[t];
      if (t > 0 && p.k_values[t] >= p.k_values[t - 1] && p.proportions[t] < p.proportions[t - 1]) {
        monotone = false;
      }
    }
    table2.push_back({{"modality", p.modality},
                      {"eligible_users", p.eligible_users},
                      {"proportion", by_k},
                      {"monotone_in_k", monotone}});
  }
  return {{"cointeraction_similarity", table1}, {"similar_purchase_proportion", table2}};
}

}  // namespace micro
