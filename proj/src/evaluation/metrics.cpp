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

#include "micro/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "micro/error.hpp"

namespace micro {

namespace {

std::size_t hits_at_k(std::span<const std::uint32_t> ranked,
                      std::span<const std::uint32_t> relevant, std::size_t k) {
  const std::size_t n = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (std::binary_search(relevant.begin(), relevant.end(), ranked[r])) ++hits;
  }
  return hits;
}

}  // namespace

std::vector<std::uint32_t> rank_items(std::span<const double> scores,
                                      std::span<const std::uint32_t> exclusions,
                                      std::size_t limit) {
  std::vector<std::uint32_t> order;
  order.reserve(scores.size());
  for (std::uint32_t i = 0; i < scores.size(); ++i) {
    if (!std::binary_search(exclusions.begin(), exclusions.end(), i)) order.push_back(i);
  }
  const auto before = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  if (limit > 0 && limit < order.size()) {
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(limit),
                      order.end(), before);
    order.resize(limit);
  } else {
    std::sort(order.begin(), order.end(), before);
  }
  return order;
}

double recall_at_k(std::span<const std::uint32_t> ranked,
                   std::span<const std::uint32_t> relevant, std::size_t k) {
  require(k >= 1, "recall@k: k must be >= 1");
  if (relevant.empty()) return 0.0;
  return static_cast<double>(hits_at_k(ranked, relevant, k)) /
         static_cast<double>(relevant.size());
}

double precision_at_k(std::span<const std::uint32_t> ranked,
                      std::span<const std::uint32_t> relevant, std::size_t k) {
  require(k >= 1, "precision@k: k must be >= 1");
  return static_cast<double>(hits_at_k(ranked, relevant, k)) / static_cast<double>(k);
}

double ndcg_at_k(std::span<const std::uint32_t> ranked,
                 std::span<const std::uint32_t> relevant, std::size_t k) {
  require(k >= 1, "ndcg@k: k must be >= 1");
  if (relevant.empty()) return 0.0;
  double dcg = 0.0;
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t r = 0; r < n; ++r) {
    if (std::binary_search(relevant.begin(), relevant.end(), ranked[r])) {
      dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(k, relevant.size());
  for (std::size_t r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / idcg;
}

nlohmann::json MetricReport::to_json() const {
  const std::string suffix = "@" + std::to_string(k);
  return {{"protocol", protocol},
          {"split", split},
          {"k", k},
          {"recall" + suffix, recall},
          {"precision" + suffix, precision},
          {"ndcg" + suffix, ndcg},
          {"users", users}};
}

MetricReport summarize(const RankingResult& result) {
  require(result.ranked.size() == result.relevant.size(),
          "summarize: ranked and relevant lists differ in user count");
  MetricReport report;
  report.k = result.k;
  // Ordered reduction keeps the averages bit-stable.
  for (std::size_t u = 0; u < result.ranked.size(); ++u) {
    const auto& rel = result.relevant[u];
    if (rel.empty()) continue;
    report.recall += recall_at_k(result.ranked[u], rel, result.k);
    report.precision += precision_at_k(result.ranked[u], rel, result.k);
    report.ndcg += ndcg_at_k(result.ranked[u], rel, result.k);
    report.users += 1;
  }
  if (report.users > 0) {
    const double n = static_cast<double>(report.users);
    report.recall /= n;
    report.precision /= n;
    report.ndcg /= n;
  }
  return report;
}

std::vector<MetricReport> evaluate_scores(const DenseMatrix& scores,
                                          const InteractionTable& table, SplitTag target,
                                          std::span<const std::size_t> ks,
                                          const std::string& protocol) {
  if (scores.rows() != table.num_users() || scores.cols() != table.num_items()) {
    fail_incompatible("evaluate: score matrix is " + std::to_string(scores.rows()) + "x" +
                      std::to_string(scores.cols()) + " but dataset has " +
                      std::to_string(table.num_users()) + " users and " +
                      std::to_string(table.num_items()) + " items");
  }
  require(!ks.empty(), "evaluate: no k values");
  const std::size_t k_max = *std::max_element(ks.begin(), ks.end());

  RankingResult base;
  for (std::size_t u = 0; u < table.num_users(); ++u) {
    const auto train = table.items_tagged(u, SplitTag::kTrain);
    auto relevant = table.items_tagged(u, target);
    if (train.empty() || relevant.empty()) continue;
    base.ranked.push_back(rank_items(scores.row(u), train, k_max));
    base.relevant.push_back(std::move(relevant));
  }

  std::vector<MetricReport> reports;
  for (const std::size_t k : ks) {
    base.k = k;
    MetricReport r = summarize(base);
    r.protocol = protocol;
    r.split = to_string(target);
    reports.push_back(r);
  }
  return reports;
}

}  // namespace micro
