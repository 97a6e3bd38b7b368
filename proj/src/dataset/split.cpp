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

#include "micro/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "micro/error.hpp"
#include "micro/rng.hpp"

namespace micro {

void SplitSpec::validate() const {
  require(train_ratio >= 0 && valid_ratio >= 0 && test_ratio >= 0,
          "split ratios must be nonnegative");
  require(std::abs(train_ratio + valid_ratio + test_ratio - 1.0) < 1e-9,
          "split ratios must sum to 1");
  require(cold_fraction > 0.0 && cold_fraction < 1.0, "cold fraction must lie in (0, 1)");
}

bool SplitResult::is_cold_item(std::uint32_t item) const {
  return std::binary_search(cold_valid_items.begin(), cold_valid_items.end(), item) ||
         std::binary_search(cold_test_items.begin(), cold_test_items.end(), item);
}

std::string SplitResult::to_json() const {
  auto ids = [this](const std::vector<std::uint32_t>& items) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto i : items) {
      if (table.item_ids.empty()) {
        arr.push_back(std::to_string(i));
      } else {
        arr.push_back(table.item_ids[i]);
      }
    }
    return arr;
  };
  nlohmann::json j;
  j["seed"] = spec.seed;
  j["spec"] = {{"mode", spec.mode == SplitMode::kWarm ? "warm" : "cold"},
               {"train", spec.train_ratio},
               {"valid", spec.valid_ratio},
               {"test", spec.test_ratio},
               {"cold_fraction", spec.cold_fraction}};
  j["counts"] = {{"train", table.count_tagged(SplitTag::kTrain)},
                 {"valid", table.count_tagged(SplitTag::kValid)},
                 {"test", table.count_tagged(SplitTag::kTest)}};
  j["cold_items"] = {{"valid", ids(cold_valid_items)}, {"test", ids(cold_test_items)}};
  j["warnings"] = warnings;
  return j.dump(2);
}

SplitResult make_warm_split(const InteractionTable& table, const SplitSpec& spec) {
  spec.validate();
  require(spec.mode == SplitMode::kWarm, "make_warm_split: spec mode must be warm");
  SplitResult out{table, spec, {}, {}, 0};
  for (std::size_t u = 0; u < table.num_users(); ++u) {
    auto row = out.table.of_user(u);
    for (auto& x : row) x.tag = SplitTag::kTrain;
    const std::size_t n = row.size();
    if (n < 3) {
      out.warnings += 1;
      continue;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng::stream(spec.seed, "warm-split", u);
    std::shuffle(order.begin(), order.end(), rng.engine());
    // Tiny epsilon so that e.g. 10 * 0.1 floors to 1, not 0.
    const auto n_valid = static_cast<std::size_t>(std::floor(n * spec.valid_ratio + 1e-9));
    const auto n_test = static_cast<std::size_t>(std::floor(n * spec.test_ratio + 1e-9));
    for (std::size_t k = 0; k < n_valid; ++k) row[order[k]].tag = SplitTag::kValid;
    for (std::size_t k = n_valid; k < n_valid + n_test; ++k) row[order[k]].tag = SplitTag::kTest;
  }
  return out;
}

SplitResult make_cold_split(const InteractionTable& table, const SplitSpec& spec) {
  spec.validate();
  require(spec.mode == SplitMode::kCold, "make_cold_split: spec mode must be cold");
  const std::size_t n_items = table.num_items();
  const auto n_cold =
      static_cast<std::size_t>(std::floor(n_items * spec.cold_fraction + 1e-9));
  require(n_cold >= 1, "cold split selects no items: " + std::to_string(n_items) +
                           " items x fraction " + std::to_string(spec.cold_fraction));

  std::vector<std::uint32_t> items(n_items);
  std::iota(items.begin(), items.end(), 0u);
  Rng rng = Rng::stream(spec.seed, "cold-split");
  std::shuffle(items.begin(), items.end(), rng.engine());

  SplitResult out{table, spec, {}, {}, 0};
  const std::size_t n_valid = n_cold / 2;
  out.cold_valid_items.assign(items.begin(), items.begin() + n_valid);
  out.cold_test_items.assign(items.begin() + n_valid, items.begin() + n_cold);
  std::sort(out.cold_valid_items.begin(), out.cold_valid_items.end());
  std::sort(out.cold_test_items.begin(), out.cold_test_items.end());

  std::vector<SplitTag> tag_of(n_items, SplitTag::kTrain);
  for (auto i : out.cold_valid_items) tag_of[i] = SplitTag::kValid;
  for (auto i : out.cold_test_items) tag_of[i] = SplitTag::kTest;
  for (std::size_t u = 0; u < table.num_users(); ++u) {
    bool has_train = false;
    for (auto& x : out.table.of_user(u)) {
      x.tag = tag_of[x.item];
      has_train = has_train || x.tag == SplitTag::kTrain;
    }
    if (!has_train && !out.table.of_user(u).empty()) out.warnings += 1;
  }
  return out;
}

SplitResult make_split(const InteractionTable& table, const SplitSpec& spec) {
  return spec.mode == SplitMode::kWarm ? make_warm_split(table, spec)
                                       : make_cold_split(table, spec);
}

}  // namespace micro
