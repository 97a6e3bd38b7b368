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

#include "micro/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "micro/error.hpp"
#include "micro/rng.hpp"

namespace micro {

void SyntheticSpec::validate() const {
  require(users >= 10 && items >= 10, "synthetic: need at least 10 users and 10 items");
  require(!modalities.empty(), "synthetic: at least one modality");
  require(rank >= 1, "synthetic: latent rank must be >= 1");
  for (const auto& [name, dim] : modalities) {
    require(!name.empty(), "synthetic: modality name must be nonempty");
    require(rank <= dim, "synthetic: rank " + std::to_string(rank) + " exceeds dim of '" +
                             name + "' (" + std::to_string(dim) + ")");
  }
  require(noise >= 0.0, "synthetic: noise must be nonnegative");
  require(min_interactions >= 1 && min_interactions <= max_interactions &&
              max_interactions < items,
          "synthetic: need 1 <= min_interactions <= max_interactions < items");
  require(pool_factor >= 1.0, "synthetic: pool factor must be >= 1");
}

namespace {

DenseMatrix gaussian(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal(0.0, stddev);
  return m;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticDataset out;
  Rng factor_rng = Rng::stream(spec.seed, "synthetic-factors");
  out.user_factors = gaussian(spec.users, spec.rank, 1.0, factor_rng);
  out.item_factors = gaussian(spec.items, spec.rank, 1.0, factor_rng);
  const DenseMatrix scores = matmul_nt(out.user_factors, out.item_factors);

  std::vector<Interaction> pairs;
  Rng pick_rng = Rng::stream(spec.seed, "synthetic-interactions");
  std::vector<std::uint32_t> order(spec.items);
  for (std::size_t u = 0; u < spec.users; ++u) {
    const std::size_t n_u =
        spec.min_interactions + pick_rng.index(spec.max_interactions - spec.min_interactions + 1);
    const std::size_t pool = std::min(
        spec.items, static_cast<std::size_t>(std::ceil(spec.pool_factor * n_u)));
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return scores(u, a) > scores(u, b);
    });
    std::vector<std::uint32_t> candidates(order.begin(), order.begin() + pool);
    std::shuffle(candidates.begin(), candidates.end(), pick_rng.engine());
    for (std::size_t k = 0; k < n_u; ++k) {
      pairs.push_back({static_cast<std::uint32_t>(u), candidates[k], SplitTag::kTrain});
    }
  }
  out.table = InteractionTable::build(spec.users, spec.items, std::move(pairs));
  for (std::size_t u = 0; u < spec.users; ++u) {
    out.table.user_ids.push_back("u" + std::to_string(u));
  }
  for (std::size_t i = 0; i < spec.items; ++i) {
    out.table.item_ids.push_back("i" + std::to_string(i));
  }

  for (const auto& [name, dim] : spec.modalities) {
    Rng view_rng = Rng::stream(spec.seed, "synthetic-view-" + name);
    const DenseMatrix map = gaussian(spec.rank, dim, 1.0 / std::sqrt(double(spec.rank)), view_rng);
    FeatureMatrix f{name, matmul(out.item_factors, map)};
    if (spec.noise > 0.0) {
      for (double& v : f.values.values()) v += view_rng.normal(0.0, spec.noise);
    }
    validate_features(f);
    out.features.push_back(std::move(f));
  }
  return out;
}

}  // namespace micro
