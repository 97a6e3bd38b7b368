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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "micro/error.hpp"
#include "micro/features.hpp"
#include "micro/interactions.hpp"
#include "micro/pilot.hpp"
#include "micro/sampler.hpp"
#include "micro/split.hpp"
#include "micro/synthetic.hpp"
#include "test_util.hpp"

using namespace micro;
using micro::testing::TempDir;
using micro::testing::write_file;

namespace {

InteractionTable table_of(std::size_t users, std::size_t items,
                          std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
  std::vector<Interaction> xs;
  for (auto [u, i] : pairs) xs.push_back({u, i, SplitTag::kTrain});
  return InteractionTable::build(users, items, xs);
}

// Rank by Gaussian elimination with partial pivoting.
std::size_t numeric_rank(DenseMatrix m, double tol = 1e-9) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t piv = rank;
    for (std::size_t r = rank; r < m.rows(); ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    if (std::abs(m(piv, c)) < tol) continue;
    for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m(rank, k), m(piv, k));
    for (std::size_t r = rank + 1; r < m.rows(); ++r) {
      const double f = m(r, c) / m(rank, c);
      for (std::size_t k = c; k < m.cols(); ++k) m(r, k) -= f * m(rank, k);
    }
    ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("load_interactions") {
  TempDir dir;
  write_file(dir / "a.tsv", "a\tx\na\ty\nb\tz\n");
  const auto loaded = load_interactions(dir / "a.tsv");
  CHECK(loaded.table.num_users() == 2);
  CHECK(loaded.table.num_items() == 3);
  CHECK(loaded.table.size() == 3);
  CHECK(loaded.table.item_ids == std::vector<std::string>{"x", "y", "z"});

  write_file(dir / "empty.tsv", "");
  CHECK_THROWS_AS(load_interactions(dir / "empty.tsv"), Error);

  write_file(dir / "dup.tsv", "a\tx\na\tx\n");
  const auto dup = load_interactions(dir / "dup.tsv");
  CHECK(dup.table.size() == 1);
  CHECK(dup.duplicates == 1);

  write_file(dir / "bad.tsv", "a\tx\nno-tab-here\n");
  try {
    load_interactions(dir / "bad.tsv");
    FAIL("malformed line accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_interactions(dir / "missing.tsv"), Error);

  // Manifest fixes the item order and rejects unknown ids.
  const auto with_manifest = load_interactions(dir / "a.tsv", {"z", "y", "x", "w"});
  CHECK(with_manifest.table.num_items() == 4);
  CHECK(with_manifest.table.is_positive(1, 0));
  CHECK_THROWS_AS(load_interactions(dir / "a.tsv", {"x"}), Error);
}

TEST_CASE("interaction round trip") {
  TempDir dir;
  SyntheticSpec spec;
  spec.users = 20;
  spec.items = 30;
  const auto ds = generate_synthetic(spec);
  write_interactions(dir / "i.tsv", ds.table);
  write_manifest(dir / "m.txt", ds.table.item_ids);
  const auto back = load_interactions(dir / "i.tsv", load_manifest(dir / "m.txt"));
  CHECK(back.table.size() == ds.table.size());
  for (std::size_t n = 0; n < back.table.size(); ++n) {
    CHECK(back.table.all()[n].user == ds.table.all()[n].user);
    CHECK(back.table.all()[n].item == ds.table.all()[n].item);
  }
}

TEST_CASE("feature files") {
  TempDir dir;
  const DenseMatrix m = DenseMatrix::from_rows({{1.5, -2.0}, {0.25, 3.0}, {1e-3, 7.0}});
  write_features_mfv(dir / "f.mfv", m);
  CHECK(load_features(dir / "f.mfv", "visual", 3).values == m);
  write_features_csv(dir / "f.csv", m);
  CHECK(load_features(dir / "f.csv", "visual").values == m);
  write_features_mfv(dir / "f4.mfv", m, 4);
  const auto f4 = load_features(dir / "f4.mfv", "v");
  CHECK(f4.values(0, 0) == 1.5);
  CHECK(f4.values(2, 0) == doctest::Approx(1e-3).epsilon(1e-6));

  CHECK_THROWS_AS(load_features(dir / "f.mfv", "visual", 4), Error);
  write_features_csv(dir / "zero.csv", DenseMatrix::from_rows({{1, 1}, {0, 0}}));
  CHECK_THROWS_AS(load_features(dir / "zero.csv", "v"), Error);
  write_file(dir / "nan.csv", "1,nan\n2,3\n");
  CHECK_THROWS_AS(load_features(dir / "nan.csv", "v"), Error);
  CHECK_THROWS_AS(load_features(dir / "none.mfv", "v"), Error);
}

TEST_CASE("warm split") {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t i = 0; i < 10; ++i) pairs.emplace_back(0, i);
  pairs.emplace_back(1, 0);
  pairs.emplace_back(1, 1);
  const auto t = table_of(2, 12, pairs);
  SplitSpec spec;
  const auto s = make_warm_split(t, spec);
  CHECK(s.table.count_tagged(0, SplitTag::kTrain) == 8);
  CHECK(s.table.count_tagged(0, SplitTag::kValid) == 1);
  CHECK(s.table.count_tagged(0, SplitTag::kTest) == 1);
  CHECK(s.table.count_tagged(1, SplitTag::kTrain) == 2);
  CHECK(s.warnings == 1);

  const auto again = make_warm_split(t, spec);
  for (std::size_t n = 0; n < t.size(); ++n) CHECK(again.table.all()[n].tag == s.table.all()[n].tag);

  spec.train_ratio = 0.5;
  CHECK_THROWS_AS(make_warm_split(t, spec), Error);
}

TEST_CASE("warm split ratios follow floor rule") {
  SyntheticSpec syn;
  const auto ds = generate_synthetic(syn);
  const auto s = make_warm_split(ds.table, SplitSpec{});
  for (std::size_t u = 0; u < ds.table.num_users(); ++u) {
    const std::size_t n = ds.table.of_user(u).size();
    const auto nv = static_cast<std::size_t>(std::floor(n * 0.1 + 1e-9));
    CHECK(s.table.count_tagged(u, SplitTag::kValid) == nv);
    CHECK(s.table.count_tagged(u, SplitTag::kTest) == nv);
    CHECK(s.table.count_tagged(u, SplitTag::kTrain) == n - 2 * nv);
  }
}

TEST_CASE("cold split") {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t u = 0; u < 5; ++u)
    for (std::uint32_t i = 0; i < 10; i += 1 + u % 2) pairs.emplace_back(u, i);
  const auto t = table_of(5, 10, pairs);
  SplitSpec spec;
  spec.mode = SplitMode::kCold;
  const auto s = make_cold_split(t, spec);
  CHECK(s.cold_valid_items.size() == 1);
  CHECK(s.cold_test_items.size() == 1);
  for (const auto& x : s.table.all()) {
    if (s.is_cold_item(x.item)) {
      CHECK(x.tag != SplitTag::kTrain);
    } else {
      CHECK(x.tag == SplitTag::kTrain);
    }
  }
  spec.cold_fraction = 0.05;
  CHECK_THROWS_AS(make_cold_split(t, spec), Error);

  const auto json = nlohmann::json::parse(s.to_json());
  CHECK(json["seed"] == 2022);
  CHECK(json["cold_items"]["test"].size() == 1);
}

TEST_CASE("sample_triples contracts") {
  SyntheticSpec syn;
  const auto ds = generate_synthetic(syn);
  const auto s = make_warm_split(ds.table, SplitSpec{});
  Rng rng(5);
  const TripleBatch b = sample_triples(s.table, 1024, rng);
  CHECK(b.size() == 1024);
  for (std::size_t n = 0; n < b.size(); ++n) {
    const auto train = s.table.items_tagged(b.users[n], SplitTag::kTrain);
    CHECK(std::binary_search(train.begin(), train.end(), b.positives[n]));
    CHECK_FALSE(s.table.is_positive(b.users[n], b.negatives[n]));
  }
}

TEST_CASE("negatives are uniform over the non-positive set") {
  // One user with items {0..4} positive out of 20: 15 candidate negatives.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t i = 0; i < 5; ++i) pairs.emplace_back(0, i);
  const auto t = table_of(1, 20, pairs);
  const std::size_t draws = 100000;
  // chi-square critical value at 0.01 with 14 degrees of freedom. Over ten
  // independent seeds, two or more exceedances has probability ~0.4%.
  int exceed = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    std::map<std::uint32_t, std::size_t> counts;
    const TripleBatch b = sample_triples(t, draws, rng);
    for (auto j : b.negatives) counts[j] += 1;
    CHECK(counts.size() == 15);
    double chi2 = 0.0;
    const double expected = draws / 15.0;
    for (const auto& [j, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
    exceed += chi2 >= 29.141;
  }
  CHECK(exceed <= 1);
}

TEST_CASE("saturated users are skipped") {
  const auto t = table_of(2, 2, {{0, 0}, {0, 1}, {1, 0}});
  const TripleSampler sampler(t);
  CHECK(sampler.saturated_skipped() == 2);
  CHECK(sampler.train_size() == 1);
  const auto all = table_of(1, 2, {{0, 0}, {0, 1}});
  CHECK_THROWS_AS(TripleSampler{all}, Error);
}

TEST_CASE("synthetic generator") {
  SyntheticSpec spec;
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  CHECK(a.features[0].values == b.features[0].values);
  CHECK(a.table.size() == b.table.size());
  for (std::size_t u = 0; u < a.table.num_users(); ++u) {
    const std::size_t n = a.table.of_user(u).size();
    CHECK(n >= spec.min_interactions);
    CHECK(n <= spec.max_interactions);
  }
  // Co-interacted items are more similar than random pairs in every view.
  for (const auto& f : a.features) {
    const auto sim = pilot_cointeraction_similarity(f, a.table);
    REQUIRE(sim.co_interacted_mean.has_value());
    CHECK(*sim.co_interacted_mean > sim.all_pairs_mean);
  }

  // Without noise every view is an exact linear image of the rank-r factors.
  spec.noise = 0.0;
  const auto clean = generate_synthetic(spec);
  for (const auto& f : clean.features) CHECK(numeric_rank(f.values) == spec.rank);
  CHECK(numeric_rank(a.features[0].values) == a.features[0].dim());

  SyntheticSpec bad;
  bad.items = 0;
  CHECK_THROWS_AS(generate_synthetic(bad), Error);
  bad = SyntheticSpec{};
  bad.rank = 40;
  CHECK_THROWS_AS(generate_synthetic(bad), Error);
}
