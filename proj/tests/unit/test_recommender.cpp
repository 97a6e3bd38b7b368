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

#include <cmath>

#include "micro/checkpoint.hpp"
#include "micro/error.hpp"
#include "micro/evaluate.hpp"
#include "micro/gradcheck.hpp"
#include "micro/model.hpp"
#include "micro/split.hpp"
#include "micro/synthetic.hpp"
#include "micro/trainer.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace micro;

namespace {

struct Toy {
  SplitResult split;
  std::vector<FeatureMatrix> features;
};

// 8 users, 12 items, visual width 6, textual width 5.
Toy make_toy(std::uint64_t seed = 1) {
  SyntheticSpec spec;
  spec.users = 10;
  spec.items = 12;
  spec.modalities = {{"visual", 6}, {"textual", 5}};
  spec.rank = 3;
  spec.min_interactions = 3;
  spec.max_interactions = 6;
  spec.seed = seed;
  SyntheticDataset ds = generate_synthetic(spec);
  // Keep the first 8 users.
  std::vector<Interaction> xs;
  for (const auto& x : ds.table.all()) {
    if (x.user < 8) xs.push_back(x);
  }
  InteractionTable t = InteractionTable::build(8, 12, xs);
  return {make_warm_split(t, SplitSpec{}), ds.features};
}

TrainerConfig toy_config() {
  TrainerConfig c;
  c.dim = 4;
  c.k = 3;
  c.layers = 2;
  c.batch_size = 16;
  return c;
}

TripleBatch toy_batch(const InteractionTable& t, std::uint64_t seed, std::size_t n = 16) {
  Rng rng(seed);
  return sample_triples(t, n, rng);
}

GradCheckReport check_model(const MicroModel& model, const TripleBatch& batch) {
  const LossFunction f = [&](const ParameterSet& p, ParameterSet* g) {
    return model.loss(p, batch, g).total;
  };
  return finite_difference_check(f, model.params());
}

}  // namespace

TEST_CASE("backbones") {
  Rng rng(1);
  const Toy toy = make_toy();
  const auto& t = toy.split.table;
  const DenseMatrix xu = oracle::random_matrix(8, 4, rng);
  const DenseMatrix xi = oracle::random_matrix(12, 4, rng);
  const SparseMatrix bip = bipartite_adjacency(t);

  const BackboneForward mf = cf_forward(Backbone::kMF, 2, bip, xu, xi);
  CHECK(mf.users == xu);
  CHECK(mf.items == xi);
  const BackboneForward zero = cf_forward(Backbone::kLightGCN, 0, bip, xu, xi);
  CHECK(zero.users == xu);
  CHECK(zero.items == xi);

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& x : t.all())
    if (x.tag == SplitTag::kTrain) edges.emplace_back(x.user, x.item);
  for (int layers : {1, 2, 3}) {
    const BackboneForward lg = cf_forward(Backbone::kLightGCN, layers, bip, xu, xi);
    const auto [ru, ri] =
        oracle::lightgcn(8, 12, edges, oracle::to_mat(xu), oracle::to_mat(xi), layers);
    CHECK(oracle::max_diff(ru, lg.users) < 1e-13);
    CHECK(oracle::max_diff(ri, lg.items) < 1e-13);
  }

  // 1 user - 1 item: one layer swaps the two embeddings, the mean halves them.
  const InteractionTable one = InteractionTable::build(1, 1, {{0, 0, SplitTag::kTrain}});
  const DenseMatrix u = DenseMatrix::from_rows({{1.0, 0.0}});
  const DenseMatrix i = DenseMatrix::from_rows({{0.0, 2.0}});
  const BackboneForward o = cf_forward(Backbone::kLightGCN, 1, bipartite_adjacency(one), u, i);
  CHECK(o.users == DenseMatrix::from_rows({{0.5, 1.0}}));
  CHECK(o.items == DenseMatrix::from_rows({{0.5, 1.0}}));
}

TEST_CASE("lightgcn backward") {
  Rng rng(2);
  const Toy toy = make_toy();
  const SparseMatrix bip = bipartite_adjacency(toy.split.table);
  ParameterSet p;
  p.add("u", oracle::random_matrix(8, 3, rng));
  p.add("i", oracle::random_matrix(12, 3, rng));
  const DenseMatrix wu = oracle::random_matrix(8, 3, rng);
  const DenseMatrix wi = oracle::random_matrix(12, 3, rng);
  const LossFunction f = [&](const ParameterSet& x, ParameterSet* g) {
    const BackboneForward fw = cf_forward(Backbone::kLightGCN, 2, bip, x.get("u"), x.get("i"));
    double s = 0.0;
    for (std::size_t q = 0; q < wu.size(); ++q) s += wu.data()[q] * fw.users.data()[q];
    for (std::size_t q = 0; q < wi.size(); ++q) s += wi.data()[q] * fw.items.data()[q];
    if (g) {
      const BackboneGrads bg = cf_backward(Backbone::kLightGCN, 2, bip, wu, wi);
      g->get("u") = bg.users;
      g->get("i") = bg.items;
    }
    return s;
  };
  CHECK(finite_difference_check(f, p).passed());
}

TEST_CASE("enhance, score and bpr") {
  Rng rng(3);
  const DenseMatrix items = oracle::random_matrix(6, 4, rng);
  const DenseMatrix fused = oracle::random_matrix(6, 4, rng);
  const DenseMatrix x = enhance_items(items, fused);
  for (std::size_t i = 0; i < 6; ++i) {
    double d = 0.0;
    for (std::size_t c = 0; c < 4; ++c) d += (x(i, c) - items(i, c)) * (x(i, c) - items(i, c));
    CHECK(std::abs(std::sqrt(d) - 1.0) < 1e-12);
  }
  DenseMatrix unit = fused;
  for (std::size_t i = 0; i < 6; ++i) {
    const double n = norm2(unit.row(i));
    for (double& v : unit.row(i)) v /= n;
  }
  const DenseMatrix xu = enhance_items(items, unit);
  for (std::size_t t = 0; t < items.size(); ++t)
    CHECK(std::abs(xu.data()[t] - (items.data()[t] + unit.data()[t])) < 1e-15);
  DenseMatrix zero_row = fused;
  for (double& v : zero_row.row(2)) v = 0.0;
  try {
    enhance_items(items, zero_row);
    FAIL("zero-norm fused row accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumerical);
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }

  CFOutput cf{oracle::random_matrix(3, 4, rng), items, x};
  const DenseMatrix s = score_matrix(cf);
  for (std::size_t u = 0; u < 3; ++u) {
    for (std::size_t i = 0; i < 6; ++i) {
      double naive = 0.0;
      for (std::size_t c = 0; c < 4; ++c) naive += cf.users(u, c) * cf.enhanced(i, c);
      CHECK(std::abs(score(cf, u, i) - naive) < 1e-12);
      CHECK(std::abs(s(u, i) - naive) < 1e-12);
    }
  }
  CFOutput z{DenseMatrix(1, 4), items, x};
  for (std::size_t i = 0; i < 6; ++i) CHECK(score(z, 0, i) == 0.0);
  CFOutput e1{DenseMatrix::from_rows({{1, 0}}), DenseMatrix(1, 2),
              DenseMatrix::from_rows({{1, 0}})};
  CHECK(score(e1, 0, 0) == 1.0);

  const std::vector<double> pos{0.3}, neg{0.3};
  CHECK(bpr_loss(pos, neg) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const std::vector<double> big{20.0}, nil{0.0};
  CHECK(bpr_loss(big, nil) == doctest::Approx(2.0611536e-9).epsilon(1e-6));
  CHECK(std::isfinite(bpr_loss(std::vector<double>{-800.0}, nil)));

  std::vector<double> p3{0.5, -1.0, 2.0}, n3{0.1, 0.4, -3.0}, dp(3), dn(3);
  bpr_loss(p3, n3, dp, dn);
  for (std::size_t b = 0; b < 3; ++b) {
    const double sig = 1.0 / (1.0 + std::exp(p3[b] - n3[b]));
    CHECK(dp[b] == doctest::Approx(-sig / 3.0).epsilon(1e-12));
    CHECK(dn[b] == doctest::Approx(sig / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("total loss") {
  CHECK(total_loss(0.7, 2.0, 0.0).total == 0.7);
  CHECK(total_loss(0.7, 2.0, 0.03).total == doctest::Approx(0.76).epsilon(1e-15));
  CHECK(TrainerConfig{}.beta == 0.03);
  CHECK_THROWS_AS(total_loss(0.7, 2.0, -1.0), Error);
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const double b = rng.uniform(0, 2), c = rng.uniform(0, 5), b1 = rng.uniform(0, 1),
                 b2 = rng.uniform(0, 1);
    const LossReport r = total_loss(b, c, b1);
    CHECK(std::abs(r.total - (r.bpr + r.beta * r.contrastive)) <= 1e-12);
    CHECK(std::abs((total_loss(b, c, b1).total - total_loss(b, c, b2).total) - (b1 - b2) * c) <
          1e-12);
  }
}

TEST_CASE("trainer config defaults and validation") {
  const TrainerConfig c;
  CHECK(c.dim == 64);
  CHECK(c.learning_rate == 0.0005);
  CHECK(c.l2 == 1e-4);
  CHECK(c.batch_size == 1024);
  CHECK(c.k == 10);
  CHECK(c.lambda == 0.7);
  CHECK(c.tau == 0.5);
  CHECK(c.layers == 1);
  CHECK(c.patience == 10);
  TrainerConfig bad = c;
  bad.cf_plus_feats = bad.micro_over_feats = true;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.lambda = 1.2;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.beta = -0.1;
  CHECK_THROWS_AS(bad.validate(), Error);
  const TrainerConfig round = TrainerConfig::from_json(c.to_json());
  CHECK(round.to_json() == c.to_json());
}

TEST_CASE("full-model gradient check on the toy instance") {
  const Toy toy = make_toy();
  for (const Backbone backbone : {Backbone::kMF, Backbone::kLightGCN}) {
    for (const bool symmetric : {false, true}) {
      TrainerConfig c = toy_config();
      c.backbone = backbone;
      c.symmetric_negatives = symmetric;
      const MicroModel model(c, toy.split.table, toy.features);
      const auto rep = check_model(model, toy_batch(toy.split.table, 5));
      INFO(to_string(backbone), " symmetric=", symmetric, "\n", rep.summary());
      CHECK(rep.passed());
    }
  }
}

TEST_CASE("variant gradient checks") {
  const Toy toy = make_toy(2);
  auto run = [&](TrainerConfig c) {
    const MicroModel model(c, toy.split.table, toy.features);
    const auto rep = check_model(model, toy_batch(toy.split.table, 9));
    INFO(to_string(c.variant()), "\n", rep.summary());
    CHECK(rep.passed());
  };
  TrainerConfig c = toy_config();
  c.cf_plus_feats = true;
  run(c);
  c = toy_config();
  c.micro_over_feats = true;
  run(c);
  c = toy_config();
  c.no_contrast = true;
  run(c);
  c = toy_config();
  c.k = 0;
  run(c);
  c = toy_config();
  c.separate_item_table = true;
  c.backbone = Backbone::kLightGCN;
  run(c);
  c = toy_config();
  c.lambda = 0.0;
  c.keep_self_loops = false;
  run(c);
  c = toy_config();
  c.lambda = 1.0;
  run(c);
  c = toy_config();
  c.contrast_scope = ContrastScope::kFullCatalog;
  run(c);
}

TEST_CASE("variant wiring audit") {
  const Toy toy = make_toy();
  TrainerConfig c = toy_config();
  const MicroModel micro(c, toy.split.table, toy.features);
  c.micro_over_feats = true;
  const MicroModel over(c, toy.split.table, toy.features);
  CHECK(over.params().same_layout(micro.params()));
  CHECK(over.params().scalar_count() == micro.params().scalar_count());

  c = toy_config();
  c.k = 0;
  const MicroModel cf(c, toy.split.table, toy.features);
  CHECK(cf.params().size() == 2);
  CHECK(cf.initial_graphs().empty());

  c = toy_config();
  c.cf_plus_feats = true;
  const MicroModel feats(c, toy.split.table, toy.features);
  CHECK(feats.initial_graphs().empty());
  CHECK(feats.params().same_layout(micro.params()));
}

TEST_CASE("no_contrast equals beta = 0") {
  const Toy toy = make_toy();
  TrainerConfig a = toy_config();
  a.no_contrast = true;
  TrainerConfig b = toy_config();
  b.beta = 0.0;
  MicroModel ma(a, toy.split.table, toy.features);
  MicroModel mb(b, toy.split.table, toy.features);
  ParameterSet ga = ma.params().zeros_like(), gb = mb.params().zeros_like();
  AdamState sa = AdamState::for_params(ma.params(), {}), sb = sa;
  for (int step = 0; step < 5; ++step) {
    const TripleBatch batch = toy_batch(toy.split.table, 100 + step);
    const double la = ma.loss(batch, &ga).total;
    const double lb = mb.loss(batch, &gb).total;
    CHECK(la == lb);
    adam_step(ma.params(), ga, sa);
    adam_step(mb.params(), gb, sb);
  }
  CHECK(ma.params() == mb.params());
}

TEST_CASE("enhanced items stay a unit step away from the backbone") {
  const Toy toy = make_toy();
  const MicroModel model(toy_config(), toy.split.table, toy.features);
  const CFOutput out = model.infer();
  for (std::size_t i = 0; i < out.items.rows(); ++i) {
    double d = 0.0;
    for (std::size_t c = 0; c < out.items.cols(); ++c) {
      const double v = out.enhanced(i, c) - out.items(i, c);
      d += v * v;
    }
    CHECK(std::abs(std::sqrt(d) - 1.0) < 1e-12);
  }
}

TEST_CASE("uniform propagation closed form") {
  // beta = 0, lambda = 1, k >= N, identical features: every row of A is
  // uniform, so one layer replaces each item by the mean embedding.
  const std::size_t n = 6;
  std::vector<Interaction> xs;
  for (std::uint32_t u = 0; u < 3; ++u)
    for (std::uint32_t i = u; i < n; i += 2) xs.push_back({u, i, SplitTag::kTrain});
  const InteractionTable t = InteractionTable::build(3, n, xs);
  std::vector<FeatureMatrix> feats{{"visual", DenseMatrix(n, 3, 1.0)}};
  TrainerConfig c = toy_config();
  c.beta = 0.0;
  c.lambda = 1.0;
  c.k = n;
  c.layers = 1;
  const MicroModel model(c, t, feats);
  const ItemTower tower = model.item_tower(model.params());
  const DenseMatrix& x = model.params().get("item_embedding");
  DenseMatrix mean(1, x.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t col = 0; col < x.cols(); ++col) mean(0, col) += x(i, col) / n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t col = 0; col < x.cols(); ++col)
      CHECK(std::abs(tower.modality_out[0](i, col) - mean(0, col)) < 1e-14);
}

TEST_CASE("training improves validation recall and is deterministic") {
  SyntheticSpec spec;
  const SyntheticDataset ds = generate_synthetic(spec);
  const SplitResult split = make_warm_split(ds.table, SplitSpec{});
  TrainerConfig c;
  c.dim = 16;
  c.max_epochs = 30;
  c.learning_rate = 0.01;
  MicroModel m1(c, split.table, ds.features);
  const TrainResult r1 = train(m1, split.table);
  REQUIRE_FALSE(r1.abort_reason.has_value());
  const double initial = r1.records.front()["metrics"]["recall@20"].get<double>();
  CHECK(r1.best.recall > initial);
  CHECK(r1.best.epoch >= 1);

  MicroModel m2(c, split.table, ds.features);
  const TrainResult r2 = train(m2, split.table);
  CHECK(r1.records == r2.records);
  CHECK(m1.params() == m2.params());
}

TEST_CASE("patience stops training and keeps the earlier best") {
  SyntheticSpec spec;
  const SyntheticDataset ds = generate_synthetic(spec);
  const SplitResult split = make_warm_split(ds.table, SplitSpec{});
  TrainerConfig c;
  c.dim = 8;
  c.k = 0;
  c.learning_rate = 0.05;
  c.patience = 3;
  c.max_epochs = 200;
  MicroModel m(c, split.table, ds.features);
  const TrainResult r = train(m, split.table);
  CHECK(r.early_stopped);
  CHECK(r.epochs_run == r.best.epoch + 3);
  CHECK(m.params() == r.best_params);
  for (const auto& rec : r.records) {
    if (rec.contains("metrics") && rec["epoch"].get<std::size_t>() > r.best.epoch) {
      CHECK(rec["metrics"]["recall@20"].get<double>() <= r.best.recall);
    }
  }
}

TEST_CASE("checkpoint round trip and compatibility") {
  micro::testing::TempDir dir;
  const Toy toy = make_toy();
  MicroModel model(toy_config(), toy.split.table, toy.features);
  Checkpoint ck{checkpoint_config(model), model.params(),
                AdamState::for_params(model.params(), {}), {3, 0.25, 20}};
  ck.adam.step = 7;
  write_checkpoint(dir / "a.mck", ck);
  const Checkpoint back = read_checkpoint(dir / "a.mck");
  CHECK(back.params == ck.params);
  CHECK(back.adam.step == 7);
  CHECK(back.adam.first_moment == ck.adam.first_moment);
  CHECK(back.best.epoch == 3);
  CHECK(back.best.recall == 0.25);
  CHECK(back.config == ck.config);
  const std::string bytes = micro::testing::read_file(dir / "a.mck");
  CHECK(bytes.substr(0, 4) == "MCK1");

  const MicroModel restored = restore_model(back, toy.split.table, toy.features);
  CHECK(restored.params() == model.params());

  const InteractionTable other = InteractionTable::build(8, 13, {{0, 0, SplitTag::kTrain}});
  try {
    restore_model(back, other, toy.features);
    FAIL("item count mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIncompatible);
  }
  micro::testing::write_file(dir / "bad.mck", "MCK1\x02\x00\x00\x00");
  try {
    read_checkpoint(dir / "bad.mck");
    FAIL("bad version accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIncompatible);
  }
}
