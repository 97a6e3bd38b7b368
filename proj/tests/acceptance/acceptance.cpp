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

// Acceptance harness. `micro_acceptance --criterion N` runs one criterion,
// no arguments runs all ten. Each prints one PASS/FAIL line; the exit code
// is nonzero if any selected criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "micro/cli/commands.hpp"
#include "micro/cli/config.hpp"
#include "micro/fusion.hpp"
#include "micro/gradcheck.hpp"
#include "micro/latent_graph.hpp"
#include "micro/losses.hpp"
#include "micro/metrics.hpp"
#include "micro/model.hpp"
#include "micro/pilot.hpp"
#include "micro/split.hpp"
#include "micro/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace micro;

namespace {

// Pinned tolerances.
constexpr double kGradTolerance = 1e-4;
constexpr double kGraphTolerance = 1e-12;
constexpr double kContrastTolerance = 1e-10;
constexpr double kInvariantTolerance = 1e-12;
constexpr double kMfMargin = 1.10;
constexpr int kSeeds = 5;
constexpr int kSeedsRequired = 4;
constexpr int kPropertyCases = 200;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  SyntheticSpec spec;
  spec.users = 10;  // trimmed to 8 below
  spec.items = 12;
  spec.modalities = {{"visual", 6}, {"textual", 5}};
  spec.rank = 3;
  spec.min_interactions = 3;
  spec.max_interactions = 6;
  const SyntheticDataset ds = generate_synthetic(spec);
  std::vector<Interaction> kept;
  for (const Interaction& x : ds.table.all())
    if (x.user < 8) kept.push_back(x);
  const SplitResult split =
      make_warm_split(InteractionTable::build(8, 12, kept), SplitSpec{});
  double worst = 0.0;
  for (const bool symmetric : {false, true}) {
    TrainerConfig c;
    c.dim = 4;
    c.k = 3;
    c.layers = 2;
    c.symmetric_negatives = symmetric;
    const MicroModel model(c, split.table, ds.features);
    Rng rng(17);
    const TripleBatch batch = sample_triples(split.table, 16, rng);
    const LossFunction f = [&](const ParameterSet& p, ParameterSet* g) {
      return model.loss(p, batch, g).total;
    };
    worst = std::max(worst, finite_difference_check(f, model.params()).max_relative_error());
  }
  const double secs = seconds_since(t0);
  return {worst < kGradTolerance && secs < 30.0,
          "max relative error " + fmt(worst) + " (< " + fmt(kGradTolerance) + "), " + fmt(secs) +
              " s"};
}

// ---------------------------------------------------------------- 2

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2);
  double worst = 0.0;
  bool nnz_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.index(63);
    const std::size_t dim = 2 + rng.index(7);  // dim 1 makes every cosine +-1: ulp-level ties
    const std::size_t k = 1 + rng.index(n);
    const bool keep = rng.uniform(0, 1) < 0.5;
    const double lambda = rng.uniform(0, 1);
    const DenseMatrix e = oracle::random_matrix(n, dim, rng);
    const DenseMatrix w = oracle::random_matrix(dim, dim, rng);
    const DenseMatrix b = oracle::random_matrix(1, dim, rng);
    const GraphOptions opt{k, keep};

    const ModalityGraph init = build_initial_graph(e, opt);
    const DenseMatrix et = transform_features(e, w, b);
    const LearnedGraph learned = build_learned_graph(et, opt);
    const BlendedGraph blended = blend_graphs(init.adjacency, learned.adjacency, lambda);

    const auto ref_init = oracle::normalize(oracle::topk(oracle::cosine(oracle::to_mat(e)), k, keep));
    const auto ref_learned =
        oracle::normalize(oracle::topk(oracle::cosine(oracle::to_mat(et)), k, keep));
    const auto ref_blend = oracle::blend(ref_init, ref_learned, lambda);
    worst = std::max({worst, oracle::max_diff(ref_init, init.adjacency.densify()),
                      oracle::max_diff(ref_learned, learned.adjacency.densify()),
                      oracle::max_diff(ref_blend, blended.adjacency.densify())});
    for (const SparseMatrix* a : {&init.adjacency, &learned.adjacency}) {
      for (std::size_t r = 0; r < n; ++r) nnz_ok = nnz_ok && a->row_nnz(r) <= k;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= kGraphTolerance && nnz_ok && secs < 10.0,
          "50 instances, max |diff| " + fmt(worst) + ", row nnz bound " +
              (nnz_ok ? "held" : "violated") + ", " + fmt(secs) + " s"};
}

// ---------------------------------------------------------------- 3

Outcome criterion3() {
  Rng rng(3);
  double worst = 0.0;
  int cases = 0;
  for (const bool symmetric : {false, true}) {
    for (const std::size_t n : {2, 3, 5}) {
      for (const double tau : {0.2, 0.5, 1.0}) {
        for (int rep = 0; rep < 4; ++rep) {
          const std::vector<DenseMatrix> hm{oracle::random_matrix(n, 4, rng),
                                            oracle::random_matrix(n, 4, rng)};
          const DenseMatrix h = oracle::random_matrix(n, 4, rng);
          std::vector<std::uint32_t> all(n);
          std::iota(all.begin(), all.end(), 0u);
          const std::vector<const DenseMatrix*> ptrs{&hm[0], &hm[1]};
          const double got = contrastive_loss(ptrs, h, all, {tau, symmetric});
          const double want = oracle::contrastive({oracle::to_mat(hm[0]), oracle::to_mat(hm[1])},
                                                  oracle::to_mat(h), tau, symmetric);
          worst = std::max(worst, std::abs(got - want));
          ++cases;
        }
      }
    }
  }
  return {worst < kContrastTolerance,
          std::to_string(cases) + " instances, max |diff| " + fmt(worst)};
}

// ---------------------------------------------------------------- 4

Outcome criterion4() {
  using Ids = std::vector<std::uint32_t>;
  struct Case {
    Ids ranked, relevant;
    std::size_t k;
    double recall, precision, ndcg;
  };
  const double l3 = 1.0 / std::log2(3.0), l4 = 1.0 / std::log2(4.0), l5 = 1.0 / std::log2(5.0);
  Ids ranked20(20);
  std::iota(ranked20.begin(), ranked20.end(), 0u);
  const std::vector<Case> cases{
      {{0, 1, 2}, {0}, 20, 1.0, 1.0 / 20, 1.0},
      {{0, 1, 2}, {1}, 20, 1.0, 1.0 / 20, l3},
      {{0, 1, 2}, {2}, 20, 1.0, 1.0 / 20, 0.5},
      {{0, 1, 2}, {3}, 20, 0.0, 0.0, 0.0},
      {{0, 1, 2}, {0, 1}, 20, 1.0, 2.0 / 20, 1.0},
      {{0, 1, 2}, {1, 2}, 20, 1.0, 2.0 / 20, (l3 + 0.5) / (1.0 + l3)},
      {{0, 1, 2}, {0, 2}, 20, 1.0, 2.0 / 20, 1.5 / (1.0 + l3)},
      {{0, 1, 2}, {0, 9}, 20, 0.5, 1.0 / 20, 1.0 / (1.0 + l3)},
      {{0, 1, 2}, {2}, 2, 0.0, 0.0, 0.0},
      {{0, 1, 2}, {1}, 2, 1.0, 0.5, l3},
      {{0, 1, 2}, {0}, 1, 1.0, 1.0, 1.0},
      {{0, 1, 2}, {1}, 1, 0.0, 0.0, 0.0},
      {{0, 1, 2}, {0, 1, 2}, 1, 1.0 / 3, 1.0, 1.0},
      {{0, 1, 2}, {0, 1, 2}, 3, 1.0, 1.0, 1.0},
      {{0, 1, 2, 3}, {3}, 20, 1.0, 1.0 / 20, l5},
      {{0, 1, 2, 3}, {2, 3}, 20, 1.0, 2.0 / 20, (0.5 + l5) / (1.0 + l3)},
      {{4, 3, 2, 1, 0}, {0}, 4, 0.0, 0.0, 0.0},
      {{4, 3, 2, 1, 0}, {0, 1}, 4, 0.5, 0.25, l5 / (1.0 + l3)},
      {{5, 6}, {6, 7, 8}, 2, 1.0 / 3, 0.5, l3 / (1.0 + l3)},
      {ranked20, {19}, 20, 1.0, 1.0 / 20, 1.0 / std::log2(21.0)},
      {ranked20, {19}, 19, 0.0, 0.0, 0.0},
      {ranked20, {2, 3}, 20, 1.0, 0.1, (l4 + l5) / (1.0 + l3)},
  };
  int bad = 0;
  for (const Case& c : cases) {
    const double r = recall_at_k(c.ranked, c.relevant, c.k);
    const double p = precision_at_k(c.ranked, c.relevant, c.k);
    const double n = ndcg_at_k(c.ranked, c.relevant, c.k);
    // Exact up to the last bit of the closed forms.
    const auto same = [](double a, double b) { return std::abs(a - b) <= 1e-15; };
    if (!same(r, c.recall) || !same(p, c.precision) || !same(n, c.ndcg)) ++bad;
  }
  const bool closed = ndcg_at_k(Ids{7, 3}, Ids{3}, 20) == l3 &&
                      precision_at_k(Ids{3}, Ids{3}, 20) == 1.0 / 20.0;
  return {bad == 0 && closed,
          std::to_string(cases.size()) + " cases, " + std::to_string(bad) +
              " mismatches; ndcg(rank 2) = " + fmt(l3) + ", precision(one hit) = 0.05"};
}

// ------------------------------------------------------ 5, 6 and 8

ExperimentConfig synthetic_config(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.set("seed", std::to_string(seed));
  return cfg;
}

Dataset synthetic_data(const ExperimentConfig& cfg) {
  SyntheticDataset ds = generate_synthetic(cfg.synth);
  return {std::move(ds.table), std::move(ds.features)};
}

double recall20(ExperimentConfig cfg, const Dataset& data,
                std::initializer_list<std::pair<const char*, const char*>> overrides) {
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  const RunSummary s = run_experiment(cfg, data);
  for (const auto& r : s.test)
    if (r.k == 20) return r.recall;
  return 0.0;
}

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  int ok = 0;
  std::ostringstream per_seed;
  for (int s = 0; s < kSeeds; ++s) {
    const ExperimentConfig cfg = synthetic_config(2022 + s);
    const Dataset data = synthetic_data(cfg);
    const double micro = recall20(cfg, data, {});
    const double no_c = recall20(cfg, data, {{"no_contrast", "true"}});
    const double feats = recall20(cfg, data, {{"cf_plus_feats", "true"}});
    const double mf = recall20(cfg, data, {{"k", "0"}});
    const bool good = micro >= no_c && micro > feats && feats > mf && micro >= kMfMargin * mf;
    ok += good;
    per_seed << " [" << fmt(micro) << " " << fmt(no_c) << " " << fmt(feats) << " " << fmt(mf)
             << (good ? "]" : " x]");
  }
  const double secs = seconds_since(t0);
  return {ok >= kSeedsRequired && secs < 900.0,
          std::to_string(ok) + "/5 seeds ordered (micro no_contrast cf+feats mf):" +
              per_seed.str() + ", " + fmt(secs) + " s"};
}

Outcome criterion6() {
  int ok = 0;
  std::ostringstream per_seed;
  for (int s = 0; s < kSeeds; ++s) {
    ExperimentConfig cfg = synthetic_config(2022 + s);
    cfg.set("split.mode", "cold");
    const Dataset data = synthetic_data(cfg);
    const double micro = recall20(cfg, data, {});
    const double mf = recall20(cfg, data, {{"k", "0"}});
    ok += micro > mf;
    per_seed << " [" << fmt(micro) << " " << fmt(mf) << "]";
  }
  return {ok >= kSeedsRequired,
          std::to_string(ok) + "/5 seeds with cold micro > mf:" + per_seed.str()};
}

Outcome criterion8() {
  int ok = 0;
  std::ostringstream per_seed;
  for (int s = 0; s < kSeeds; ++s) {
    const ExperimentConfig cfg = synthetic_config(2022 + s);
    const Dataset data = synthetic_data(cfg);
    per_seed << " [";
    double r0 = 0.0, r3 = 0.0;
    for (const char* k : {"0", "3", "5", "10"}) {
      const double r = recall20(cfg, data, {{"k", k}});
      if (std::string(k) == "0") r0 = r;
      if (std::string(k) == "3") r3 = r;
      per_seed << (std::string(k) == "0" ? "" : " ") << "k=" << k << ":" << fmt(r);
    }
    per_seed << "]";
    ok += r3 > r0;
  }
  return {ok >= kSeedsRequired,
          std::to_string(ok) + "/5 seeds with recall(k=3) > recall(k=0):" + per_seed.str()};
}

// ---------------------------------------------------------------- 7

Outcome criterion7() {
  bool ok = true;
  std::ostringstream detail;
  for (int s = 0; s < kSeeds; ++s) {
    const Dataset data = synthetic_data(synthetic_config(2022 + s));
    for (const FeatureMatrix& f : data.features) {
      const auto sim = pilot_cointeraction_similarity(f, data.table);
      const bool higher = sim.co_interacted_mean && *sim.co_interacted_mean > sim.all_pairs_mean;
      const auto prop = pilot_similar_purchase_proportion(f, data.table, {5, 10, 15, 20});
      bool mono = true;
      for (std::size_t q = 1; q < prop.proportions.size(); ++q)
        mono = mono && prop.proportions[q] >= prop.proportions[q - 1];
      ok = ok && higher && mono;
      if (s == 0) {
        detail << " " << f.modality << ": co " << fmt(sim.co_interacted_mean.value_or(0.0))
               << " vs all " << fmt(sim.all_pairs_mean) << ", proportions";
        for (double p : prop.proportions) detail << " " << fmt(p);
      }
    }
  }
  return {ok, "5 seeds, both modalities;" + detail.str()};
}

// ---------------------------------------------------------------- 9

int run_binary(const std::string& args) {
  const int status = std::system((std::string(MICRO_BINARY) + " " + args + " > /dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion9() {
  micro::testing::TempDir dir("micro-accept");
  const std::string data = (dir / "data").string();
  if (run_binary("synth --out " + data + " --set synth.users=80 synth.items=50") != 0)
    return {false, "synth failed"};
  const std::string cfg = data + "/dataset.cfg";
  const std::string common = " --set dim=16 max_epochs=5 lr=0.005 k=5";
  if (run_binary("train -c " + cfg + " -o " + (dir / "a").string() + common) != 0 ||
      run_binary("train -c " + cfg + " -o " + (dir / "b").string() + common) != 0)
    return {false, "train failed"};
  bool same = true;
  for (const char* f : {"metrics.jsonl", "checkpoint.mck", "split.json"}) {
    same = same && micro::testing::read_file(dir / "a" / f) ==
                       micro::testing::read_file(dir / "b" / f);
  }
  return {same, same ? "metrics.jsonl, checkpoint.mck and split.json byte-identical"
                     : "artifacts differ"};
}

// ---------------------------------------------------------------- 10

Outcome criterion10() {
  Rng rng(10);
  double alpha_err = 0.0, unit_err = 0.0, cos_err = 0.0, shift_err = 0.0, beta_err = 0.0;
  for (int t = 0; t < kPropertyCases; ++t) {
    const std::size_t n = 1 + rng.index(10), d = 1 + rng.index(8), m = 1 + rng.index(4);
    std::vector<DenseMatrix> hm;
    for (std::size_t q = 0; q < m; ++q) hm.push_back(oracle::random_matrix(n, d, rng, -3, 3));
    std::vector<const DenseMatrix*> ptrs;
    for (const auto& h : hm) ptrs.push_back(&h);
    const AttentionForward a =
        attention_fuse(ptrs, oracle::random_matrix(1, d, rng, -3, 3),
                       oracle::random_matrix(d, d, rng), oracle::random_matrix(1, d, rng));
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (double w : a.weights.row(i)) s += w;
      alpha_err = std::max(alpha_err, std::abs(s - 1.0));
    }

    const DenseMatrix items = oracle::random_matrix(n, d, rng, -5, 5);
    const DenseMatrix fused = oracle::random_matrix(n, d, rng, -5, 5);
    const DenseMatrix x = enhance_items(items, fused);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += (x(i, c) - items(i, c)) * (x(i, c) - items(i, c));
      unit_err = std::max(unit_err, std::abs(std::sqrt(s) - 1.0));
    }

    const DenseMatrix e = oracle::random_matrix(n + 1, d, rng, 0.1, 1.0);
    DenseMatrix scaled = e;
    for (std::size_t i = 0; i < scaled.rows(); ++i) {
      const double c = std::exp(rng.uniform(-4, 4));
      for (double& v : scaled.row(i)) v *= c;
    }
    cos_err = std::max(cos_err, max_abs_diff(cosine_similarity_block(e, 0, e.rows()),
                                             cosine_similarity_block(scaled, 0, e.rows())));

    std::vector<double> logits(m + 1), shifted(m + 1), p1(m + 1), p2(m + 1);
    const double c = rng.uniform(-50, 50);
    for (std::size_t q = 0; q <= m; ++q) {
      logits[q] = rng.uniform(-5, 5);
      shifted[q] = logits[q] + c;
    }
    softmax(logits, p1);
    softmax(shifted, p2);
    for (std::size_t q = 0; q <= m; ++q) shift_err = std::max(shift_err, std::abs(p1[q] - p2[q]));

    const double bpr = rng.uniform(0, 3), lc = rng.uniform(0, 5);
    const double b1 = rng.uniform(0, 1), b2 = rng.uniform(0, 1);
    const double lhs = total_loss(bpr, lc, b1).total - total_loss(bpr, lc, b2).total;
    beta_err = std::max(beta_err, std::abs(lhs - (b1 - b2) * lc));
  }
  const double worst = std::max({alpha_err, unit_err, cos_err, shift_err, beta_err});
  return {worst < kInvariantTolerance,
          std::to_string(kPropertyCases) + " cases each; max error sum(alpha) " + fmt(alpha_err) +
              ", |xhat - x| " + fmt(unit_err) + ", cosine scale " + fmt(cos_err) +
              ", softmax shift " + fmt(shift_err) + ", beta additivity " + fmt(beta_err)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  int first = 1, last = 10;
  if (argc == 3 && std::string(argv[1]) == "--criterion") {
    first = last = std::atoi(argv[2]);
    if (first < 1 || first > 10) {
      std::cerr << "criterion must be 1..10\n";
      return 2;
    }
  } else if (argc != 1) {
    std::cerr << "usage: micro_acceptance [--criterion N]\n";
    return 2;
  }
  bool all = true;
  for (int c = first; c <= last; ++c) {
    Outcome o;
    try {
      o = criteria[c - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
