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

#include <algorithm>
#include <cmath>

#include "micro/error.hpp"
#include "micro/model.hpp"

namespace micro {

const char* to_string(Backbone b) { return b == Backbone::kMF ? "mf" : "lightgcn"; }

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kMicro: return "micro";
    case Variant::kNoContrast: return "no_contrast";
    case Variant::kCfPlusFeats: return "cf_plus_feats";
    case Variant::kMicroOverFeats: return "micro_over_feats";
    case Variant::kCfOnly: return "cf";
  }
  return "?";
}

void TrainerConfig::validate() const {
  require(dim >= 1, "trainer.dim must be >= 1");
  require(learning_rate > 0.0, "trainer.lr must be positive");
  require(l2 >= 0.0, "trainer.l2 must be >= 0");
  require(batch_size >= 1, "trainer.batch must be >= 1");
  require(lambda >= 0.0 && lambda <= 1.0, "trainer.lambda must lie in [0, 1]");
  require(tau > 0.0, "trainer.tau must be positive");
  require(beta >= 0.0, "trainer.beta must be >= 0");
  require(layers >= 0, "trainer.L must be >= 0");
  require(lightgcn_layers >= 0, "trainer.lightgcn_layers must be >= 0");
  require(patience >= 1, "trainer.patience must be >= 1");
  require(eval_k >= 1, "trainer.eval_k must be >= 1");
  require(!(cf_plus_feats && micro_over_feats),
          "conflicting ablation flags: cf_plus_feats and micro_over_feats");
  require(!(micro_over_feats && k == 0), "micro_over_feats needs item graphs (k >= 1)");
  require(!(no_contrast && micro_over_feats),
          "conflicting ablation flags: no_contrast and micro_over_feats");
}

Variant TrainerConfig::variant() const {
  if (cf_plus_feats) return Variant::kCfPlusFeats;
  if (k == 0) return Variant::kCfOnly;
  if (micro_over_feats) return Variant::kMicroOverFeats;
  if (no_contrast) return Variant::kNoContrast;
  return Variant::kMicro;
}

bool TrainerConfig::uses_contrast() const {
  const Variant v = variant();
  return beta > 0.0 && (v == Variant::kMicro || v == Variant::kMicroOverFeats);
}

nlohmann::json TrainerConfig::to_json() const {
  return {{"dim", dim},
          {"lr", learning_rate},
          {"l2", l2},
          {"batch", batch_size},
          {"k", k},
          {"lambda", lambda},
          {"tau", tau},
          {"beta", beta},
          {"L", layers},
          {"patience", patience},
          {"max_epochs", max_epochs},
          {"seed", seed},
          {"backbone", to_string(backbone)},
          {"lightgcn_layers", lightgcn_layers},
          {"modalities", modalities},
          {"no_contrast", no_contrast},
          {"cf_plus_feats", cf_plus_feats},
          {"micro_over_feats", micro_over_feats},
          {"keep_self_loops", keep_self_loops},
          {"symmetric_negatives", symmetric_negatives},
          {"contrast_scope", contrast_scope == ContrastScope::kBatch ? "batch" : "full"},
          {"selection_refresh",
           selection_refresh == SelectionRefresh::kEveryStep ? "step" : "epoch"},
          {"separate_item_table", separate_item_table},
          {"eval_k", eval_k}};
}

TrainerConfig TrainerConfig::from_json(const nlohmann::json& j) {
  TrainerConfig c;
  c.dim = j.at("dim");
  c.learning_rate = j.at("lr");
  c.l2 = j.at("l2");
  c.batch_size = j.at("batch");
  c.k = j.at("k");
  c.lambda = j.at("lambda");
  c.tau = j.at("tau");
  c.beta = j.at("beta");
  c.layers = j.at("L");
  c.patience = j.at("patience");
  c.max_epochs = j.at("max_epochs");
  c.seed = j.at("seed");
  c.backbone = j.at("backbone") == "mf" ? Backbone::kMF : Backbone::kLightGCN;
  c.lightgcn_layers = j.at("lightgcn_layers");
  c.modalities = j.at("modalities").get<std::vector<std::string>>();
  c.no_contrast = j.at("no_contrast");
  c.cf_plus_feats = j.at("cf_plus_feats");
  c.micro_over_feats = j.at("micro_over_feats");
  c.keep_self_loops = j.at("keep_self_loops");
  c.symmetric_negatives = j.at("symmetric_negatives");
  c.contrast_scope = j.at("contrast_scope") == "batch" ? ContrastScope::kBatch
                                                       : ContrastScope::kFullCatalog;
  c.selection_refresh = j.at("selection_refresh") == "step" ? SelectionRefresh::kEveryStep
                                                            : SelectionRefresh::kEveryEpoch;
  c.separate_item_table = j.at("separate_item_table");
  c.eval_k = j.at("eval_k");
  return c;
}

// ---------------------------------------------------------------------------
// Backbones

SparseMatrix bipartite_adjacency(const InteractionTable& table) {
  const std::size_t u_count = table.num_users();
  const std::size_t total = u_count + table.num_items();
  std::vector<std::vector<SparseEntry>> rows(total);
  for (const auto& x : table.all()) {
    if (x.tag != SplitTag::kTrain) continue;
    rows[x.user].push_back({static_cast<std::uint32_t>(u_count + x.item), 1.0});
    rows[u_count + x.item].push_back({x.user, 1.0});
  }
  std::vector<double> degree(total);
  for (std::size_t r = 0; r < total; ++r) degree[r] = static_cast<double>(rows[r].size());
  for (std::size_t r = 0; r < total; ++r) {
    for (auto& e : rows[r]) e.value = 1.0 / std::sqrt(degree[r] * degree[e.col]);
  }
  return SparseMatrix::from_rows(total, std::move(rows));
}

namespace {

DenseMatrix stack_rows(const DenseMatrix& top, const DenseMatrix& bottom) {
  DenseMatrix out(top.rows() + bottom.rows(), top.cols());
  std::copy(top.values().begin(), top.values().end(), out.values().begin());
  std::copy(bottom.values().begin(), bottom.values().end(),
            out.values().begin() + static_cast<std::ptrdiff_t>(top.size()));
  return out;
}

DenseMatrix slice_rows(const DenseMatrix& m, std::size_t begin, std::size_t end) {
  DenseMatrix out(end - begin, m.cols());
  std::copy(m.row(begin).begin(), m.row(begin).begin() + static_cast<std::ptrdiff_t>(out.size()),
            out.values().begin());
  return out;
}

}  // namespace

BackboneForward cf_forward(Backbone backbone, int layers, const SparseMatrix& bipartite,
                           const DenseMatrix& users, const DenseMatrix& items) {
  BackboneForward f;
  if (backbone == Backbone::kMF) {
    f.users = users;
    f.items = items;
    return f;
  }
  require(layers >= 0, "lightgcn: layer count must be >= 0");
  require(bipartite.rows() == users.rows() + items.rows(),
          "lightgcn: bipartite adjacency does not match embedding tables");
  f.layers.push_back(stack_rows(users, items));
  DenseMatrix mean = f.layers.back();
  for (int l = 0; l < layers; ++l) {
    f.layers.push_back(spmm(bipartite, f.layers.back()));
    axpy(1.0, f.layers.back(), mean);
  }
  scale(mean, 1.0 / static_cast<double>(layers + 1));
  f.users = slice_rows(mean, 0, users.rows());
  f.items = slice_rows(mean, users.rows(), mean.rows());
  return f;
}

BackboneGrads cf_backward(Backbone backbone, int layers, const SparseMatrix& bipartite,
                          const DenseMatrix& d_users, const DenseMatrix& d_items) {
  if (backbone == Backbone::kMF) return {d_users, d_items};
  DenseMatrix d_mean = stack_rows(d_users, d_items);
  scale(d_mean, 1.0 / static_cast<double>(layers + 1));
  // Every layer receives d_mean directly plus what flows back from above.
  DenseMatrix upstream = d_mean;
  for (int l = layers; l >= 1; --l) {
    upstream = spmm_transposed(bipartite, upstream);
    axpy(1.0, d_mean, upstream);
  }
  return {slice_rows(upstream, 0, d_users.rows()),
          slice_rows(upstream, d_users.rows(), upstream.rows())};
}

}  // namespace micro
