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
#include "micro/init.hpp"
#include "micro/model.hpp"
#include "micro/rng.hpp"

namespace micro {
namespace {

std::string weight_name(const std::string& modality) { return "transform." + modality + ".weight"; }
std::string bias_name(const std::string& modality) { return "transform." + modality + ".bias"; }

constexpr const char* kUsers = "user_embedding";
constexpr const char* kItems = "item_embedding";
constexpr const char* kGraphItems = "item_graph_embedding";
constexpr const char* kQuery = "attention.query";
constexpr const char* kAttWeight = "attention.weight";
constexpr const char* kAttBias = "attention.bias";

double frobenius(const DenseMatrix& m) { return norm2(m.values()); }

}  // namespace

std::vector<const DenseMatrix*> ItemTower::modality_ptrs() const {
  std::vector<const DenseMatrix*> out;
  for (const auto& h : modality_out) out.push_back(&h);
  return out;
}

MicroModel::MicroModel(TrainerConfig config, const InteractionTable& table,
                       std::vector<FeatureMatrix> features,
                       const std::filesystem::path& graph_cache)
    : config_(std::move(config)),
      variant_(config_.variant()),
      num_users_(table.num_users()),
      num_items_(table.num_items()) {
  config_.validate();
  if (config_.modalities.empty()) {
    features_ = std::move(features);
  } else {
    for (const auto& name : config_.modalities) {
      auto it = std::find_if(features.begin(), features.end(),
                             [&](const FeatureMatrix& f) { return f.modality == name; });
      require(it != features.end(), "no features loaded for modality '" + name + "'");
      features_.push_back(*it);
    }
  }
  if (variant_ != Variant::kCfOnly) {
    require(!features_.empty(), "model needs at least one modality");
  }
  for (const auto& f : features_) {
    require(f.items() == num_items_, "features '" + f.modality + "' have " +
                                         std::to_string(f.items()) + " rows, expected " +
                                         std::to_string(num_items_));
  }

  const bool needs_graphs = variant_ == Variant::kMicro || variant_ == Variant::kNoContrast ||
                            variant_ == Variant::kMicroOverFeats;
  if (needs_graphs) {
    const GraphOptions opts{config_.k, config_.keep_self_loops};
    for (const auto& f : features_) {
      initial_.push_back(graph_cache.empty()
                             ? build_initial_graph(f.values, opts, f.modality)
                             : cached_initial_graph(f.values, opts, f.modality, graph_cache));
    }
  }
  if (config_.backbone == Backbone::kLightGCN) bipartite_ = bipartite_adjacency(table);
  init_params();
  if (needs_graphs && config_.selection_refresh == SelectionRefresh::kEveryEpoch) {
    refresh_selection();
  }
}

void MicroModel::init_params() {
  const std::size_t d = config_.dim;
  auto xavier = [&](const std::string& name, std::size_t rows, std::size_t cols) {
    Rng rng = Rng::stream(config_.seed, "init:" + name);
    params_.add(name, xavier_init(rows, cols, rng));
  };
  xavier(kUsers, num_users_, d);
  xavier(kItems, num_items_, d);
  if (variant_ == Variant::kCfOnly) return;
  if (config_.separate_item_table && variant_ != Variant::kCfPlusFeats &&
      variant_ != Variant::kMicroOverFeats) {
    xavier(kGraphItems, num_items_, d);
  }
  for (const auto& f : features_) {
    xavier(weight_name(f.modality), d, f.dim());
    params_.add(bias_name(f.modality), DenseMatrix(1, d));
  }
  xavier(kQuery, 1, d);
  xavier(kAttWeight, d, d);
  params_.add(kAttBias, DenseMatrix(1, d));
}

void MicroModel::refresh_selection() {
  selection_.clear();
  if (initial_.empty() || config_.lambda >= 1.0) return;
  const GraphOptions opts{config_.k, config_.keep_self_loops};
  for (const auto& f : features_) {
    const DenseMatrix t = transform_features(f.values, params_.get(weight_name(f.modality)),
                                             params_.get(bias_name(f.modality)));
    selection_.push_back(build_learned_graph(t, opts).similarity);
  }
}

ItemTower MicroModel::item_tower(const ParameterSet& p) const {
  return item_tower(p, selection_.empty() ? nullptr : &selection_);
}

ItemTower MicroModel::item_tower(const ParameterSet& p,
                                 const std::vector<SparseMatrix>* selection) const {
  require(variant_ != Variant::kCfOnly, "item_tower: plain CF has no item tower");
  ItemTower t;
  const GraphOptions opts{config_.k, config_.keep_self_loops};
  const bool graphs = variant_ != Variant::kCfPlusFeats;
  const DenseMatrix& graph_input =
      p.find(kGraphItems) != ParameterSet::npos ? p.get(kGraphItems) : p.get(kItems);
  for (std::size_t m = 0; m < features_.size(); ++m) {
    const auto& f = features_[m];
    t.transformed.push_back(transform_features(f.values, p.get(weight_name(f.modality)),
                                               p.get(bias_name(f.modality))));
    if (!graphs) {
      t.modality_out.push_back(t.transformed.back());
      continue;
    }
    if (config_.lambda < 1.0) {
      const SparseMatrix* sel = selection ? &(*selection)[m] : nullptr;
      t.learned.push_back(build_learned_graph(t.transformed.back(), opts, sel));
    } else {
      t.learned.push_back(LearnedGraph{SparseMatrix(num_items_, num_items_), {}, {}, {}, {}, 0});
    }
    t.blended.push_back(
        blend_graphs(initial_[m].adjacency, t.learned.back().adjacency, config_.lambda));
    const DenseMatrix& input =
        variant_ == Variant::kMicroOverFeats ? t.transformed.back() : graph_input;
    t.propagated.push_back(propagate(t.blended.back().adjacency, input, config_.layers));
    t.modality_out.push_back(t.propagated.back().output());
  }
  const auto ptrs = t.modality_ptrs();
  t.attention = attention_fuse(ptrs, p.get(kQuery), p.get(kAttWeight), p.get(kAttBias));
  return t;
}

std::vector<std::uint32_t> MicroModel::contrast_subset(const TripleBatch& batch) const {
  std::vector<std::uint32_t> items;
  if (config_.contrast_scope == ContrastScope::kFullCatalog) {
    items.resize(num_items_);
    for (std::size_t i = 0; i < num_items_; ++i) items[i] = static_cast<std::uint32_t>(i);
    return items;
  }
  items.insert(items.end(), batch.positives.begin(), batch.positives.end());
  items.insert(items.end(), batch.negatives.begin(), batch.negatives.end());
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

LossReport MicroModel::loss(const ParameterSet& p, const TripleBatch& batch,
                            ParameterSet* grads) const {
  require(batch.size() > 0, "loss: empty batch");
  const DenseMatrix& users = p.get(kUsers);
  const DenseMatrix& items = p.get(kItems);
  const BackboneForward bb =
      cf_forward(config_.backbone, config_.lightgcn_layers, bipartite_, users, items);

  const bool tower = variant_ != Variant::kCfOnly;
  ItemTower t;
  DenseMatrix enhanced;
  if (tower) {
    t = item_tower(p);
    enhanced = enhance_items(bb.items, t.attention.fused);
  } else {
    enhanced = bb.items;
  }

  BprGrads bg;
  const double bpr = bpr_loss(bb.users, enhanced, batch, grads ? &bg : nullptr);

  const bool contrast = tower && config_.uses_contrast();
  const double beta = contrast ? config_.beta : 0.0;
  double lc = 0.0;
  ContrastiveGrads cg;
  if (contrast) {
    const auto subset = contrast_subset(batch);
    const auto ptrs = t.modality_ptrs();
    lc = contrastive_loss(ptrs, t.attention.fused, subset,
                          {config_.tau, config_.symmetric_negatives}, grads ? &cg : nullptr);
  }
  LossReport report = total_loss(bpr, lc, beta);
  if (!std::isfinite(report.total)) fail_numerical("loss is not finite");
  if (!grads) return report;

  require(grads->same_layout(p), "loss: gradient buffer layout does not match parameters");
  grads->set_zero();
  DenseMatrix d_items_bb = bg.items;

  if (tower) {
    DenseMatrix d_fused = enhance_backward(t.attention.fused, bg.items);
    if (contrast) axpy(beta, cg.fused, d_fused);
    const auto ptrs = t.modality_ptrs();
    AttentionGrads ag =
        attention_backward(ptrs, p.get(kQuery), p.get(kAttWeight), t.attention, d_fused);
    axpy(1.0, ag.query, grads->get(kQuery));
    axpy(1.0, ag.weight, grads->get(kAttWeight));
    axpy(1.0, ag.bias, grads->get(kAttBias));

    DenseMatrix d_graph_input(num_items_, config_.dim);
    for (std::size_t m = 0; m < features_.size(); ++m) {
      DenseMatrix d_h = std::move(ag.modalities[m]);
      if (contrast) axpy(beta, cg.modalities[m], d_h);
      DenseMatrix d_transformed;
      if (variant_ == Variant::kCfPlusFeats) {
        d_transformed = std::move(d_h);
      } else {
        PropagationGrads pg = propagate_backward(t.blended[m].adjacency, t.propagated[m], d_h);
        const auto d_learned =
            blend_backward(t.blended[m], t.learned[m].adjacency.nnz(), pg.graph);
        if (t.learned[m].adjacency.nnz() > 0) {
          d_transformed = learned_graph_backward(t.learned[m], d_learned);
        } else {
          d_transformed = DenseMatrix(num_items_, config_.dim);
        }
        if (variant_ == Variant::kMicroOverFeats) {
          axpy(1.0, pg.input, d_transformed);
        } else {
          axpy(1.0, pg.input, d_graph_input);
        }
      }
      const auto& f = features_[m];
      TransformGrads tg = transform_features_backward(f.values, d_transformed);
      axpy(1.0, tg.weight, grads->get(weight_name(f.modality)));
      axpy(1.0, tg.bias, grads->get(bias_name(f.modality)));
    }
    const bool separate = grads->find(kGraphItems) != ParameterSet::npos;
    axpy(1.0, d_graph_input, grads->get(separate ? kGraphItems : kItems));
  }

  BackboneGrads bgr =
      cf_backward(config_.backbone, config_.lightgcn_layers, bipartite_, bg.users, d_items_bb);
  axpy(1.0, bgr.users, grads->get(kUsers));
  axpy(1.0, bgr.items, grads->get(kItems));

  for (const auto& g : *grads) report.gradient_norms.emplace_back(g.name, frobenius(g.value));
  return report;
}

CFOutput MicroModel::infer(const ParameterSet& p) const {
  const BackboneForward bb = cf_forward(config_.backbone, config_.lightgcn_layers, bipartite_,
                                        p.get(kUsers), p.get(kItems));
  CFOutput out;
  out.users = bb.users;
  out.items = bb.items;
  if (variant_ == Variant::kCfOnly) {
    out.enhanced = bb.items;
    return out;
  }
  // Inference always re-selects edges from the final parameters.
  const ItemTower t = item_tower(p, nullptr);
  out.enhanced = enhance_items(bb.items, t.attention.fused);
  return out;
}

}  // namespace micro
