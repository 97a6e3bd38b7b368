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
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "micro/features.hpp"
#include "micro/fusion.hpp"
#include "micro/interactions.hpp"
#include "micro/latent_graph.hpp"
#include "micro/losses.hpp"
#include "micro/params.hpp"
#include "micro/sampler.hpp"
#include "micro/sparse.hpp"

namespace micro {

enum class Backbone { kMF, kLightGCN };

// Model wiring. kCfOnly is the bare backbone (k = 0: no item graphs).
enum class Variant { kMicro, kNoContrast, kCfPlusFeats, kMicroOverFeats, kCfOnly };

enum class ContrastScope { kBatch, kFullCatalog };
enum class SelectionRefresh { kEveryStep, kEveryEpoch };

const char* to_string(Backbone b);
const char* to_string(Variant v);

struct TrainerConfig {
  std::size_t dim = 64;
  double learning_rate = 5e-4;
  double l2 = 1e-4;
  std::size_t batch_size = 1024;
  std::size_t k = 10;
  double lambda = 0.7;
  double tau = 0.5;
  double beta = 0.03;
  int layers = 1;
  std::size_t patience = 10;
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 2022;
  Backbone backbone = Backbone::kMF;
  int lightgcn_layers = 2;
  // Empty selects every loaded modality.
  std::vector<std::string> modalities;
  bool no_contrast = false;
  bool cf_plus_feats = false;
  bool micro_over_feats = false;
  bool keep_self_loops = true;
  bool symmetric_negatives = false;
  ContrastScope contrast_scope = ContrastScope::kBatch;
  SelectionRefresh selection_refresh = SelectionRefresh::kEveryStep;
  bool separate_item_table = false;
  std::size_t eval_k = 20;

  // Throws on out-of-range values and conflicting ablation flags.
  void validate() const;
  Variant variant() const;
  bool uses_contrast() const;

  nlohmann::json to_json() const;
  static TrainerConfig from_json(const nlohmann::json& j);
};

// Symmetric-normalized user-item bipartite adjacency over train interactions;
// users occupy rows [0, U), items [U, U + N).
SparseMatrix bipartite_adjacency(const InteractionTable& table);

struct BackboneForward {
  DenseMatrix users;
  DenseMatrix items;
  std::vector<DenseMatrix> layers;  // LightGCN layer outputs over U + N rows
};

BackboneForward cf_forward(Backbone backbone, int layers, const SparseMatrix& bipartite,
                           const DenseMatrix& users, const DenseMatrix& items);

struct BackboneGrads {
  DenseMatrix users;
  DenseMatrix items;
};

BackboneGrads cf_backward(Backbone backbone, int layers, const SparseMatrix& bipartite,
                          const DenseMatrix& d_users, const DenseMatrix& d_items);

/// Intermediate item-side state of one forward pass.
struct ItemTower {
  std::vector<DenseMatrix> transformed;   // ẽ^m
  std::vector<LearnedGraph> learned;      // Ã^m (empty adjacency when lambda = 1)
  std::vector<BlendedGraph> blended;      // A^m
  std::vector<PropagationLayers> propagated;
  std::vector<DenseMatrix> modality_out;  // h^m
  AttentionForward attention;             // fused h

  std::vector<const DenseMatrix*> modality_ptrs() const;
};

/// Multimodal item tower on top of a CF backbone, with exact gradients of
/// the training objective for every trainable tensor.
class MicroModel {
 public:
  MicroModel(TrainerConfig config, const InteractionTable& table,
             std::vector<FeatureMatrix> features, const std::filesystem::path& graph_cache = {});

  const TrainerConfig& config() const noexcept { return config_; }
  Variant variant() const noexcept { return variant_; }
  std::size_t num_users() const noexcept { return num_users_; }
  std::size_t num_items() const noexcept { return num_items_; }
  const std::vector<FeatureMatrix>& features() const noexcept { return features_; }
  const std::vector<ModalityGraph>& initial_graphs() const noexcept { return initial_; }

  ParameterSet& params() noexcept { return params_; }
  const ParameterSet& params() const noexcept { return params_; }

  // Objective for one batch at `params`. `grads`, when given, must have the
  // layout of `params` and is overwritten.
  LossReport loss(const ParameterSet& params, const TripleBatch& batch,
                  ParameterSet* grads = nullptr) const;
  LossReport loss(const TripleBatch& batch, ParameterSet* grads = nullptr) const {
    return loss(params_, batch, grads);
  }

  // Inference-time embeddings; learned graphs rebuilt from `params`.
  CFOutput infer(const ParameterSet& params) const;
  CFOutput infer() const { return infer(params_); }

  ItemTower item_tower(const ParameterSet& params) const;
  // With a null selection, learned-graph edges are chosen by top-k afresh.
  ItemTower item_tower(const ParameterSet& params,
                       const std::vector<SparseMatrix>* selection) const;

  // Re-selects learned-graph edges from the current parameters; only used
  // with SelectionRefresh::kEveryEpoch.
  void refresh_selection();

  // Items that enter the contrastive loss for `batch`.
  std::vector<std::uint32_t> contrast_subset(const TripleBatch& batch) const;

 private:
  void init_params();

  TrainerConfig config_;
  Variant variant_;
  std::size_t num_users_;
  std::size_t num_items_;
  std::vector<FeatureMatrix> features_;
  std::vector<ModalityGraph> initial_;
  std::vector<SparseMatrix> selection_;
  SparseMatrix bipartite_;
  ParameterSet params_;
};

}  // namespace micro
