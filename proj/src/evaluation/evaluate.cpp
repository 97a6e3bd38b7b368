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

#include "micro/evaluate.hpp"

#include "micro/error.hpp"

namespace micro {

nlohmann::json checkpoint_config(const MicroModel& model) {
  nlohmann::json mods = nlohmann::json::array();
  for (const auto& f : model.features()) mods.push_back({{"name", f.modality}, {"dim", f.dim()}});
  return {{"trainer", model.config().to_json()},
          {"num_users", model.num_users()},
          {"num_items", model.num_items()},
          {"modalities", mods}};
}

MicroModel restore_model(const Checkpoint& ck, const InteractionTable& table,
                         std::vector<FeatureMatrix> features,
                         const std::filesystem::path& graph_cache) {
  std::size_t users = 0;
  std::size_t items = 0;
  TrainerConfig cfg;
  try {
    users = ck.config.at("num_users").get<std::size_t>();
    items = ck.config.at("num_items").get<std::size_t>();
    cfg = TrainerConfig::from_json(ck.config.at("trainer"));
  } catch (const nlohmann::json::exception& e) {
    fail_incompatible(std::string("checkpoint config is incomplete: ") + e.what());
  }
  if (items != table.num_items()) {
    fail_incompatible("checkpoint has " + std::to_string(items) + " items but dataset has " +
                      std::to_string(table.num_items()));
  }
  if (users != table.num_users()) {
    fail_incompatible("checkpoint has " + std::to_string(users) + " users but dataset has " +
                      std::to_string(table.num_users()));
  }
  for (const auto& m : ck.config.value("modalities", nlohmann::json::array())) {
    const std::string name = m.at("name");
    bool found = false;
    for (const auto& f : features) {
      if (f.modality != name) continue;
      found = true;
      if (f.dim() != m.at("dim").get<std::size_t>()) {
        fail_incompatible("modality '" + name + "' has width " + std::to_string(f.dim()) +
                          " but the checkpoint expects " + m.at("dim").dump());
      }
    }
    if (!found) fail_incompatible("checkpoint needs features for modality '" + name + "'");
  }
  if (cfg.modalities.empty()) {
    // Pin the trained modality set so extra inputs do not change the model.
    for (const auto& m : ck.config.value("modalities", nlohmann::json::array())) {
      cfg.modalities.push_back(m.at("name"));
    }
  }
  MicroModel model(cfg, table, std::move(features), graph_cache);
  if (!model.params().same_layout(ck.params)) {
    fail_incompatible("checkpoint tensors do not match the model layout");
  }
  model.params() = ck.params;
  return model;
}

std::vector<MetricReport> evaluate_model(const MicroModel& model, const SplitResult& split,
                                         std::span<const std::size_t> ks) {
  const DenseMatrix scores = score_matrix(model.infer());
  return evaluate_scores(scores, split.table, SplitTag::kTest, ks,
                         split.spec.mode == SplitMode::kWarm ? "warm" : "cold");
}

}  // namespace micro
