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

#include "micro/trainer.hpp"

#include <array>

#include "micro/error.hpp"
#include "micro/rng.hpp"
#include "micro/sampler.hpp"

namespace micro {

namespace {

nlohmann::json metric_record(const MetricReport& r, const std::string& hash,
                             std::uint64_t seed) {
  nlohmann::json j = r.to_json();
  j["config_hash"] = hash;
  j["seed"] = seed;
  return j;
}

}  // namespace

MetricReport validate_model(const MicroModel& model, const ParameterSet& params,
                            const InteractionTable& table, std::size_t k,
                            const std::string& protocol) {
  const DenseMatrix scores = score_matrix(model.infer(params));
  const std::array<std::size_t, 1> ks{k};
  return evaluate_scores(scores, table, SplitTag::kValid, ks, protocol).front();
}

TrainResult train(MicroModel& model, const InteractionTable& table, const TrainOptions& options) {
  const TrainerConfig& cfg = model.config();
  require(table.num_users() == model.num_users() && table.num_items() == model.num_items(),
          "train: dataset shape does not match the model");
  const TripleSampler sampler(table);
  const std::size_t n_train = table.count_tagged(SplitTag::kTrain);
  const std::size_t batches = (n_train + cfg.batch_size - 1) / cfg.batch_size;
  Rng rng = Rng::stream(cfg.seed, "sampler");

  AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  adam_cfg.weight_decay = cfg.l2;
  AdamState adam = AdamState::for_params(model.params(), adam_cfg);
  ParameterSet grads = model.params().zeros_like();

  TrainResult result;
  auto emit = [&](nlohmann::json j) {
    if (options.on_record) options.on_record(j);
    result.records.push_back(std::move(j));
  };

  MetricReport initial =
      validate_model(model, model.params(), table, cfg.eval_k, options.protocol);
  {
    nlohmann::json j = metric_record(initial, options.config_hash, cfg.seed);
    j = {{"epoch", 0}, {"metrics", j}};
    emit(j);
  }
  result.best = {0, initial.recall, static_cast<std::uint32_t>(cfg.eval_k)};
  result.best_params = model.params();
  result.best_adam = adam;
  result.last_good_params = model.params();
  result.last_good_adam = adam;

  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double sum_bpr = 0.0;
    double sum_c = 0.0;
    double sum_total = 0.0;
    std::size_t b = 0;
    try {
      for (; b < batches; ++b) {
        const TripleBatch batch = sampler.sample(cfg.batch_size, rng);
        const LossReport rep = model.loss(batch, &grads);
        adam_step(model.params(), grads, adam);
        sum_bpr += rep.bpr;
        sum_c += rep.contrastive;
        sum_total += rep.total;
      }
      if (cfg.selection_refresh == SelectionRefresh::kEveryEpoch) model.refresh_selection();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNumerical) throw;
      result.abort_reason = "epoch " + std::to_string(epoch) + ", batch " + std::to_string(b) +
                            ": " + e.what();
      emit({{"epoch", epoch}, {"batch", b}, {"abort", e.what()}});
      break;
    }

    const MetricReport valid =
        validate_model(model, model.params(), table, cfg.eval_k, options.protocol);
    result.epochs_run = epoch;
    result.last_good_params = model.params();
    result.last_good_adam = adam;
    const double nb = static_cast<double>(batches);
    emit({{"epoch", epoch},
          {"loss", {{"bpr", sum_bpr / nb}, {"contrastive", sum_c / nb}, {"total", sum_total / nb}}},
          {"metrics", metric_record(valid, options.config_hash, cfg.seed)}});

    // Strict improvement only: ties keep the earlier epoch.
    if (valid.recall > result.best.recall) {
      result.best = {epoch, valid.recall, static_cast<std::uint32_t>(cfg.eval_k)};
      result.best_params = model.params();
      result.best_adam = adam;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      result.early_stopped = true;
      break;
    }
  }
  model.params() = result.best_params;
  if (cfg.selection_refresh == SelectionRefresh::kEveryEpoch) model.refresh_selection();
  return result;
}

}  // namespace micro
