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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "micro/adam.hpp"
#include "micro/checkpoint.hpp"
#include "micro/interactions.hpp"
#include "micro/metrics.hpp"
#include "micro/model.hpp"

namespace micro {

struct TrainOptions {
  // "warm" or "cold"; selects the validation tag semantics only for logging.
  std::string protocol = "warm";
  std::string config_hash;
  // Receives every JSON-lines record as it is produced.
  std::function<void(const nlohmann::json&)> on_record;
};

struct TrainResult {
  ParameterSet best_params;
  AdamState best_adam;
  BestMetric best;
  // Parameters at the end of the last fully completed epoch.
  ParameterSet last_good_params;
  AdamState last_good_adam;
  std::size_t epochs_run = 0;
  bool early_stopped = false;
  std::optional<std::string> abort_reason;  // set on a numerical abort
  std::vector<nlohmann::json> records;
};

// Validation metrics of the model at `params` against valid-tagged items.
MetricReport validate_model(const MicroModel& model, const ParameterSet& params,
                            const InteractionTable& table, std::size_t k,
                            const std::string& protocol);

// Epoch loop with patience-based early stopping on validation Recall@k.
// On return the model holds the best parameters. Numerical failures do not
// throw: they end training and are reported through abort_reason.
TrainResult train(MicroModel& model, const InteractionTable& table,
                  const TrainOptions& options = {});

}  // namespace micro
