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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "micro/cli/config.hpp"
#include "micro/features.hpp"
#include "micro/interactions.hpp"
#include "micro/metrics.hpp"
#include "micro/trainer.hpp"

namespace micro {

struct Dataset {
  InteractionTable table;
  std::vector<FeatureMatrix> features;
};

Dataset load_dataset(const ExperimentConfig& config);

struct RunSummary {
  SplitResult split;
  TrainResult training;
  std::vector<MetricReport> test;  // at trainer.eval_k, then 20 if different
  nlohmann::json checkpoint_config;
};

// Split, train and evaluate one configuration in memory.
RunSummary run_experiment(const ExperimentConfig& config, const Dataset& data,
                          const std::filesystem::path& graph_cache = {});

// Graph cache directory from MICRO_CACHE_DIR, or `fallback` when unset.
std::filesystem::path graph_cache_dir(const std::filesystem::path& fallback = {});

// Maps a sweep axis name to its config key.
std::string sweep_key(const std::string& axis);

int cmd_synth(const ExperimentConfig& config, std::ostream& out);
int cmd_train(const ExperimentConfig& config, std::ostream& out);
int cmd_evaluate(const ExperimentConfig& config, const std::filesystem::path& checkpoint,
                 const std::vector<std::size_t>& ks, const std::vector<std::string>& protocols,
                 std::ostream& out);
int cmd_sweep(const ExperimentConfig& config, const std::string& axis,
              const std::vector<std::string>& values, std::size_t parallel, std::ostream& out);
int cmd_pilot(const ExperimentConfig& config, std::ostream& out);

// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace micro
