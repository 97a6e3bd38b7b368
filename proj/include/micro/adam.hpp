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

#include <cstdint>

#include "micro/params.hpp"

namespace micro {

struct AdamConfig {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Added to the gradient as weight_decay * theta before the moment update.
  double weight_decay = 1e-4;
};

struct AdamState {
  AdamConfig config;
  ParameterSet first_moment;
  ParameterSet second_moment;
  std::uint64_t step = 0;

  static AdamState for_params(const ParameterSet& params, const AdamConfig& config);
};

// One bias-corrected Adam update in place. Throws a numerical error naming
// the parameter if any gradient entry is not finite.
void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state);

}  // namespace micro
