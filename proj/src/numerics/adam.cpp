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

#include "micro/adam.hpp"

#include <cmath>

#include "micro/error.hpp"

namespace micro {

AdamState AdamState::for_params(const ParameterSet& params, const AdamConfig& config) {
  AdamState state;
  state.config = config;
  state.first_moment = params.zeros_like();
  state.second_moment = params.zeros_like();
  return state;
}

void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state) {
  require(params.same_layout(grads), "adam_step: gradient layout does not match parameters");
  require(params.same_layout(state.first_moment) && params.same_layout(state.second_moment),
          "adam_step: optimizer state layout does not match parameters");
  for (const auto& g : grads) {
    for (double v : g.value.values()) {
      if (!std::isfinite(v)) fail_numerical("non-finite gradient for parameter " + g.name);
    }
  }

  const AdamConfig& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);

  for (std::size_t p = 0; p < params.size(); ++p) {
    auto theta = params[p].value.values();
    const auto grad = grads[p].value.values();
    auto m = state.first_moment[p].value.values();
    auto v = state.second_moment[p].value.values();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double g = grad[i] + c.weight_decay * theta[i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      theta[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace micro
