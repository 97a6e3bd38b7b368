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

#include <functional>
#include <string>
#include <vector>

#include "micro/params.hpp"

namespace micro {

// Evaluates the loss at `params`. When `grads` is non-null it has the layout
// of `params` and receives the analytic gradient.
using LossFunction = std::function<double(const ParameterSet& params, ParameterSet* grads)>;

struct GradCheckEntry {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 0.0;

  double max_relative_error() const;
  bool passed() const { return max_relative_error() < tolerance; }
  std::string summary() const;
};

// Central differences (f(x+h) - f(x-h)) / 2h per scalar, compared to the
// analytic gradient with relative error |a - n| / max(|a|, |n|, 1e-8).
// Throws if two evaluations at the same point disagree.
GradCheckReport finite_difference_check(const LossFunction& loss, const ParameterSet& params,
                                        double perturbation = 1e-5,
                                        double tolerance = 1e-4);

}  // namespace micro
