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

#include "micro/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "micro/error.hpp"

namespace micro {

double GradCheckReport::max_relative_error() const {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.max_relative_error);
  return worst;
}

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << e.name << ": max rel err " << e.max_relative_error << " at [" << e.worst_index
       << "] analytic " << e.analytic << " numeric " << e.numeric << "\n";
  }
  return os.str();
}

GradCheckReport finite_difference_check(const LossFunction& loss, const ParameterSet& params,
                                        double perturbation, double tolerance) {
  require(perturbation > 0.0, "finite_difference_check: perturbation must be positive");
  ParameterSet analytic = params.zeros_like();
  const double f0 = loss(params, &analytic);
  ParameterSet again = params.zeros_like();
  const double f1 = loss(params, &again);
  if (f0 != f1 || !(analytic == again)) {
    fail("finite_difference_check: loss function is not deterministic");
  }

  GradCheckReport report;
  report.tolerance = tolerance;
  ParameterSet probe = params;
  for (std::size_t p = 0; p < params.size(); ++p) {
    GradCheckEntry entry;
    entry.name = params[p].name;
    auto values = probe[p].value.values();
    const auto grad = analytic[p].value.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + perturbation;
      const double up = loss(probe, nullptr);
      values[i] = saved - perturbation;
      const double down = loss(probe, nullptr);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * perturbation);
      const double denom = std::max({std::abs(grad[i]), std::abs(numeric), 1e-8});
      const double rel = std::abs(grad[i] - numeric) / denom;
      if (i == 0 || rel > entry.max_relative_error) {
        entry.max_relative_error = rel;
        entry.worst_index = i;
        entry.analytic = grad[i];
        entry.numeric = numeric;
      }
    }
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace micro
