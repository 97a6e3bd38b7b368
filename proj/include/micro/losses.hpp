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

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "micro/dense.hpp"
#include "micro/sampler.hpp"

namespace micro {

/// Backbone outputs plus the enhanced item table used for scoring.
struct CFOutput {
  DenseMatrix users;     // x̃_u
  DenseMatrix items;     // x̃_i
  DenseMatrix enhanced;  // x̂_i
};

// x̂_i = x̃_i + h_i / |h_i|. Throws a numerical error on a zero-norm h_i.
DenseMatrix enhance_items(const DenseMatrix& items, const DenseMatrix& fused);
// Gradient with respect to h given the gradient with respect to x̂.
DenseMatrix enhance_backward(const DenseMatrix& fused, const DenseMatrix& d_enhanced);

double score(const CFOutput& cf, std::size_t user, std::size_t item);
// users x items table of x̃_u . x̂_i.
DenseMatrix score_matrix(const CFOutput& cf);

// Mean over triples of -ln sigmoid(pos - neg) = softplus(neg - pos).
// Optional outputs receive d loss / d score per triple.
double bpr_loss(std::span<const double> positive_scores, std::span<const double> negative_scores,
                std::span<double> d_positive = {}, std::span<double> d_negative = {});

struct BprGrads {
  DenseMatrix users;
  DenseMatrix items;  // with respect to x̂
};

double bpr_loss(const DenseMatrix& users, const DenseMatrix& enhanced, const TripleBatch& batch,
                BprGrads* grads = nullptr);

struct LossReport {
  double bpr = 0.0;
  double contrastive = 0.0;
  double total = 0.0;
  double beta = 0.0;
  std::vector<std::pair<std::string, double>> gradient_norms;
};

LossReport total_loss(double bpr, double contrastive, double beta);

double softplus(double x);

}  // namespace micro
