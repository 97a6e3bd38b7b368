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
#include <span>
#include <vector>

#include "micro/dense.hpp"
#include "micro/sparse.hpp"

namespace micro {

// ---------------------------------------------------------------------------
// Graph propagation: H_(l) = A H_(l-1), no transforms or activations.

/// Layers H_(0..L) of one modality; the modality output is the last layer.
struct PropagationLayers {
  std::vector<DenseMatrix> layers;

  const DenseMatrix& output() const { return layers.back(); }
  std::size_t depth() const { return layers.size() - 1; }
};

PropagationLayers propagate(const SparseMatrix& graph, const DenseMatrix& input, int layers);

struct PropagationGrads {
  DenseMatrix input;
  std::vector<double> graph;  // per stored graph entry
};

PropagationGrads propagate_backward(const SparseMatrix& graph, const PropagationLayers& forward,
                                    const DenseMatrix& d_output);

// ---------------------------------------------------------------------------
// Attention fusion over modalities, with parameters shared by all of them:
//   w_i^m = q . tanh(W h_i^m + b),  alpha_i = softmax_m(w_i),  h_i = sum_m alpha_i^m h_i^m

// Max-shifted softmax; `out` must not alias `logits`.
void softmax(std::span<const double> logits, std::span<double> out);

struct AttentionForward {
  std::vector<DenseMatrix> hidden;  // tanh(W h^m + b), per modality
  DenseMatrix logits;               // N x M
  DenseMatrix weights;              // N x M, rows sum to 1
  DenseMatrix fused;                // N x d
};

AttentionForward attention_fuse(std::span<const DenseMatrix* const> modalities,
                                const DenseMatrix& query, const DenseMatrix& weight,
                                const DenseMatrix& bias);

struct AttentionGrads {
  std::vector<DenseMatrix> modalities;
  DenseMatrix query;
  DenseMatrix weight;
  DenseMatrix bias;
};

AttentionGrads attention_backward(std::span<const DenseMatrix* const> modalities,
                                  const DenseMatrix& query, const DenseMatrix& weight,
                                  const AttentionForward& forward, const DenseMatrix& d_fused);

// ---------------------------------------------------------------------------
// Multimodal contrastive loss. For every item i of the subset and modality m,
// two InfoNCE terms with cosine critic and temperature tau share the positive
// pair (h_i^m, h_i):
//   I(h_i^m, h_i): negatives (h_i^m, h_j) and (h_i^m, h_j^m), j != i
//   I(h_i, h_i^m): negatives (h_i^m, h_j) and (h_i, h_j)         [literal]
//                  negatives (h_i, h_j^m) and (h_i, h_j)         [symmetric]
// L = -(1/|S|) sum_i (1/|M|) sum_m (I1 + I2) / 2.

struct ContrastiveOptions {
  double temperature = 0.5;
  bool symmetric_negatives = false;
};

struct ContrastiveGrads {
  std::vector<DenseMatrix> modalities;  // full N x d, zero outside the subset
  DenseMatrix fused;
};

// `subset` holds distinct item indices, at least two. When `grads` is non-null
// it receives gradients of the loss.
double contrastive_loss(std::span<const DenseMatrix* const> modalities, const DenseMatrix& fused,
                        std::span<const std::uint32_t> subset, const ContrastiveOptions& options,
                        ContrastiveGrads* grads = nullptr);

}  // namespace micro
