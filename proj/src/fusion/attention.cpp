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

#include <algorithm>
#include <cmath>

#include "micro/error.hpp"
#include "micro/fusion.hpp"
#include "micro/simd.hpp"

namespace micro {

void softmax(std::span<const double> logits, std::span<double> out) {
  require(logits.size() == out.size() && !logits.empty(), "softmax: size mismatch");
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t m = 0; m < logits.size(); ++m) {
    out[m] = std::exp(logits[m] - top);
    total += out[m];
  }
  for (double& v : out) v /= total;
}

AttentionForward attention_fuse(std::span<const DenseMatrix* const> modalities,
                                const DenseMatrix& query, const DenseMatrix& weight,
                                const DenseMatrix& bias) {
  require(!modalities.empty(), "attention_fuse: at least one modality");
  const std::size_t n = modalities[0]->rows();
  const std::size_t d = modalities[0]->cols();
  const std::size_t m_count = modalities.size();
  require(query.rows() == 1 && query.cols() == d, "attention_fuse: query shape " + query.shape());
  require(weight.rows() == d && weight.cols() == d,
          "attention_fuse: weight shape " + weight.shape());
  for (const DenseMatrix* h : modalities) {
    require(h->rows() == n && h->cols() == d, "attention_fuse: modality shape " + h->shape());
  }

  AttentionForward f;
  f.logits = DenseMatrix(n, m_count);
  f.weights = DenseMatrix(n, m_count);
  f.fused = DenseMatrix(n, d);
  for (std::size_t m = 0; m < m_count; ++m) {
    DenseMatrix z = matmul_nt(*modalities[m], weight);
    add_row_vector(z, bias);
    for (double& v : z.values()) v = std::tanh(v);
    for (std::size_t i = 0; i < n; ++i) f.logits(i, m) = simd::dot(z.row(i).data(), query.data(), d);
    f.hidden.push_back(std::move(z));
  }
  for (std::size_t i = 0; i < n; ++i) {
    softmax(f.logits.row(i), f.weights.row(i));
    for (std::size_t m = 0; m < m_count; ++m) {
      simd::axpy(f.weights(i, m), modalities[m]->row(i).data(), f.fused.row(i).data(), d);
    }
  }
  return f;
}

AttentionGrads attention_backward(std::span<const DenseMatrix* const> modalities,
                                  const DenseMatrix& query, const DenseMatrix& weight,
                                  const AttentionForward& f, const DenseMatrix& d_fused) {
  const std::size_t n = f.fused.rows();
  const std::size_t d = f.fused.cols();
  const std::size_t m_count = modalities.size();
  AttentionGrads g;
  g.query = DenseMatrix(1, d);
  g.weight = DenseMatrix(d, d);
  g.bias = DenseMatrix(1, d);

  // d alpha, then through the softmax to d logits.
  DenseMatrix d_alpha(n, m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    DenseMatrix dh(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      d_alpha(i, m) = simd::dot(d_fused.row(i).data(), modalities[m]->row(i).data(), d);
      simd::axpy(f.weights(i, m), d_fused.row(i).data(), dh.row(i).data(), d);
    }
    g.modalities.push_back(std::move(dh));
  }
  DenseMatrix d_logits(n, m_count);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) mean += f.weights(i, m) * d_alpha(i, m);
    for (std::size_t m = 0; m < m_count; ++m) {
      d_logits(i, m) = f.weights(i, m) * (d_alpha(i, m) - mean);
    }
  }

  for (std::size_t m = 0; m < m_count; ++m) {
    const DenseMatrix& z = f.hidden[m];
    DenseMatrix d_pre(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      const double dl = d_logits(i, m);
      simd::axpy(dl, z.row(i).data(), g.query.data(), d);
      auto dp = d_pre.row(i);
      const auto zi = z.row(i);
      for (std::size_t c = 0; c < d; ++c) dp[c] = dl * query(0, c) * (1.0 - zi[c] * zi[c]);
    }
    axpy(1.0, matmul_tn(d_pre, *modalities[m]), g.weight);
    axpy(1.0, column_sums(d_pre), g.bias);
    axpy(1.0, matmul(d_pre, weight), g.modalities[m]);
  }
  return g;
}

}  // namespace micro
