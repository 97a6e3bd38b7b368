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

#include "micro/losses.hpp"

#include <cmath>

#include "micro/error.hpp"
#include "micro/simd.hpp"

namespace micro {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

DenseMatrix enhance_items(const DenseMatrix& items, const DenseMatrix& fused) {
  require(items.rows() == fused.rows() && items.cols() == fused.cols(),
          "enhance_items: shape mismatch " + items.shape() + " vs " + fused.shape());
  DenseMatrix out = items;
  for (std::size_t i = 0; i < fused.rows(); ++i) {
    const double n = norm2(fused.row(i));
    if (!(n > 0.0) || !std::isfinite(n)) {
      fail_numerical("enhance_items: zero-norm fused embedding for item " + std::to_string(i));
    }
    simd::axpy(1.0 / n, fused.row(i).data(), out.row(i).data(), out.cols());
  }
  return out;
}

DenseMatrix enhance_backward(const DenseMatrix& fused, const DenseMatrix& d_enhanced) {
  DenseMatrix d_fused(fused.rows(), fused.cols());
  const std::size_t d = fused.cols();
  for (std::size_t i = 0; i < fused.rows(); ++i) {
    const double* h = fused.row(i).data();
    const double* g = d_enhanced.row(i).data();
    const double n = norm2(fused.row(i));
    const double proj = simd::dot(g, h, d) / (n * n);
    auto out = d_fused.row(i);
    for (std::size_t c = 0; c < d; ++c) out[c] = (g[c] - proj * h[c]) / n;
  }
  return d_fused;
}

double score(const CFOutput& cf, std::size_t user, std::size_t item) {
  require(user < cf.users.rows() && item < cf.enhanced.rows(), "score: index out of range");
  return dot(cf.users.row(user), cf.enhanced.row(item));
}

DenseMatrix score_matrix(const CFOutput& cf) { return matmul_nt(cf.users, cf.enhanced); }

double bpr_loss(std::span<const double> pos, std::span<const double> neg,
                std::span<double> d_pos, std::span<double> d_neg) {
  require(!pos.empty() && pos.size() == neg.size(), "bpr_loss: need equal nonempty score lists");
  const bool want_grad = !d_pos.empty();
  require(!want_grad || (d_pos.size() == pos.size() && d_neg.size() == neg.size()),
          "bpr_loss: gradient buffers have the wrong length");
  const double inv_b = 1.0 / static_cast<double>(pos.size());
  double total = 0.0;
  for (std::size_t t = 0; t < pos.size(); ++t) {
    const double diff = pos[t] - neg[t];
    total += softplus(-diff);
    if (want_grad) {
      // sigma(-diff) = exp(-softplus(diff))
      const double g = -std::exp(-softplus(diff)) * inv_b;
      d_pos[t] = g;
      d_neg[t] = -g;
    }
  }
  return total * inv_b;
}

double bpr_loss(const DenseMatrix& users, const DenseMatrix& enhanced, const TripleBatch& batch,
                BprGrads* grads) {
  const std::size_t b = batch.size();
  const std::size_t d = users.cols();
  std::vector<double> pos(b), neg(b), d_pos, d_neg;
  for (std::size_t t = 0; t < b; ++t) {
    const double* u = users.row(batch.users[t]).data();
    pos[t] = simd::dot(u, enhanced.row(batch.positives[t]).data(), d);
    neg[t] = simd::dot(u, enhanced.row(batch.negatives[t]).data(), d);
  }
  if (grads) {
    d_pos.resize(b);
    d_neg.resize(b);
  }
  const double loss = bpr_loss(pos, neg, d_pos, d_neg);
  if (grads) {
    grads->users = DenseMatrix(users.rows(), d);
    grads->items = DenseMatrix(enhanced.rows(), d);
    for (std::size_t t = 0; t < b; ++t) {
      const std::uint32_t u = batch.users[t];
      const std::uint32_t i = batch.positives[t];
      const std::uint32_t j = batch.negatives[t];
      simd::axpy(d_pos[t], enhanced.row(i).data(), grads->users.row(u).data(), d);
      simd::axpy(d_neg[t], enhanced.row(j).data(), grads->users.row(u).data(), d);
      simd::axpy(d_pos[t], users.row(u).data(), grads->items.row(i).data(), d);
      simd::axpy(d_neg[t], users.row(u).data(), grads->items.row(j).data(), d);
    }
  }
  return loss;
}

LossReport total_loss(double bpr, double contrastive, double beta) {
  require(beta >= 0.0, "total_loss: beta must be >= 0");
  LossReport r;
  r.bpr = bpr;
  r.contrastive = contrastive;
  r.beta = beta;
  r.total = bpr + beta * contrastive;
  return r;
}

}  // namespace micro
