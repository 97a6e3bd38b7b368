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
namespace {

// Rows of `source` at `subset`, unit-normalized.
DenseMatrix gather_unit(const DenseMatrix& source, std::span<const std::uint32_t> subset,
                        std::vector<double>& norms, const char* what) {
  DenseMatrix out(subset.size(), source.cols());
  norms.resize(subset.size());
  for (std::size_t r = 0; r < subset.size(); ++r) {
    const auto src = source.row(subset[r]);
    const double n = norm2(src);
    if (!(n > 0.0) || !std::isfinite(n)) {
      fail_numerical(std::string("contrastive loss: zero-norm ") + what + " embedding for item " +
                     std::to_string(subset[r]));
    }
    norms[r] = n;
    auto dst = out.row(r);
    for (std::size_t c = 0; c < src.size(); ++c) dst[c] = src[c] / n;
  }
  return out;
}

// Accumulates d(-log softmax_0(logits)) * scale into the logit gradients.
double neg_log_softmax_first(std::span<const double> logits, std::span<double> d_logits,
                             double scale) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double v : logits) total += std::exp(v - top);
  const double lse = top + std::log(total);
  for (std::size_t t = 0; t < logits.size(); ++t) {
    d_logits[t] = scale * std::exp(logits[t] - lse);
  }
  d_logits[0] -= scale;
  return lse - logits[0];
}

// dx = (du - (du . u) u) / |x| written into row `dst` of `out`.
void unnormalize_into(const DenseMatrix& unit, const DenseMatrix& d_unit,
                      const std::vector<double>& norms, std::span<const std::uint32_t> subset,
                      DenseMatrix& out) {
  const std::size_t d = unit.cols();
  for (std::size_t r = 0; r < subset.size(); ++r) {
    const double* u = unit.row(r).data();
    const double* du = d_unit.row(r).data();
    const double proj = simd::dot(du, u, d);
    auto dst = out.row(subset[r]);
    for (std::size_t c = 0; c < d; ++c) dst[c] += (du[c] - proj * u[c]) / norms[r];
  }
}

}  // namespace

double contrastive_loss(std::span<const DenseMatrix* const> modalities, const DenseMatrix& fused,
                        std::span<const std::uint32_t> subset, const ContrastiveOptions& options,
                        ContrastiveGrads* grads) {
  require(!modalities.empty(), "contrastive loss: at least one modality");
  require(subset.size() >= 2, "contrastive loss: need at least two items for negatives");
  require(options.temperature > 0.0, "contrastive loss: temperature must be positive");
  {
    std::vector<std::uint32_t> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "contrastive loss: subset items must be distinct");
  }
  const std::size_t n = subset.size();
  const std::size_t m_count = modalities.size();
  const double inv_tau = 1.0 / options.temperature;
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(m_count) * 2.0);

  std::vector<double> fused_norms;
  const DenseMatrix f = gather_unit(fused, subset, fused_norms, "fused");
  const DenseMatrix ff = matmul_nt(f, f);
  DenseMatrix d_ff(n, n);
  DenseMatrix d_f(n, fused.cols());

  if (grads) {
    grads->modalities.clear();
    grads->fused = DenseMatrix(fused.rows(), fused.cols());
  }

  std::vector<double> logits(2 * n - 1);
  std::vector<double> d_logits(2 * n - 1);
  double loss = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    std::vector<double> norms;
    const DenseMatrix p = gather_unit(*modalities[m], subset, norms, "modality");
    const DenseMatrix pf = matmul_nt(p, f);  // theta(h_i^m, h_j)
    const DenseMatrix pp = matmul_nt(p, p);  // theta(h_i^m, h_j^m)
    DenseMatrix d_pf(n, n);
    DenseMatrix d_pp(n, n);

    for (std::size_t i = 0; i < n; ++i) {
      // I(h_i^m, h_i)
      logits[0] = pf(i, i) * inv_tau;
      std::size_t t = 1;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        logits[t++] = pf(i, j) * inv_tau;
        logits[t++] = pp(i, j) * inv_tau;
      }
      loss += scale * neg_log_softmax_first(logits, d_logits, scale * inv_tau);
      d_pf(i, i) += d_logits[0];
      t = 1;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        d_pf(i, j) += d_logits[t++];
        d_pp(i, j) += d_logits[t++];
      }

      // I(h_i, h_i^m)
      t = 1;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        logits[t++] = (options.symmetric_negatives ? pf(j, i) : pf(i, j)) * inv_tau;
        logits[t++] = ff(i, j) * inv_tau;
      }
      loss += scale * neg_log_softmax_first(logits, d_logits, scale * inv_tau);
      d_pf(i, i) += d_logits[0];
      t = 1;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        if (options.symmetric_negatives) {
          d_pf(j, i) += d_logits[t++];
        } else {
          d_pf(i, j) += d_logits[t++];
        }
        d_ff(i, j) += d_logits[t++];
      }
    }

    if (grads) {
      DenseMatrix d_p = matmul(d_pf, f);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double g = d_pp(i, j) + d_pp(j, i);
          if (g != 0.0) simd::axpy(g, p.row(j).data(), d_p.row(i).data(), p.cols());
        }
      }
      axpy(1.0, matmul_tn(d_pf, p), d_f);
      DenseMatrix full(modalities[m]->rows(), modalities[m]->cols());
      unnormalize_into(p, d_p, norms, subset, full);
      grads->modalities.push_back(std::move(full));
    }
  }

  if (grads) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double g = d_ff(i, j) + d_ff(j, i);
        if (g != 0.0) simd::axpy(g, f.row(j).data(), d_f.row(i).data(), f.cols());
      }
    }
    unnormalize_into(f, d_f, fused_norms, subset, grads->fused);
  }
  return loss;
}

}  // namespace micro
