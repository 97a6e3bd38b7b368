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

#include "micro/fusion.hpp"

#include "micro/error.hpp"
#include "micro/simd.hpp"

namespace micro {

PropagationLayers propagate(const SparseMatrix& graph, const DenseMatrix& input, int layers) {
  require(layers >= 0, "propagate: layer count must be >= 0, got " + std::to_string(layers));
  PropagationLayers out;
  out.layers.reserve(static_cast<std::size_t>(layers) + 1);
  out.layers.push_back(input);
  for (int l = 0; l < layers; ++l) out.layers.push_back(spmm(graph, out.layers.back()));
  return out;
}

PropagationGrads propagate_backward(const SparseMatrix& graph, const PropagationLayers& forward,
                                    const DenseMatrix& d_output) {
  PropagationGrads g;
  g.graph.assign(graph.nnz(), 0.0);
  DenseMatrix upstream = d_output;
  const std::size_t d = d_output.cols();
  for (std::size_t l = forward.depth(); l >= 1; --l) {
    const DenseMatrix& below = forward.layers[l - 1];
    for (std::size_t i = 0; i < graph.rows(); ++i) {
      const double* gi = upstream.row(i).data();
      for (std::size_t p = graph.row_begin(i); p < graph.row_end(i); ++p) {
        g.graph[p] += simd::dot(gi, below.row(graph.col_idx()[p]).data(), d);
      }
    }
    upstream = spmm_transposed(graph, upstream);
  }
  g.input = std::move(upstream);
  return g;
}

}  // namespace micro
