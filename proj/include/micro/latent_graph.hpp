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

// Modality-aware item-item graph mining: cosine kNN graphs over raw features
// (initial), over learned affine transforms of the features (learned), and
// their convex blend.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "micro/dense.hpp"
#include "micro/sparse.hpp"

namespace micro {

enum class GraphStage : std::uint8_t { kInitial = 0, kLearned = 1, kBlended = 2 };

struct GraphOptions {
  std::size_t k = 10;
  // The diagonal (similarity 1) competes for one of the k slots when kept.
  bool keep_self_loops = true;
};

struct ModalityGraph {
  std::string modality;
  GraphStage stage = GraphStage::kInitial;
  SparseMatrix adjacency;
  std::size_t k = 0;
  double lambda = 0.0;
};

// Rows [row_begin, row_end) of the cosine similarity matrix of `features`.
// Throws on a zero-norm row.
DenseMatrix cosine_similarity_block(const DenseMatrix& features, std::size_t row_begin,
                                    std::size_t row_end);

// Per row: negatives and zeros dropped, then the k largest values kept with
// ties going to the lower column. Rows are offset by `row_offset` within the
// full matrix so that the diagonal can be located when it must be skipped.
std::vector<std::vector<SparseEntry>> topk_rows(const DenseMatrix& similarity_rows,
                                                std::size_t k, std::size_t row_offset = 0,
                                                bool keep_self_loops = true);
SparseMatrix sparsify_topk(const DenseMatrix& similarity, std::size_t k,
                           bool keep_self_loops = true);

// value_ij / sqrt(deg_i * deg_j) with deg taken from row sums. Edges into a
// zero-degree row are dropped.
SparseMatrix normalize_symmetric(const SparseMatrix& adjacency);

ModalityGraph build_initial_graph(const DenseMatrix& features, const GraphOptions& options,
                                  const std::string& modality = "");

// Same as build_initial_graph, but memoized on disk under `cache_dir`, keyed
// by a hash of the feature values and the options.
ModalityGraph cached_initial_graph(const DenseMatrix& features, const GraphOptions& options,
                                   const std::string& modality,
                                   const std::filesystem::path& cache_dir);

/// ẽ = E W^T + b for W (d x d_m) and b (1 x d).
DenseMatrix transform_features(const DenseMatrix& features, const DenseMatrix& weight,
                               const DenseMatrix& bias);

struct TransformGrads {
  DenseMatrix weight;
  DenseMatrix bias;
};
TransformGrads transform_features_backward(const DenseMatrix& features,
                                           const DenseMatrix& d_transformed);

/// A learned graph plus what its backward pass needs. The kept-edge pattern
/// is a constant of the step; edge values are differentiable in ẽ.
struct LearnedGraph {
  SparseMatrix adjacency;        // normalized
  SparseMatrix similarity;       // kept raw cosines, same pattern
  std::vector<double> degree;    // row sums of `similarity`
  DenseMatrix unit_rows;         // ẽ_i / |ẽ_i|, zero for collapsed rows
  std::vector<double> norms;     // |ẽ_i|
  std::size_t collapsed_rows = 0;
};

// When `selection` is given its edge pattern is reused instead of running
// top-k; edges whose cosine is no longer positive are dropped.
LearnedGraph build_learned_graph(const DenseMatrix& transformed, const GraphOptions& options,
                                 const SparseMatrix* selection = nullptr);

// Gradient of a scalar with respect to ẽ, given its gradient with respect
// to the stored values of `graph.adjacency`.
DenseMatrix learned_graph_backward(const LearnedGraph& graph,
                                   std::span<const double> d_adjacency);

/// λ S̃ + (1 - λ) Ã over the union of both edge sets.
struct BlendedGraph {
  SparseMatrix adjacency;
  // For every stored entry, the index into the learned graph's values, or -1.
  std::vector<std::ptrdiff_t> learned_slot;
  double lambda = 0.0;
};

BlendedGraph blend_graphs(const SparseMatrix& initial, const SparseMatrix& learned,
                          double lambda);

// Gradient with respect to the learned values (length learned.nnz()).
std::vector<double> blend_backward(const BlendedGraph& blended, std::size_t learned_nnz,
                                   std::span<const double> d_blended);

// Cache file: "MGR1", u32 N, u32 k, f64 lambda, u8 stage, then
// u64 row pointers (N + 1), u32 column indices (nnz), f64 values (nnz).
void write_graph(const std::filesystem::path& path, const ModalityGraph& graph);
ModalityGraph read_graph(const std::filesystem::path& path);

}  // namespace micro
