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

#include "micro/latent_graph.hpp"

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "micro/error.hpp"
#include "micro/rng.hpp"
#include "micro/simd.hpp"

namespace micro {
namespace {

constexpr std::size_t kBlockRows = 256;

// Unit-normalized rows; zero-norm rows stay zero and are flagged.
DenseMatrix unit_rows(const DenseMatrix& x, std::vector<double>& norms) {
  DenseMatrix u = x;
  norms.assign(x.rows(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double n = norm2(x.row(i));
    norms[i] = n;
    if (n > 0.0 && std::isfinite(n)) simd::scale(1.0 / n, u.row(i).data(), u.cols());
  }
  return u;
}

bool usable(double norm) { return norm > 0.0 && std::isfinite(norm); }

struct Normalized {
  SparseMatrix adjacency;
  std::vector<double> degree;
  std::vector<std::size_t> source_slot;
};

Normalized normalize_impl(const SparseMatrix& s) {
  for (double v : s.values()) {
    require(v >= 0.0 && std::isfinite(v), "normalize_symmetric: negative or non-finite edge");
  }
  Normalized out;
  out.degree = s.row_sums();
  std::vector<std::uint64_t> row_ptr(s.rows() + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  cols.reserve(s.nnz());
  vals.reserve(s.nnz());
  out.source_slot.reserve(s.nnz());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t p = s.row_begin(i); p < s.row_end(i); ++p) {
      const std::uint32_t j = s.col_idx()[p];
      const double dj = j < out.degree.size() ? out.degree[j] : 0.0;
      if (dj <= 0.0) continue;
      cols.push_back(j);
      vals.push_back(s.values()[p] / std::sqrt(out.degree[i] * dj));
      out.source_slot.push_back(p);
    }
    row_ptr[i + 1] = cols.size();
  }
  out.adjacency =
      SparseMatrix(s.rows(), s.cols(), std::move(row_ptr), std::move(cols), std::move(vals));
  return out;
}

}  // namespace

DenseMatrix cosine_similarity_block(const DenseMatrix& features, std::size_t row_begin,
                                    std::size_t row_end) {
  require(row_begin <= row_end && row_end <= features.rows(),
          "cosine_similarity_block: bad row range");
  std::vector<double> norms;
  const DenseMatrix u = unit_rows(features, norms);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (!usable(norms[i])) fail("cosine similarity: zero-norm feature row " + std::to_string(i));
  }
  DenseMatrix block(row_end - row_begin, features.rows());
  for (std::size_t r = row_begin; r < row_end; ++r) {
    const double* ur = u.row(r).data();
    auto out = block.row(r - row_begin);
    for (std::size_t j = 0; j < u.rows(); ++j) {
      out[j] = j == r ? 1.0 : simd::dot(ur, u.row(j).data(), u.cols());
    }
  }
  return block;
}

std::vector<std::vector<SparseEntry>> topk_rows(const DenseMatrix& similarity_rows,
                                                std::size_t k, std::size_t row_offset,
                                                bool keep_self_loops) {
  require(k >= 1, "sparsify_topk: k must be >= 1");
  std::vector<std::vector<SparseEntry>> rows(similarity_rows.rows());
  std::vector<SparseEntry> candidates;
  for (std::size_t r = 0; r < similarity_rows.rows(); ++r) {
    candidates.clear();
    const auto row = similarity_rows.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!keep_self_loops && j == r + row_offset) continue;
      if (row[j] > 0.0) candidates.push_back({static_cast<std::uint32_t>(j), row[j]});
    }
    const std::size_t keep = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(),
                      [](const SparseEntry& a, const SparseEntry& b) {
                        return a.value != b.value ? a.value > b.value : a.col < b.col;
                      });
    rows[r].assign(candidates.begin(), candidates.begin() + keep);
  }
  return rows;
}

SparseMatrix sparsify_topk(const DenseMatrix& similarity, std::size_t k, bool keep_self_loops) {
  return SparseMatrix::from_rows(similarity.cols(),
                                 topk_rows(similarity, k, 0, keep_self_loops));
}

SparseMatrix normalize_symmetric(const SparseMatrix& adjacency) {
  return normalize_impl(adjacency).adjacency;
}

ModalityGraph build_initial_graph(const DenseMatrix& features, const GraphOptions& options,
                                  const std::string& modality) {
  require(options.k >= 1, "build_initial_graph: k must be >= 1");
  const std::size_t n = features.rows();
  std::vector<std::vector<SparseEntry>> rows;
  rows.reserve(n);
  for (std::size_t begin = 0; begin < n; begin += kBlockRows) {
    const std::size_t end = std::min(n, begin + kBlockRows);
    auto block = topk_rows(cosine_similarity_block(features, begin, end), options.k, begin,
                           options.keep_self_loops);
    for (auto& r : block) rows.push_back(std::move(r));
  }
  ModalityGraph g;
  g.modality = modality;
  g.stage = GraphStage::kInitial;
  g.k = options.k;
  g.adjacency = normalize_symmetric(SparseMatrix::from_rows(n, std::move(rows)));
  return g;
}

ModalityGraph cached_initial_graph(const DenseMatrix& features, const GraphOptions& options,
                                   const std::string& modality,
                                   const std::filesystem::path& cache_dir) {
  std::uint64_t h = fnv1a(std::string_view(reinterpret_cast<const char*>(features.data()),
                                           features.size() * sizeof(double)));
  const std::string dims = std::to_string(features.rows()) + "x" + std::to_string(features.cols());
  h = fnv1a(dims, h);
  char name[96];
  std::snprintf(name, sizeof name, "initial-%016llx-k%zu-%s.mgr",
                static_cast<unsigned long long>(h), options.k,
                options.keep_self_loops ? "self" : "noself");
  std::filesystem::create_directories(cache_dir);
  const auto path = cache_dir / name;

  const auto lock_path = cache_dir / ".lock";
  const int fd = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
  if (fd < 0) fail("cannot open graph cache lock: " + lock_path.string());
  ::flock(fd, LOCK_EX);
  ModalityGraph g;
  try {
    if (std::filesystem::exists(path)) {
      g = read_graph(path);
      require(g.adjacency.rows() == features.rows() && g.k == options.k,
              "graph cache entry does not match features: " + path.string());
      g.modality = modality;
    } else {
      g = build_initial_graph(features, options, modality);
      const auto tmp = path.string() + ".tmp";
      write_graph(tmp, g);
      std::filesystem::rename(tmp, path);
    }
  } catch (...) {
    ::flock(fd, LOCK_UN);
    ::close(fd);
    throw;
  }
  ::flock(fd, LOCK_UN);
  ::close(fd);
  return g;
}

DenseMatrix transform_features(const DenseMatrix& features, const DenseMatrix& weight,
                               const DenseMatrix& bias) {
  require(weight.cols() == features.cols(),
          "transform_features: weight " + weight.shape() + " vs features " + features.shape());
  require(bias.rows() == 1 && bias.cols() == weight.rows(),
          "transform_features: bias " + bias.shape() + " vs weight " + weight.shape());
  DenseMatrix out = matmul_nt(features, weight);
  add_row_vector(out, bias);
  return out;
}

TransformGrads transform_features_backward(const DenseMatrix& features,
                                           const DenseMatrix& d_transformed) {
  return {matmul_tn(d_transformed, features), column_sums(d_transformed)};
}

LearnedGraph build_learned_graph(const DenseMatrix& transformed, const GraphOptions& options,
                                 const SparseMatrix* selection) {
  require(options.k >= 1, "build_learned_graph: k must be >= 1");
  const std::size_t n = transformed.rows();
  LearnedGraph g;
  g.unit_rows = unit_rows(transformed, g.norms);
  for (double nrm : g.norms) g.collapsed_rows += !usable(nrm);

  auto similarity = [&](std::size_t i, std::size_t j) {
    return i == j ? 1.0 : simd::dot(g.unit_rows.row(i).data(), g.unit_rows.row(j).data(),
                                    g.unit_rows.cols());
  };

  std::vector<std::vector<SparseEntry>> rows(n);
  if (selection) {
    require(selection->rows() == n && selection->cols() == n,
            "build_learned_graph: selection shape mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (!usable(g.norms[i])) continue;
      for (std::size_t p = selection->row_begin(i); p < selection->row_end(i); ++p) {
        const std::uint32_t j = selection->col_idx()[p];
        if (!usable(g.norms[j])) continue;
        const double s = similarity(i, j);
        if (s > 0.0) rows[i].push_back({j, s});
      }
    }
  } else {
    DenseMatrix block;
    for (std::size_t begin = 0; begin < n; begin += kBlockRows) {
      const std::size_t end = std::min(n, begin + kBlockRows);
      block = DenseMatrix(end - begin, n);
      for (std::size_t i = begin; i < end; ++i) {
        auto out = block.row(i - begin);
        if (!usable(g.norms[i])) {
          std::fill(out.begin(), out.end(), -1.0);
          continue;
        }
        for (std::size_t j = 0; j < n; ++j) out[j] = usable(g.norms[j]) ? similarity(i, j) : -1.0;
      }
      auto kept = topk_rows(block, options.k, begin, options.keep_self_loops);
      for (std::size_t r = 0; r < kept.size(); ++r) rows[begin + r] = std::move(kept[r]);
    }
  }
  g.similarity = SparseMatrix::from_rows(n, std::move(rows));
  Normalized norm = normalize_impl(g.similarity);
  g.adjacency = std::move(norm.adjacency);
  g.degree = std::move(norm.degree);
  return g;
}

DenseMatrix learned_graph_backward(const LearnedGraph& g, std::span<const double> d_adjacency) {
  const SparseMatrix& a = g.adjacency;
  const SparseMatrix& s = g.similarity;
  require(d_adjacency.size() == a.nnz(), "learned_graph_backward: gradient length mismatch");
  const std::size_t n = a.rows();

  // Map adjacency entries back to similarity entries; patterns coincide
  // except for edges dropped into zero-degree rows.
  std::vector<double> d_sim(s.nnz(), 0.0);
  std::vector<double> d_deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t q = s.row_begin(i);
    for (std::size_t p = a.row_begin(i); p < a.row_end(i); ++p) {
      const std::uint32_t j = a.col_idx()[p];
      while (s.col_idx()[q] != j) ++q;
      const double grad = d_adjacency[p];
      if (grad == 0.0) continue;
      const double value = a.values()[p];
      d_sim[q] += grad / std::sqrt(g.degree[i] * g.degree[j]);
      d_deg[i] -= 0.5 * grad * value / g.degree[i];
      d_deg[j] -= 0.5 * grad * value / g.degree[j];
    }
  }

  const std::size_t d = g.unit_rows.cols();
  DenseMatrix d_unit(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = s.row_begin(i); q < s.row_end(i); ++q) {
      const std::uint32_t j = s.col_idx()[q];
      if (j == i) continue;  // self-similarity is the constant 1
      const double grad = d_sim[q] + d_deg[i];
      if (grad == 0.0) continue;
      simd::axpy(grad, g.unit_rows.row(j).data(), d_unit.row(i).data(), d);
      simd::axpy(grad, g.unit_rows.row(i).data(), d_unit.row(j).data(), d);
    }
  }

  // Through u = x / |x|: dx = (du - (du . u) u) / |x|.
  for (std::size_t i = 0; i < n; ++i) {
    auto du = d_unit.row(i);
    if (!usable(g.norms[i])) {
      std::fill(du.begin(), du.end(), 0.0);
      continue;
    }
    const double* u = g.unit_rows.row(i).data();
    const double proj = simd::dot(du.data(), u, d);
    simd::axpy(-proj, u, du.data(), d);
    simd::scale(1.0 / g.norms[i], du.data(), d);
  }
  return d_unit;
}

BlendedGraph blend_graphs(const SparseMatrix& initial, const SparseMatrix& learned,
                          double lambda) {
  require(lambda >= 0.0 && lambda <= 1.0, "blend_graphs: lambda must lie in [0, 1]");
  require(initial.rows() == learned.rows() && initial.cols() == learned.cols(),
          "blend_graphs: shape mismatch");
  const bool use_initial = lambda > 0.0;
  const bool use_learned = lambda < 1.0;
  BlendedGraph out;
  out.lambda = lambda;
  std::vector<std::uint64_t> row_ptr(initial.rows() + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < initial.rows(); ++i) {
    std::size_t p = use_initial ? initial.row_begin(i) : initial.row_end(i);
    std::size_t q = use_learned ? learned.row_begin(i) : learned.row_end(i);
    const std::size_t pe = initial.row_end(i);
    const std::size_t qe = learned.row_end(i);
    while (p < pe || q < qe) {
      const std::uint32_t cp = p < pe ? initial.col_idx()[p] : UINT32_MAX;
      const std::uint32_t cq = q < qe ? learned.col_idx()[q] : UINT32_MAX;
      if (cp < cq) {
        cols.push_back(cp);
        vals.push_back(lambda * initial.values()[p++]);
        out.learned_slot.push_back(-1);
      } else if (cq < cp) {
        cols.push_back(cq);
        vals.push_back((1.0 - lambda) * learned.values()[q]);
        out.learned_slot.push_back(static_cast<std::ptrdiff_t>(q++));
      } else {
        cols.push_back(cp);
        vals.push_back(lambda * initial.values()[p++] + (1.0 - lambda) * learned.values()[q]);
        out.learned_slot.push_back(static_cast<std::ptrdiff_t>(q++));
      }
    }
    row_ptr[i + 1] = cols.size();
  }
  out.adjacency = SparseMatrix(initial.rows(), initial.cols(), std::move(row_ptr),
                               std::move(cols), std::move(vals));
  return out;
}

std::vector<double> blend_backward(const BlendedGraph& blended, std::size_t learned_nnz,
                                   std::span<const double> d_blended) {
  require(d_blended.size() == blended.adjacency.nnz(), "blend_backward: gradient length mismatch");
  std::vector<double> d_learned(learned_nnz, 0.0);
  for (std::size_t p = 0; p < d_blended.size(); ++p) {
    const auto slot = blended.learned_slot[p];
    if (slot >= 0) d_learned[static_cast<std::size_t>(slot)] += (1.0 - blended.lambda) * d_blended[p];
  }
  return d_learned;
}

namespace {

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) fail("truncated graph file: " + path.string());
  return v;
}

}  // namespace

void write_graph(const std::filesystem::path& path, const ModalityGraph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write graph file: " + path.string());
  const SparseMatrix& a = graph.adjacency;
  out.write("MGR1", 4);
  put(out, static_cast<std::uint32_t>(a.rows()));
  put(out, static_cast<std::uint32_t>(graph.k));
  put(out, graph.lambda);
  put(out, static_cast<std::uint8_t>(graph.stage));
  for (auto v : a.row_ptr()) put(out, static_cast<std::uint64_t>(v));
  for (auto c : a.col_idx()) put(out, c);
  for (auto v : a.values()) put(out, v);
  if (!out) fail("failed writing graph file: " + path.string());
}

ModalityGraph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open graph file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MGR1", 4) != 0) fail("bad graph file magic: " + path.string());
  const auto n = get<std::uint32_t>(in, path);
  ModalityGraph g;
  g.k = get<std::uint32_t>(in, path);
  g.lambda = get<double>(in, path);
  const auto stage = get<std::uint8_t>(in, path);
  require(stage <= 2, "bad graph stage byte in " + path.string());
  g.stage = static_cast<GraphStage>(stage);
  std::vector<std::uint64_t> row_ptr(n + 1);
  for (auto& v : row_ptr) v = get<std::uint64_t>(in, path);
  const std::uint64_t nnz = row_ptr.back();
  std::vector<std::uint32_t> cols(nnz);
  for (auto& c : cols) c = get<std::uint32_t>(in, path);
  std::vector<double> vals(nnz);
  for (auto& v : vals) v = get<double>(in, path);
  g.adjacency = SparseMatrix(n, n, std::move(row_ptr), std::move(cols), std::move(vals));
  return g;
}

}  // namespace micro
