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

#include "micro/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "micro/error.hpp"
#include "micro/simd.hpp"

namespace micro {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::uint64_t> row_ptr,
                           std::vector<std::uint32_t> col_idx,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  validate();
}

SparseMatrix SparseMatrix::from_rows(std::size_t cols,
                                     std::vector<std::vector<SparseEntry>> rows) {
  SparseMatrix m(rows.size(), cols);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  m.col_idx_.reserve(total);
  m.values_.reserve(total);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
    for (const auto& e : r) {
      m.col_idx_.push_back(e.col);
      m.values_.push_back(e.value);
    }
    m.row_ptr_[i + 1] = m.col_idx_.size();
  }
  m.validate();
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::vector<SparseEntry>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].push_back({static_cast<std::uint32_t>(i), 1.0});
  }
  return from_rows(n, std::move(rows));
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const std::ptrdiff_t p = find(r, c);
  return p < 0 ? 0.0 : values_[static_cast<std::size_t>(p)];
}

std::ptrdiff_t SparseMatrix::find(std::size_t r, std::size_t c) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
  if (it == last || *it != c) return -1;
  return it - col_idx_.begin();
}

void SparseMatrix::validate() const {
  require(row_ptr_.size() == rows_ + 1, "sparse: row pointer length " +
                                            std::to_string(row_ptr_.size()) +
                                            " != rows + 1");
  require(row_ptr_.front() == 0, "sparse: first row pointer must be 0");
  require(row_ptr_.back() == col_idx_.size() && col_idx_.size() == values_.size(),
          "sparse: last row pointer must equal nnz");
  for (std::size_t r = 0; r < rows_; ++r) {
    require(row_ptr_[r] <= row_ptr_[r + 1], "sparse: row pointers decrease at row " +
                                                std::to_string(r));
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      require(col_idx_[p] < cols_, "sparse: column out of range in row " +
                                       std::to_string(r));
      if (p > row_ptr_[r]) {
        require(col_idx_[p - 1] < col_idx_[p],
                "sparse: columns not strictly increasing in row " + std::to_string(r));
      }
      require(std::isfinite(values_[p]) && values_[p] >= 0.0,
              "sparse: value must be finite and nonnegative in row " +
                  std::to_string(r));
    }
  }
}

DenseMatrix SparseMatrix::densify() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      d(r, col_idx_[p]) = values_[p];
    }
  }
  return d;
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> sums(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) sums[r] += values_[p];
  }
  return sums;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& h) {
  require(a.cols() == h.rows(), "spmm: shape mismatch " + std::to_string(a.rows()) +
                                    "x" + std::to_string(a.cols()) + " * " + h.shape());
  DenseMatrix out(a.rows(), h.cols());
  const auto cols = a.col_idx();
  const auto vals = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double* dst = out.row(r).data();
    for (std::size_t p = a.row_begin(r); p < a.row_end(r); ++p) {
      simd::axpy(vals[p], h.row(cols[p]).data(), dst, h.cols());
    }
  }
  return out;
}

DenseMatrix spmm_transposed(const SparseMatrix& a, const DenseMatrix& h) {
  require(a.rows() == h.rows(),
          "spmm_transposed: shape mismatch (" + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()) + ")^T * " + h.shape());
  DenseMatrix out(a.cols(), h.cols());
  const auto cols = a.col_idx();
  const auto vals = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* src = h.row(r).data();
    for (std::size_t p = a.row_begin(r); p < a.row_end(r); ++p) {
      simd::axpy(vals[p], src, out.row(cols[p]).data(), h.cols());
    }
  }
  return out;
}

}  // namespace micro
