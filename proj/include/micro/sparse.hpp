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

namespace micro {

struct SparseEntry {
  std::uint32_t col;
  double value;
};

/// CSR matrix with nonnegative values and strictly increasing columns per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);
  SparseMatrix(std::size_t rows, std::size_t cols,
               std::vector<std::uint64_t> row_ptr,
               std::vector<std::uint32_t> col_idx, std::vector<double> values);

  // Builds from per-row entry lists; entries need not be sorted but columns
  // must be unique within a row.
  static SparseMatrix from_rows(std::size_t cols,
                                std::vector<std::vector<SparseEntry>> rows);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::size_t row_begin(std::size_t r) const { return row_ptr_[r]; }
  std::size_t row_end(std::size_t r) const { return row_ptr_[r + 1]; }
  std::size_t row_nnz(std::size_t r) const { return row_end(r) - row_begin(r); }

  std::span<const std::uint64_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::uint32_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  // Value at (r, c), or 0 when not stored.
  double at(std::size_t r, std::size_t c) const;
  // Position of (r, c) in the value array, or -1.
  std::ptrdiff_t find(std::size_t r, std::size_t c) const;

  // Throws on any CSR or value invariant violation.
  void validate() const;

  DenseMatrix densify() const;
  std::vector<double> row_sums() const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint64_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

// a * h, rows accumulated in stored column order.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& h);
// a^T * h, accumulated row by row of a.
DenseMatrix spmm_transposed(const SparseMatrix& a, const DenseMatrix& h);

}  // namespace micro
