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

#include "micro/dense.hpp"

#include <algorithm>
#include <cmath>

#include "micro/error.hpp"
#include "micro/simd.hpp"

namespace micro {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows_ * cols_,
          "DenseMatrix: data length " + std::to_string(data_.size()) +
              " does not match " + shape());
}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  DenseMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    require(row.size() == c, "DenseMatrix::from_rows: ragged rows");
    std::copy(row.begin(), row.end(), m.row(i++).begin());
  }
  return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string DenseMatrix::shape() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(),
          "matmul: shape mismatch " + a.shape() + " * " + b.shape());
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* dst = out.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double v = a(i, k);
      if (v != 0.0) simd::axpy(v, b.row(k).data(), dst, n);
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(),
          "matmul_nt: shape mismatch " + a.shape() + " * (" + b.shape() + ")^T");
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      out(i, j) = simd::dot(ai, b.row(j).data(), a.cols());
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(),
          "matmul_tn: shape mismatch (" + a.shape() + ")^T * " + b.shape());
  DenseMatrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* bk = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double v = a(k, i);
      if (v != 0.0) simd::axpy(v, bk, out.row(i).data(), n);
    }
  }
  return out;
}

void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y) {
  require(x.rows() == y.rows() && x.cols() == y.cols(),
          "axpy: shape mismatch " + x.shape() + " vs " + y.shape());
  simd::axpy(alpha, x.data(), y.data(), x.size());
}

void scale(DenseMatrix& x, double alpha) { simd::scale(alpha, x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "dot: length mismatch");
  return simd::dot(x.data(), y.data(), x.size());
}

double norm2(std::span<const double> x) {
  return std::sqrt(simd::dot(x.data(), x.data(), x.size()));
}

void add_row_vector(DenseMatrix& m, const DenseMatrix& bias) {
  require(bias.rows() == 1 && bias.cols() == m.cols(),
          "add_row_vector: bias " + bias.shape() + " vs " + m.shape());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    simd::add(bias.data(), m.row(i).data(), m.cols());
  }
}

DenseMatrix column_sums(const DenseMatrix& m) {
  DenseMatrix out(1, m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    simd::add(m.row(i).data(), out.data(), m.cols());
  }
  return out;
}

bool all_finite(const DenseMatrix& m) {
  return std::all_of(m.values().begin(), m.values().end(),
                     [](double v) { return std::isfinite(v); });
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "max_abs_diff: shape mismatch " + a.shape() + " vs " + b.shape());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  }
  return worst;
}

}  // namespace micro
