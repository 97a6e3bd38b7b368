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

#include <filesystem>
#include <string>

#include "micro/dense.hpp"

namespace micro {

/// Precomputed content features of one modality; row i belongs to item i.
struct FeatureMatrix {
  std::string modality;
  DenseMatrix values;

  std::size_t items() const { return values.rows(); }
  std::size_t dim() const { return values.cols(); }
};

// Rejects non-finite values and all-zero rows.
void validate_features(const FeatureMatrix& features);

// Loads .mfv (binary) or .csv by extension. When expected_rows is nonzero
// the row count must match it.
FeatureMatrix load_features(const std::filesystem::path& path, const std::string& modality,
                            std::size_t expected_rows = 0);

// Binary layout: "MFV1", u32 rows, u32 cols, u8 element width (4 or 8),
// row-major little-endian values.
void write_features_mfv(const std::filesystem::path& path, const DenseMatrix& values,
                        int element_width = 8);
void write_features_csv(const std::filesystem::path& path, const DenseMatrix& values);

}  // namespace micro
