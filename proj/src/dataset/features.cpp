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

#include "micro/features.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "micro/error.hpp"

namespace micro {

static_assert(std::endian::native == std::endian::little,
              "feature files are little-endian; big-endian hosts are unsupported");

void validate_features(const FeatureMatrix& f) {
  for (std::size_t i = 0; i < f.values.rows(); ++i) {
    bool nonzero = false;
    for (double v : f.values.row(i)) {
      if (!std::isfinite(v)) {
        fail("features '" + f.modality + "': non-finite value in row " + std::to_string(i));
      }
      nonzero = nonzero || v != 0.0;
    }
    if (!nonzero) {
      fail("features '" + f.modality + "': row " + std::to_string(i) + " is all zeros");
    }
  }
}

namespace {

template <typename T>
T read_pod(std::istream& in, const std::string& what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail("truncated feature file while reading " + what);
  return v;
}

DenseMatrix read_mfv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open feature file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MFV1", 4) != 0) {
    fail("feature file " + path.string() + ": bad magic, expected MFV1");
  }
  const auto rows = read_pod<std::uint32_t>(in, "rows");
  const auto cols = read_pod<std::uint32_t>(in, "cols");
  const auto width = read_pod<std::uint8_t>(in, "element width");
  if (width != 4 && width != 8) {
    fail("feature file " + path.string() + ": element width must be 4 or 8");
  }
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) {
    v = width == 8 ? read_pod<double>(in, "values")
                   : static_cast<double>(read_pod<float>(in, "values"));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    fail("feature file " + path.string() + ": trailing bytes after values");
  }
  return m;
}

DenseMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open feature file: " + path.string());
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t n = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used == 0 || used != cell.size()) {
        fail(path.string() + ":" + std::to_string(rows + 1) + ": non-numeric cell '" +
             cell + "'");
      }
      data.push_back(v);
      ++n;
    }
    if (rows == 0) cols = n;
    if (n != cols) {
      fail(path.string() + ":" + std::to_string(rows + 1) + ": expected " +
           std::to_string(cols) + " columns, got " + std::to_string(n));
    }
    ++rows;
  }
  if (rows == 0) fail("feature file is empty: " + path.string());
  return DenseMatrix(rows, cols, std::move(data));
}

}  // namespace

FeatureMatrix load_features(const std::filesystem::path& path, const std::string& modality,
                            std::size_t expected_rows) {
  if (!std::filesystem::exists(path)) fail("feature file not found: " + path.string());
  FeatureMatrix f;
  f.modality = modality;
  const auto ext = path.extension().string();
  if (ext == ".mfv") {
    f.values = read_mfv(path);
  } else if (ext == ".csv") {
    f.values = read_csv(path);
  } else {
    fail("feature file " + path.string() + ": unknown extension (expected .mfv or .csv)");
  }
  if (expected_rows != 0 && f.values.rows() != expected_rows) {
    fail("feature file " + path.string() + ": " + std::to_string(f.values.rows()) +
         " rows but the manifest lists " + std::to_string(expected_rows) + " items");
  }
  validate_features(f);
  return f;
}

void write_features_mfv(const std::filesystem::path& path, const DenseMatrix& values,
                        int element_width) {
  require(element_width == 4 || element_width == 8, "MFV element width must be 4 or 8");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write feature file: " + path.string());
  out.write("MFV1", 4);
  const auto rows = static_cast<std::uint32_t>(values.rows());
  const auto cols = static_cast<std::uint32_t>(values.cols());
  const auto width = static_cast<std::uint8_t>(element_width);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(&width), sizeof width);
  for (double v : values.values()) {
    if (element_width == 8) {
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    } else {
      const float f = static_cast<float>(v);
      out.write(reinterpret_cast<const char*>(&f), sizeof f);
    }
  }
}

void write_features_csv(const std::filesystem::path& path, const DenseMatrix& values) {
  std::ofstream out(path);
  if (!out) fail("cannot write feature file: " + path.string());
  out << std::setprecision(17);
  for (std::size_t i = 0; i < values.rows(); ++i) {
    for (std::size_t j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << values(i, j);
    }
    out << '\n';
  }
}

}  // namespace micro
