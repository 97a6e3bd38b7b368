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
#include <limits>
#include <string>
#include <vector>

#include "micro/dense.hpp"

namespace micro {

struct NamedTensor {
  std::string name;
  DenseMatrix value;
};

/// Ordered collection of uniquely named tensors. Model parameters, their
/// gradients and optimizer moments all share this layout.
class ParameterSet {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::size_t add(std::string name, DenseMatrix value);

  std::size_t size() const noexcept { return tensors_.size(); }
  NamedTensor& operator[](std::size_t i) { return tensors_[i]; }
  const NamedTensor& operator[](std::size_t i) const { return tensors_[i]; }

  std::size_t find(const std::string& name) const;
  DenseMatrix& get(const std::string& name);
  const DenseMatrix& get(const std::string& name) const;

  auto begin() { return tensors_.begin(); }
  auto end() { return tensors_.end(); }
  auto begin() const { return tensors_.begin(); }
  auto end() const { return tensors_.end(); }

  // Same names and shapes, all zeros.
  ParameterSet zeros_like() const;
  void set_zero();
  bool same_layout(const ParameterSet& other) const;
  std::size_t scalar_count() const;

  bool operator==(const ParameterSet&) const;

 private:
  std::vector<NamedTensor> tensors_;
};

}  // namespace micro
