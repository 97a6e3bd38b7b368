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

#include "micro/params.hpp"

#include "micro/error.hpp"

namespace micro {

std::size_t ParameterSet::add(std::string name, DenseMatrix value) {
  require(find(name) == npos, "parameter registered twice: " + name);
  tensors_.push_back({std::move(name), std::move(value)});
  return tensors_.size() - 1;
}

std::size_t ParameterSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].name == name) return i;
  }
  return npos;
}

DenseMatrix& ParameterSet::get(const std::string& name) {
  const std::size_t i = find(name);
  require(i != npos, "unknown parameter: " + name);
  return tensors_[i].value;
}

const DenseMatrix& ParameterSet::get(const std::string& name) const {
  const std::size_t i = find(name);
  require(i != npos, "unknown parameter: " + name);
  return tensors_[i].value;
}

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet out;
  for (const auto& t : tensors_) out.add(t.name, DenseMatrix(t.value.rows(), t.value.cols()));
  return out;
}

void ParameterSet::set_zero() {
  for (auto& t : tensors_) t.value.fill(0.0);
}

bool ParameterSet::same_layout(const ParameterSet& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& a = tensors_[i];
    const auto& b = other.tensors_[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() ||
        a.value.cols() != b.value.cols()) {
      return false;
    }
  }
  return true;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.value.size();
  return n;
}

bool ParameterSet::operator==(const ParameterSet& other) const {
  if (!same_layout(other)) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!(tensors_[i].value == other.tensors_[i].value)) return false;
  }
  return true;
}

}  // namespace micro
