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

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "micro/model.hpp"
#include "micro/split.hpp"
#include "micro/synthetic.hpp"

namespace micro {

/// Everything one command needs. Text form: one `key = value` per line,
/// `#` comments, dotted keys (`trainer.beta = 0.03`). Trainer keys may also
/// be given without the `trainer.` prefix; `seed` sets every seed at once.
struct ExperimentConfig {
  std::filesystem::path interactions;
  std::filesystem::path manifest;
  std::vector<std::pair<std::string, std::filesystem::path>> features;
  SplitSpec split;
  TrainerConfig trainer;
  SyntheticSpec synth;
  std::string synth_format = "mfv";
  std::vector<std::size_t> pilot_k{5, 10, 15, 20};
  std::filesystem::path output_dir = "out";

  // Relative paths are resolved against `base_dir`. Unknown keys and
  // malformed values are rejected.
  void set(const std::string& key, const std::string& value,
           const std::filesystem::path& base_dir = std::filesystem::current_path());

  // Canonical, fully resolved key/value lines; parsing them back yields an
  // identical config.
  std::vector<std::pair<std::string, std::string>> entries() const;
  std::string to_text() const;

  // 64-bit digest of the canonical text, output directory excluded.
  std::uint64_t hash() const;
  std::string hash_hex() const;

  static ExperimentConfig load(const std::filesystem::path& path);
  static ExperimentConfig parse(const std::string& text,
                                const std::filesystem::path& base_dir);
};

// Splits "key=value"; rejects a missing '='.
std::pair<std::string, std::string> split_assignment(const std::string& text);

}  // namespace micro
