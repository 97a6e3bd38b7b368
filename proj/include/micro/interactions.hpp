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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace micro {

enum class SplitTag : std::uint8_t { kTrain = 0, kValid = 1, kTest = 2 };

const char* to_string(SplitTag tag);

struct Interaction {
  std::uint32_t user;
  std::uint32_t item;
  SplitTag tag = SplitTag::kTrain;
};

/// User -> positive item sets with per-interaction split tags. Interactions
/// are kept sorted by (user, item) and grouped per user.
class InteractionTable {
 public:
  InteractionTable() = default;

  // Sorts and deduplicates `pairs`; every pair starts tagged train.
  // `duplicates` (if given) receives the number of dropped repeats.
  static InteractionTable build(std::size_t num_users, std::size_t num_items,
                                std::vector<Interaction> pairs,
                                std::size_t* duplicates = nullptr);

  std::size_t num_users() const noexcept { return num_users_; }
  std::size_t num_items() const noexcept { return num_items_; }
  std::size_t size() const noexcept { return interactions_.size(); }

  std::span<const Interaction> all() const noexcept { return interactions_; }
  std::span<const Interaction> of_user(std::size_t u) const;
  std::span<Interaction> of_user(std::size_t u);

  bool is_positive(std::size_t u, std::size_t i) const;
  std::vector<std::uint32_t> items_tagged(std::size_t u, SplitTag tag) const;
  std::size_t count_tagged(std::size_t u, SplitTag tag) const;
  std::size_t count_tagged(SplitTag tag) const;

  // Optional external ids, index-aligned.
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;

  void validate() const;

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::vector<Interaction> interactions_;
  std::vector<std::size_t> user_offsets_{0};
};

struct LoadedInteractions {
  InteractionTable table;
  std::size_t duplicates = 0;
};

// Reads "user_id<TAB>item_id" lines. Without a manifest, items are indexed
// in order of first appearance; with one, item indices follow the manifest
// and unknown items are rejected.
LoadedInteractions load_interactions(const std::filesystem::path& path);
LoadedInteractions load_interactions(const std::filesystem::path& path,
                                     const std::vector<std::string>& item_manifest);

void write_interactions(const std::filesystem::path& path, const InteractionTable& table);

std::vector<std::string> load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<std::string>& ids);

}  // namespace micro
