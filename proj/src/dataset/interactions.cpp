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

#include "micro/interactions.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "micro/error.hpp"

namespace micro {

const char* to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::kTrain: return "train";
    case SplitTag::kValid: return "valid";
    case SplitTag::kTest: return "test";
  }
  return "?";
}

InteractionTable InteractionTable::build(std::size_t num_users, std::size_t num_items,
                                         std::vector<Interaction> pairs,
                                         std::size_t* duplicates) {
  InteractionTable t;
  t.num_users_ = num_users;
  t.num_items_ = num_items;
  for (const auto& p : pairs) {
    require(p.user < num_users && p.item < num_items,
            "interaction (" + std::to_string(p.user) + ", " + std::to_string(p.item) +
                ") out of range");
  }
  std::sort(pairs.begin(), pairs.end(), [](const Interaction& a, const Interaction& b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  });
  const auto last = std::unique(pairs.begin(), pairs.end(),
                                [](const Interaction& a, const Interaction& b) {
                                  return a.user == b.user && a.item == b.item;
                                });
  if (duplicates) *duplicates = static_cast<std::size_t>(pairs.end() - last);
  pairs.erase(last, pairs.end());
  t.interactions_ = std::move(pairs);

  t.user_offsets_.assign(num_users + 1, 0);
  for (const auto& p : t.interactions_) t.user_offsets_[p.user + 1] += 1;
  for (std::size_t u = 0; u < num_users; ++u) t.user_offsets_[u + 1] += t.user_offsets_[u];
  return t;
}

std::span<const Interaction> InteractionTable::of_user(std::size_t u) const {
  return std::span<const Interaction>(interactions_)
      .subspan(user_offsets_[u], user_offsets_[u + 1] - user_offsets_[u]);
}

std::span<Interaction> InteractionTable::of_user(std::size_t u) {
  return std::span<Interaction>(interactions_)
      .subspan(user_offsets_[u], user_offsets_[u + 1] - user_offsets_[u]);
}

bool InteractionTable::is_positive(std::size_t u, std::size_t i) const {
  const auto row = of_user(u);
  const auto it = std::lower_bound(row.begin(), row.end(), i,
                                   [](const Interaction& x, std::size_t item) {
                                     return x.item < item;
                                   });
  return it != row.end() && it->item == i;
}

std::vector<std::uint32_t> InteractionTable::items_tagged(std::size_t u, SplitTag tag) const {
  std::vector<std::uint32_t> out;
  for (const auto& x : of_user(u)) {
    if (x.tag == tag) out.push_back(x.item);
  }
  return out;
}

std::size_t InteractionTable::count_tagged(std::size_t u, SplitTag tag) const {
  std::size_t n = 0;
  for (const auto& x : of_user(u)) n += x.tag == tag;
  return n;
}

std::size_t InteractionTable::count_tagged(SplitTag tag) const {
  std::size_t n = 0;
  for (const auto& x : interactions_) n += x.tag == tag;
  return n;
}

void InteractionTable::validate() const {
  require(user_offsets_.size() == num_users_ + 1, "interactions: bad user offsets");
  for (std::size_t k = 0; k < interactions_.size(); ++k) {
    const auto& x = interactions_[k];
    require(x.user < num_users_ && x.item < num_items_, "interactions: index out of range");
    if (k > 0) {
      const auto& p = interactions_[k - 1];
      require(p.user < x.user || (p.user == x.user && p.item < x.item),
              "interactions: unsorted or duplicate pair");
    }
  }
  require(user_ids.empty() || user_ids.size() == num_users_, "interactions: user id table size");
  require(item_ids.empty() || item_ids.size() == num_items_, "interactions: item id table size");
}

namespace {

LoadedInteractions load_impl(const std::filesystem::path& path,
                             const std::vector<std::string>* manifest) {
  std::ifstream in(path);
  if (!in) fail("cannot open interactions file: " + path.string());

  std::unordered_map<std::string, std::uint32_t> users;
  std::unordered_map<std::string, std::uint32_t> items;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  if (manifest) {
    item_ids = *manifest;
    for (std::size_t i = 0; i < manifest->size(); ++i) {
      if (!items.emplace((*manifest)[i], static_cast<std::uint32_t>(i)).second) {
        fail("item manifest repeats id '" + (*manifest)[i] + "'");
      }
    }
  }

  std::vector<Interaction> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      fail(path.string() + ":" + std::to_string(line_no) +
           ": expected 'user_id<TAB>item_id'");
    }
    const std::string user = line.substr(0, tab);
    const std::string item = line.substr(tab + 1);

    auto [uit, u_new] = users.emplace(user, static_cast<std::uint32_t>(user_ids.size()));
    if (u_new) user_ids.push_back(user);

    std::uint32_t item_index = 0;
    if (manifest) {
      const auto it = items.find(item);
      if (it == items.end()) {
        fail(path.string() + ":" + std::to_string(line_no) + ": item '" + item +
             "' not in manifest");
      }
      item_index = it->second;
    } else {
      auto [iit, i_new] = items.emplace(item, static_cast<std::uint32_t>(item_ids.size()));
      if (i_new) item_ids.push_back(item);
      item_index = iit->second;
    }
    pairs.push_back({uit->second, item_index, SplitTag::kTrain});
  }
  if (pairs.empty()) fail("interactions file is empty: " + path.string());

  LoadedInteractions out;
  out.table = InteractionTable::build(user_ids.size(), item_ids.size(), std::move(pairs),
                                      &out.duplicates);
  out.table.user_ids = std::move(user_ids);
  out.table.item_ids = std::move(item_ids);
  return out;
}

}  // namespace

LoadedInteractions load_interactions(const std::filesystem::path& path) {
  return load_impl(path, nullptr);
}

LoadedInteractions load_interactions(const std::filesystem::path& path,
                                     const std::vector<std::string>& item_manifest) {
  return load_impl(path, &item_manifest);
}

void write_interactions(const std::filesystem::path& path, const InteractionTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write interactions file: " + path.string());
  for (const auto& x : table.all()) {
    const std::string u =
        table.user_ids.empty() ? "u" + std::to_string(x.user) : table.user_ids[x.user];
    const std::string i =
        table.item_ids.empty() ? "i" + std::to_string(x.item) : table.item_ids[x.item];
    out << u << '\t' << i << '\n';
  }
}

std::vector<std::string> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open item manifest: " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  if (ids.empty()) fail("item manifest is empty: " + path.string());
  return ids;
}

void write_manifest(const std::filesystem::path& path, const std::vector<std::string>& ids) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write item manifest: " + path.string());
  for (const auto& id : ids) out << id << '\n';
}

}  // namespace micro
