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

#include "micro/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "micro/error.hpp"
#include "micro/rng.hpp"

namespace micro {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) fail("config " + key + ": not a number: '" + v + "'");
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    fail("config " + key + ": not a nonnegative integer: '" + v + "'");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail("config " + key + ": not a boolean: '" + v + "'");
}

std::string fmt(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string fmt(bool b) { return b ? "true" : "false"; }

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, std::string>) {
      out += xs[i];
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

fs::path resolve(const std::string& v, const fs::path& base) {
  if (v.empty()) return {};
  const fs::path p(v);
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

bool set_trainer(TrainerConfig& t, const std::string& key, const std::string& v) {
  const std::string k = "trainer." + key;
  if (key == "dim") t.dim = to_uint(k, v);
  else if (key == "lr") t.learning_rate = to_double(k, v);
  else if (key == "l2") t.l2 = to_double(k, v);
  else if (key == "batch") t.batch_size = to_uint(k, v);
  else if (key == "k") t.k = to_uint(k, v);
  else if (key == "lambda") t.lambda = to_double(k, v);
  else if (key == "tau") t.tau = to_double(k, v);
  else if (key == "beta") t.beta = to_double(k, v);
  else if (key == "L") t.layers = static_cast<int>(to_uint(k, v));
  else if (key == "patience") t.patience = to_uint(k, v);
  else if (key == "max_epochs") t.max_epochs = to_uint(k, v);
  else if (key == "seed") t.seed = to_uint(k, v);
  else if (key == "backbone") {
    if (v == "mf") t.backbone = Backbone::kMF;
    else if (v == "lightgcn") t.backbone = Backbone::kLightGCN;
    else fail("config " + k + ": unknown backbone '" + v + "' (expected mf or lightgcn)");
  } else if (key == "lightgcn_layers") t.lightgcn_layers = static_cast<int>(to_uint(k, v));
  else if (key == "modalities") t.modalities = v == "all" ? std::vector<std::string>{} : split_list(v);
  else if (key == "no_contrast") t.no_contrast = to_bool(k, v);
  else if (key == "cf_plus_feats") t.cf_plus_feats = to_bool(k, v);
  else if (key == "micro_over_feats") t.micro_over_feats = to_bool(k, v);
  else if (key == "keep_self_loops") t.keep_self_loops = to_bool(k, v);
  else if (key == "symmetric_negatives") t.symmetric_negatives = to_bool(k, v);
  else if (key == "contrast_scope") {
    if (v == "batch") t.contrast_scope = ContrastScope::kBatch;
    else if (v == "full") t.contrast_scope = ContrastScope::kFullCatalog;
    else fail("config " + k + ": expected batch or full");
  } else if (key == "selection_refresh") {
    if (v == "step") t.selection_refresh = SelectionRefresh::kEveryStep;
    else if (v == "epoch") t.selection_refresh = SelectionRefresh::kEveryEpoch;
    else fail("config " + k + ": expected step or epoch");
  } else if (key == "separate_item_table") t.separate_item_table = to_bool(k, v);
  else if (key == "eval_k") t.eval_k = to_uint(k, v);
  else return false;
  return true;
}

}  // namespace

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) fail("expected key=value, got '" + text + "'");
  std::string key = trim(text.substr(0, eq));
  if (key.empty()) fail("empty key in '" + text + "'");
  return {key, trim(text.substr(eq + 1))};
}

void ExperimentConfig::set(const std::string& key, const std::string& v, const fs::path& base) {
  if (key == "seed") {
    const auto s = to_uint(key, v);
    split.seed = trainer.seed = synth.seed = s;
  } else if (key == "data.interactions") {
    interactions = resolve(v, base);
  } else if (key == "data.manifest") {
    manifest = resolve(v, base);
  } else if (key.rfind("data.features.", 0) == 0) {
    const std::string m = key.substr(14);
    if (m.empty()) fail("config " + key + ": missing modality name");
    const fs::path p = resolve(v, base);
    bool replaced = false;
    for (auto& f : features) {
      if (f.first == m) {
        f.second = p;
        replaced = true;
      }
    }
    if (!replaced) features.emplace_back(m, p);
  } else if (key == "split.mode") {
    if (v == "warm") split.mode = SplitMode::kWarm;
    else if (v == "cold") split.mode = SplitMode::kCold;
    else fail("config split.mode: expected warm or cold, got '" + v + "'");
  } else if (key == "split.train") {
    split.train_ratio = to_double(key, v);
  } else if (key == "split.valid") {
    split.valid_ratio = to_double(key, v);
  } else if (key == "split.test") {
    split.test_ratio = to_double(key, v);
  } else if (key == "split.cold_fraction") {
    split.cold_fraction = to_double(key, v);
  } else if (key == "split.seed") {
    split.seed = to_uint(key, v);
  } else if (key == "synth.users") {
    synth.users = to_uint(key, v);
  } else if (key == "synth.items") {
    synth.items = to_uint(key, v);
  } else if (key == "synth.modalities") {
    synth.modalities.clear();
    for (const auto& item : split_list(v)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) fail("config synth.modalities: expected name:dim, got '" + item + "'");
      synth.modalities.emplace_back(trim(item.substr(0, colon)),
                                    to_uint(key, trim(item.substr(colon + 1))));
    }
  } else if (key == "synth.rank") {
    synth.rank = to_uint(key, v);
  } else if (key == "synth.noise") {
    synth.noise = to_double(key, v);
  } else if (key == "synth.seed") {
    synth.seed = to_uint(key, v);
  } else if (key == "synth.min_interactions") {
    synth.min_interactions = to_uint(key, v);
  } else if (key == "synth.max_interactions") {
    synth.max_interactions = to_uint(key, v);
  } else if (key == "synth.pool_factor") {
    synth.pool_factor = to_double(key, v);
  } else if (key == "synth.format") {
    if (v != "mfv" && v != "csv") fail("config synth.format: expected mfv or csv");
    synth_format = v;
  } else if (key == "pilot.k_list") {
    pilot_k.clear();
    for (const auto& s : split_list(v)) pilot_k.push_back(to_uint(key, s));
  } else if (key == "output.dir") {
    output_dir = v;  // relative to the working directory, like --out
  } else if (key.rfind("trainer.", 0) == 0) {
    if (!set_trainer(trainer, key.substr(8), v)) fail("unknown config key: " + key);
  } else if (key.find('.') == std::string::npos) {
    if (!set_trainer(trainer, key, v)) fail("unknown config key: " + key);
  } else {
    fail("unknown config key: " + key);
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("data.interactions", interactions.string());
  e.emplace_back("data.manifest", manifest.string());
  for (const auto& [m, p] : features) e.emplace_back("data.features." + m, p.string());
  e.emplace_back("split.mode", split.mode == SplitMode::kWarm ? "warm" : "cold");
  e.emplace_back("split.train", fmt(split.train_ratio));
  e.emplace_back("split.valid", fmt(split.valid_ratio));
  e.emplace_back("split.test", fmt(split.test_ratio));
  e.emplace_back("split.cold_fraction", fmt(split.cold_fraction));
  e.emplace_back("split.seed", std::to_string(split.seed));
  const TrainerConfig& t = trainer;
  e.emplace_back("trainer.dim", std::to_string(t.dim));
  e.emplace_back("trainer.lr", fmt(t.learning_rate));
  e.emplace_back("trainer.l2", fmt(t.l2));
  e.emplace_back("trainer.batch", std::to_string(t.batch_size));
  e.emplace_back("trainer.k", std::to_string(t.k));
  e.emplace_back("trainer.lambda", fmt(t.lambda));
  e.emplace_back("trainer.tau", fmt(t.tau));
  e.emplace_back("trainer.beta", fmt(t.beta));
  e.emplace_back("trainer.L", std::to_string(t.layers));
  e.emplace_back("trainer.patience", std::to_string(t.patience));
  e.emplace_back("trainer.max_epochs", std::to_string(t.max_epochs));
  e.emplace_back("trainer.seed", std::to_string(t.seed));
  e.emplace_back("trainer.backbone", to_string(t.backbone));
  e.emplace_back("trainer.lightgcn_layers", std::to_string(t.lightgcn_layers));
  e.emplace_back("trainer.modalities", t.modalities.empty() ? "all" : join(t.modalities));
  e.emplace_back("trainer.no_contrast", fmt(t.no_contrast));
  e.emplace_back("trainer.cf_plus_feats", fmt(t.cf_plus_feats));
  e.emplace_back("trainer.micro_over_feats", fmt(t.micro_over_feats));
  e.emplace_back("trainer.keep_self_loops", fmt(t.keep_self_loops));
  e.emplace_back("trainer.symmetric_negatives", fmt(t.symmetric_negatives));
  e.emplace_back("trainer.contrast_scope",
                 t.contrast_scope == ContrastScope::kBatch ? "batch" : "full");
  e.emplace_back("trainer.selection_refresh",
                 t.selection_refresh == SelectionRefresh::kEveryStep ? "step" : "epoch");
  e.emplace_back("trainer.separate_item_table", fmt(t.separate_item_table));
  e.emplace_back("trainer.eval_k", std::to_string(t.eval_k));
  e.emplace_back("synth.users", std::to_string(synth.users));
  e.emplace_back("synth.items", std::to_string(synth.items));
  std::string mods;
  for (const auto& [name, dim] : synth.modalities) {
    if (!mods.empty()) mods += ",";
    mods += name + ":" + std::to_string(dim);
  }
  e.emplace_back("synth.modalities", mods);
  e.emplace_back("synth.rank", std::to_string(synth.rank));
  e.emplace_back("synth.noise", fmt(synth.noise));
  e.emplace_back("synth.seed", std::to_string(synth.seed));
  e.emplace_back("synth.min_interactions", std::to_string(synth.min_interactions));
  e.emplace_back("synth.max_interactions", std::to_string(synth.max_interactions));
  e.emplace_back("synth.pool_factor", fmt(synth.pool_factor));
  e.emplace_back("synth.format", synth_format);
  e.emplace_back("pilot.k_list", join(pilot_k));
  e.emplace_back("output.dir", output_dir.string());
  return e;
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries()) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t ExperimentConfig::hash() const {
  std::string text;
  for (const auto& [k, v] : entries()) {
    if (k == "output.dir") continue;
    text += k + "=" + v + "\n";
  }
  return fnv1a(text);
}

std::string ExperimentConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const fs::path& base_dir) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos) {
      fail("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto [key, value] = split_assignment(line);
    cfg.set(key, value, base_dir);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const fs::path base = fs::absolute(path).parent_path();
  return parse(ss.str(), base);
}

}  // namespace micro
