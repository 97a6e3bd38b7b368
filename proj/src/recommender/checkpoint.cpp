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

#include "micro/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <string>

#include "micro/error.hpp"

namespace micro {

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail_incompatible("truncated checkpoint: " + path.string());
  return v;
}

void put_tensors(std::ostream& out, const ParameterSet& set) {
  put(out, static_cast<std::uint32_t>(set.size()));
  for (const auto& t : set) {
    put(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put(out, static_cast<std::uint32_t>(t.value.rows()));
    put(out, static_cast<std::uint32_t>(t.value.cols()));
    for (double v : t.value.values()) put(out, v);
  }
}

ParameterSet get_tensors(std::istream& in, const std::filesystem::path& path) {
  ParameterSet set;
  const auto count = get<std::uint32_t>(in, path);
  for (std::uint32_t n = 0; n < count; ++n) {
    const auto len = get<std::uint32_t>(in, path);
    if (len > 4096) fail_incompatible("implausible tensor name length in " + path.string());
    std::string name(len, '\0');
    in.read(name.data(), len);
    const auto rows = get<std::uint32_t>(in, path);
    const auto cols = get<std::uint32_t>(in, path);
    DenseMatrix m(rows, cols);
    for (double& v : m.values()) v = get<double>(in, path);
    set.add(std::move(name), std::move(m));
  }
  return set;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot write checkpoint: " + path.string());
  out.write("MCK1", 4);
  put(out, kCheckpointVersion);
  const std::string blob = ck.config.dump();
  put(out, static_cast<std::uint64_t>(blob.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  put_tensors(out, ck.params);

  const AdamConfig& c = ck.adam.config;
  put(out, ck.adam.step);
  put(out, c.learning_rate);
  put(out, c.beta1);
  put(out, c.beta2);
  put(out, c.epsilon);
  put(out, c.weight_decay);
  put_tensors(out, ck.adam.first_moment);
  put_tensors(out, ck.adam.second_moment);

  put(out, ck.best.epoch);
  put(out, ck.best.recall);
  put(out, ck.best.k);
  if (!out) fail("failed writing checkpoint: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open checkpoint: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MCK1", 4) != 0) {
    fail_incompatible("not a checkpoint (bad magic): " + path.string());
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    fail_incompatible("unsupported checkpoint version " + std::to_string(version) + " in " +
                      path.string());
  }
  Checkpoint ck;
  const auto len = get<std::uint64_t>(in, path);
  if (len > (std::uint64_t{1} << 30)) fail_incompatible("implausible config length in " + path.string());
  std::string blob(len, '\0');
  in.read(blob.data(), static_cast<std::streamsize>(len));
  if (!in) fail_incompatible("truncated checkpoint: " + path.string());
  try {
    ck.config = nlohmann::json::parse(blob);
  } catch (const nlohmann::json::exception& e) {
    fail_incompatible("checkpoint config is not valid JSON: " + std::string(e.what()));
  }
  ck.params = get_tensors(in, path);

  ck.adam.step = get<std::uint64_t>(in, path);
  AdamConfig& c = ck.adam.config;
  c.learning_rate = get<double>(in, path);
  c.beta1 = get<double>(in, path);
  c.beta2 = get<double>(in, path);
  c.epsilon = get<double>(in, path);
  c.weight_decay = get<double>(in, path);
  ck.adam.first_moment = get_tensors(in, path);
  ck.adam.second_moment = get_tensors(in, path);

  ck.best.epoch = get<std::uint64_t>(in, path);
  ck.best.recall = get<double>(in, path);
  ck.best.k = get<std::uint32_t>(in, path);
  if (in.peek() != std::char_traits<char>::eof()) {
    fail_incompatible("trailing bytes after checkpoint payload: " + path.string());
  }
  return ck;
}

}  // namespace micro
