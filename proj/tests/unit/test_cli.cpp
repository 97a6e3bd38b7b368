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

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "micro/cli/commands.hpp"
#include "micro/cli/config.hpp"
#include "micro/error.hpp"
#include "test_util.hpp"

using namespace micro;
using micro::testing::read_file;
using micro::testing::TempDir;
using micro::testing::write_file;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run_micro(const std::string& args, const TempDir& dir) {
  const auto out = dir / "stdout.txt";
  const std::string cmd = std::string(MICRO_BINARY) + " " + args + " > " + out.string() +
                          " 2> " + (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out)};
}

// Small synthetic dataset plus a quick training config on top of it.
void synth(const TempDir& dir, const std::string& sub = "data") {
  const std::string args = "synth --out " + (dir / sub).string() +
                           " --set synth.users=60 synth.items=40 synth.modalities=visual:8,textual:6 synth.rank=4";
  REQUIRE(run_micro(args, dir).code == 0);
  write_file(dir / sub / "quick.cfg",
             "data.interactions = interactions.tsv\n"
             "data.manifest = items.txt\n"
             "data.features.visual = features_visual.mfv\n"
             "data.features.textual = features_textual.mfv\n"
             "dim = 8\nk = 4\nbatch = 64\nmax_epochs = 3\nlr = 0.01\n");
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = ExperimentConfig::parse(
      "# comment\n"
      "data.interactions = x/inter.tsv\n"
      "data.features.visual = v.mfv\n"
      "trainer.beta = 0.1\n"
      "k = 5   # short key\n"
      "seed = 7\n"
      "split.mode = cold\n",
      "/base");
  CHECK(cfg.interactions == std::filesystem::path("/base/x/inter.tsv"));
  REQUIRE(cfg.features.size() == 1);
  CHECK(cfg.features[0].first == "visual");
  CHECK(cfg.trainer.beta == 0.1);
  CHECK(cfg.trainer.k == 5);
  CHECK(cfg.trainer.seed == 7);
  CHECK(cfg.split.seed == 7);
  CHECK(cfg.split.mode == SplitMode::kCold);

  const auto back = ExperimentConfig::parse(cfg.to_text(), "/elsewhere");
  CHECK(back.entries() == cfg.entries());
  CHECK(back.hash() == cfg.hash());
  CHECK(cfg.hash_hex().size() == 16);

  auto moved = cfg;
  moved.output_dir = "/other";
  CHECK(moved.hash() == cfg.hash());
  auto changed = cfg;
  changed.set("lambda", "0.5");
  CHECK(changed.hash() != cfg.hash());

  CHECK_THROWS_AS(ExperimentConfig::parse("nonsense.key = 1\n", "/"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("k = banana\n", "/"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("just text\n", "/"), Error);
  CHECK_THROWS_AS(split_assignment("noequals"), Error);
  CHECK(split_assignment("a.b=c=d") == std::pair<std::string, std::string>{"a.b", "c=d"});
  CHECK(sweep_key("lambda") == "trainer.lambda");
  CHECK_THROWS_AS(sweep_key("colour"), Error);
}

TEST_CASE("synth is deterministic") {
  TempDir dir;
  synth(dir, "a");
  synth(dir, "b");
  for (const char* f : {"interactions.tsv", "items.txt", "features_visual.mfv"})
    CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
  CHECK(run_micro("synth --out " + (dir / "z").string() + " --set synth.items=0", dir).code == 2);
}

TEST_CASE("usage errors exit 2") {
  TempDir dir;
  CHECK(run_micro("", dir).code == 2);
  CHECK(run_micro("frobnicate", dir).code == 2);
  CHECK(run_micro("train", dir).code == 2);
  synth(dir);
  write_file(dir / "data" / "missing.cfg",
             "data.interactions = interactions.tsv\ndata.features.visual = nope.mfv\n");
  CHECK(run_micro("train -c " + (dir / "data" / "missing.cfg").string(), dir).code == 2);
  const Run bad = run_micro("sweep -c " + (dir / "data" / "quick.cfg").string() +
                                " --axis colour --values 1,2",
                            dir);
  CHECK(bad.code == 2);
}

TEST_CASE("train then evaluate") {
  TempDir dir;
  synth(dir);
  const auto cfg = (dir / "data" / "quick.cfg").string();
  const auto out = dir / "run";
  const Run t = run_micro("train -c " + cfg + " -o " + out.string(), dir);
  REQUIRE(t.code == 0);
  for (const char* f : {"checkpoint.mck", "metrics.jsonl", "split.json", "config.cfg"})
    CHECK(std::filesystem::exists(out / f));

  std::istringstream lines(read_file(out / "metrics.jsonl"));
  std::string line;
  std::size_t n = 0;
  nlohmann::json first;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    if (n++ == 0) first = j;
  }
  CHECK(n >= 2);
  CHECK(first["epoch"] == 0);
  CHECK(first["metrics"]["config_hash"].get<std::string>().size() == 16);

  const auto split = nlohmann::json::parse(read_file(out / "split.json"));
  CHECK(split.contains("seed"));

  const Run e = run_micro("evaluate -c " + cfg + " --checkpoint " + (out / "checkpoint.mck").string() +
                              " --k 10 20 50",
                          dir);
  REQUIRE(e.code == 0);
  const auto reports = nlohmann::json::parse(e.out);
  REQUIRE(reports.is_array());
  CHECK(reports.size() == 3);
  CHECK(reports[0].contains("recall@10"));
  CHECK(reports[2].contains("ndcg@50"));

  // A dataset with a different catalog is incompatible with the checkpoint.
  const Run other = run_micro("synth --out " + (dir / "other").string() +
                                  " --set synth.users=60 synth.items=41 synth.modalities=visual:8,textual:6 synth.rank=4",
                              dir);
  REQUIRE(other.code == 0);
  write_file(dir / "other" / "quick.cfg",
             "data.interactions = interactions.tsv\n"
             "data.features.visual = features_visual.mfv\n"
             "data.features.textual = features_textual.mfv\n");
  const Run mismatch = run_micro("evaluate -c " + (dir / "other" / "quick.cfg").string() +
                                     " --checkpoint " + (out / "checkpoint.mck").string(),
                                 dir);
  CHECK(mismatch.code == 3);

  write_file(dir / "junk.mck", "not a checkpoint");
  CHECK(run_micro("evaluate -c " + cfg + " --checkpoint " + (dir / "junk.mck").string(), dir)
            .code == 3);
}

TEST_CASE("sweep writes the csv") {
  TempDir dir;
  synth(dir);
  const auto out = dir / "sw";
  const Run s = run_micro("sweep -c " + (dir / "data" / "quick.cfg").string() + " -o " +
                              out.string() + " --axis lambda --values 0.5,1",
                          dir);
  REQUIRE(s.code == 0);
  const std::string csv = read_file(out / "sweep_lambda.csv");
  CHECK(csv.rfind("axis,value,recall@20,precision@20,ndcg@20\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("pilot prints both statistics") {
  TempDir dir;
  synth(dir);
  const Run p = run_micro("pilot -c " + (dir / "data" / "quick.cfg").string() + " --k 5 10", dir);
  REQUIRE(p.code == 0);
  const auto j = nlohmann::json::parse(p.out);
  CHECK(j["cointeraction_similarity"].size() == 2);
  CHECK(j["similar_purchase_proportion"].size() == 2);
}
