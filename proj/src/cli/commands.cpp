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

#include "micro/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "micro/checkpoint.hpp"
#include "micro/error.hpp"
#include "micro/evaluate.hpp"
#include "micro/pilot.hpp"
#include "micro/split.hpp"
#include "micro/synthetic.hpp"

namespace micro {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot write " + path.string());
  out << text;
  if (!out) fail("failed writing " + path.string());
}

nlohmann::json final_record(const MetricReport& r, const ExperimentConfig& cfg) {
  nlohmann::json m = r.to_json();
  m["config_hash"] = cfg.hash_hex();
  m["seed"] = cfg.trainer.seed;
  return {{"final", true}, {"metrics", m}};
}

RunSummary run_with_log(const ExperimentConfig& cfg, const Dataset& data,
                        const fs::path& cache, std::ostream* log) {
  RunSummary s;
  s.split = make_split(data.table, cfg.split);
  if (s.split.warnings > 0) {
    std::cerr << "warning: split left " << s.split.warnings
              << (cfg.split.mode == SplitMode::kWarm ? " users with fewer than 3 interactions in train"
                                                     : " users without training interactions")
              << '\n';
  }
  MicroModel model(cfg.trainer, s.split.table, data.features, cache);
  TrainOptions opts;
  opts.protocol = cfg.split.mode == SplitMode::kWarm ? "warm" : "cold";
  opts.config_hash = cfg.hash_hex();
  if (log) {
    opts.on_record = [log](const nlohmann::json& j) { *log << j.dump() << '\n' << std::flush; };
  }
  s.training = train(model, s.split.table, opts);
  s.checkpoint_config = checkpoint_config(model);
  s.checkpoint_config["config_hash"] = cfg.hash_hex();
  if (!s.training.abort_reason) {
    // Sweep summaries always report @20, whatever the validation cutoff.
    std::vector<std::size_t> ks{cfg.trainer.eval_k};
    if (cfg.trainer.eval_k != 20) ks.push_back(20);
    s.test = evaluate_model(model, s.split, ks);
    if (log) {
      for (const auto& r : s.test) *log << final_record(r, cfg).dump() << '\n';
    }
  }
  return s;
}

}  // namespace

Dataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.interactions.empty()) fail("config: data.interactions is not set");
  Dataset d;
  LoadedInteractions li = cfg.manifest.empty()
                              ? load_interactions(cfg.interactions)
                              : load_interactions(cfg.interactions, load_manifest(cfg.manifest));
  if (li.duplicates > 0) {
    std::cerr << "warning: dropped " << li.duplicates << " duplicate interactions\n";
  }
  d.table = std::move(li.table);
  for (const auto& [m, path] : cfg.features) {
    d.features.push_back(load_features(path, m, d.table.num_items()));
  }
  return d;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const Dataset& data,
                          const fs::path& graph_cache) {
  return run_with_log(cfg, data, graph_cache, nullptr);
}

fs::path graph_cache_dir(const fs::path& fallback) {
  if (const char* env = std::getenv("MICRO_CACHE_DIR"); env && *env) return fs::path(env);
  return fallback;
}

std::string sweep_key(const std::string& axis) {
  if (axis == "k") return "trainer.k";
  if (axis == "lambda") return "trainer.lambda";
  if (axis == "beta") return "trainer.beta";
  if (axis == "L") return "trainer.L";
  if (axis == "modality") return "trainer.modalities";
  fail("invalid sweep axis '" + axis + "' (expected k, lambda, beta, L or modality)");
}

int cmd_synth(const ExperimentConfig& cfg, std::ostream& out) {
  const SyntheticDataset ds = generate_synthetic(cfg.synth);
  const fs::path dir = cfg.output_dir;
  ensure_dir(dir);
  write_interactions(dir / "interactions.tsv", ds.table);
  write_manifest(dir / "items.txt", ds.table.item_ids);
  std::string dataset_cfg = "# generated by micro synth\n";
  dataset_cfg += "data.interactions = interactions.tsv\n";
  dataset_cfg += "data.manifest = items.txt\n";
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : ds.features) {
    const std::string name = "features_" + f.modality + "." + cfg.synth_format;
    if (cfg.synth_format == "csv") {
      write_features_csv(dir / name, f.values);
    } else {
      write_features_mfv(dir / name, f.values);
    }
    dataset_cfg += "data.features." + f.modality + " = " + name + "\n";
    files.push_back(name);
  }
  write_text(dir / "dataset.cfg", dataset_cfg);
  out << nlohmann::json{{"users", ds.table.num_users()},
                        {"items", ds.table.num_items()},
                        {"interactions", ds.table.size()},
                        {"feature_files", files},
                        {"dataset_config", (dir / "dataset.cfg").string()}}
             .dump(2)
      << '\n';
  return 0;
}

int cmd_train(const ExperimentConfig& cfg, std::ostream& out) {
  const Dataset data = load_dataset(cfg);
  const fs::path dir = cfg.output_dir;
  ensure_dir(dir);
  write_text(dir / "config.cfg", cfg.to_text());
  std::ofstream log(dir / "metrics.jsonl", std::ios::binary | std::ios::trunc);
  if (!log) fail("cannot write " + (dir / "metrics.jsonl").string());

  const RunSummary s = run_with_log(cfg, data, graph_cache_dir(), &log);
  write_text(dir / "split.json", s.split.to_json() + "\n");

  Checkpoint best{s.checkpoint_config, s.training.best_params, s.training.best_adam,
                  s.training.best};
  write_checkpoint(dir / "checkpoint.mck", best);
  if (s.training.abort_reason) {
    Checkpoint last{s.checkpoint_config, s.training.last_good_params,
                    s.training.last_good_adam, s.training.best};
    write_checkpoint(dir / "last_good.mck", last);
    std::cerr << "error: training aborted at " << *s.training.abort_reason
              << "; last good checkpoint: " << (dir / "last_good.mck").string() << '\n';
    return static_cast<int>(ErrorKind::kNumerical);
  }
  nlohmann::json summary{{"output_dir", dir.string()},
                         {"epochs", s.training.epochs_run},
                         {"best_epoch", s.training.best.epoch},
                         {"best_valid_recall", s.training.best.recall},
                         {"early_stopped", s.training.early_stopped}};
  for (const auto& r : s.test) summary["test"].push_back(r.to_json());
  out << summary.dump(2) << '\n';
  return 0;
}

int cmd_evaluate(const ExperimentConfig& cfg, const fs::path& checkpoint,
                 const std::vector<std::size_t>& ks, const std::vector<std::string>& protocols,
                 std::ostream& out) {
  for (const auto k : ks) require(k >= 1, "evaluate: k must be >= 1");
  for (const auto& p : protocols) {
    require(p == "warm" || p == "cold", "evaluate: unknown protocol '" + p + "'");
  }
  const Checkpoint ck = read_checkpoint(checkpoint);
  const Dataset data = load_dataset(cfg);
  // The model is restored on the split it was trained with; protocols only
  // change the candidate and held-out sets.
  const SplitResult trained = make_split(data.table, cfg.split);
  const MicroModel model = restore_model(ck, trained.table, data.features, graph_cache_dir());
  const DenseMatrix scores = score_matrix(model.infer());

  nlohmann::json records = nlohmann::json::array();
  for (const auto& p : protocols) {
    SplitSpec spec = cfg.split;
    spec.mode = p == "warm" ? SplitMode::kWarm : SplitMode::kCold;
    const SplitResult s = make_split(data.table, spec);
    for (const auto& r : evaluate_scores(scores, s.table, SplitTag::kTest, ks, p)) {
      nlohmann::json j = r.to_json();
      j["config_hash"] = cfg.hash_hex();
      j["seed"] = cfg.trainer.seed;
      records.push_back(j);
    }
  }
  out << records.dump(2) << '\n';
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<std::string>& values, std::size_t parallel, std::ostream& out) {
  const std::string key = sweep_key(axis);
  require(!values.empty(), "sweep: no values given");
  std::vector<ExperimentConfig> runs;
  for (const auto& v : values) {
    ExperimentConfig c = cfg;
    std::string value = v;
    if (axis == "modality") {
      if (value == "both" || value == "all") {
        value = "all";
      } else {
        for (char& ch : value) {
          if (ch == '+') ch = ',';
        }
      }
    }
    c.set(key, value);
    c.output_dir = cfg.output_dir / ("sweep-" + axis) / (axis + "=" + v);
    c.trainer.validate();
    runs.push_back(std::move(c));
  }

  const Dataset data = load_dataset(cfg);
  const fs::path cache = graph_cache_dir(cfg.output_dir / "graph-cache");
  ensure_dir(cache);
  std::vector<RunSummary> results(runs.size());
  std::vector<std::exception_ptr> errors(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        ensure_dir(runs[i].output_dir);
        write_text(runs[i].output_dir / "config.cfg", runs[i].to_text());
        std::ofstream log(runs[i].output_dir / "metrics.jsonl", std::ios::binary | std::ios::trunc);
        results[i] = run_with_log(runs[i], data, cache, &log);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(parallel, runs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::string csv = "axis,value,recall@20,precision@20,ndcg@20\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& s = results[i];
    if (s.training.abort_reason) fail_numerical("sweep value " + values[i] + ": " + *s.training.abort_reason);
    const auto r20 = std::find_if(s.test.begin(), s.test.end(),
                                  [](const MetricReport& r) { return r.k == 20; });
    const MetricReport& r = *r20;
    csv += axis + "," + values[i] + "," + fmt(r.recall) + "," + fmt(r.precision) + "," +
           fmt(r.ndcg) + "\n";
  }
  ensure_dir(cfg.output_dir);
  write_text(cfg.output_dir / ("sweep_" + axis + ".csv"), csv);
  out << csv;
  return 0;
}

int cmd_pilot(const ExperimentConfig& cfg, std::ostream& out) {
  const Dataset data = load_dataset(cfg);
  require(!data.features.empty(), "pilot: no feature files configured");
  std::vector<CointeractionSimilarity> sims;
  std::vector<SimilarPurchaseProportion> props;
  for (const auto& f : data.features) {
    sims.push_back(pilot_cointeraction_similarity(f, data.table));
    props.push_back(pilot_similar_purchase_proportion(f, data.table, cfg.pilot_k));
  }
  nlohmann::json report = pilot_report_json(sims, props);
  report["k_list"] = cfg.pilot_k;
  out << report.dump(2) << '\n';
  return 0;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"micro: multimodal item recommendation with latent item graphs"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  auto common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config,-c", config_path, "config file (key = value lines)");
    if (config_required) opt->required();
    sub->add_option("--set", overrides, "override a config key: key=value")->take_all();
    sub->add_option("--out,-o", out_dir, "output directory (output.dir)");
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  common(synth, false);
  auto* train_cmd = app.add_subcommand("train", "train a model and write its artifacts");
  common(train_cmd, true);

  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpoint");
  common(eval_cmd, true);
  std::string checkpoint;
  std::vector<std::size_t> ks;
  std::vector<std::string> protocols;
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--k", ks, "cutoffs (default trainer.eval_k)")->take_all();
  eval_cmd->add_option("--protocol", protocols, "warm and/or cold (default split.mode)")
      ->take_all();

  auto* sweep = app.add_subcommand("sweep", "train and evaluate along one hyperparameter axis");
  common(sweep, true);
  std::string axis;
  std::vector<std::string> values;
  std::size_t parallel = 1;
  sweep->add_option("--axis", axis, "k, lambda, beta, L or modality")->required();
  sweep->add_option("--values", values, "axis values")->required()->delimiter(',')->take_all();
  sweep->add_option("--parallel", parallel, "concurrent runs")->check(CLI::PositiveNumber);

  auto* pilot = app.add_subcommand("pilot", "feature-similarity statistics of a dataset");
  common(pilot, true);
  std::vector<std::size_t> pilot_k;
  pilot->add_option("--k", pilot_k, "k values for the similar-purchase proportion")->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kInvalidArgument);
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{}
                                               : ExperimentConfig::load(config_path);
    for (const auto& o : overrides) {
      const auto [k, v] = split_assignment(o);
      cfg.set(k, v);
    }
    if (!out_dir.empty()) cfg.set("output.dir", out_dir);

    if (*synth) return cmd_synth(cfg, std::cout);
    cfg.trainer.validate();
    cfg.split.validate();
    if (*train_cmd) return cmd_train(cfg, std::cout);
    if (*eval_cmd) {
      if (ks.empty()) ks.push_back(cfg.trainer.eval_k);
      if (protocols.empty()) protocols.push_back(cfg.split.mode == SplitMode::kWarm ? "warm" : "cold");
      return cmd_evaluate(cfg, checkpoint, ks, protocols, std::cout);
    }
    if (*sweep) return cmd_sweep(cfg, axis, values, parallel, std::cout);
    if (*pilot) {
      if (!pilot_k.empty()) cfg.pilot_k = pilot_k;
      return cmd_pilot(cfg, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kInvalidArgument);
  }
  return static_cast<int>(ErrorKind::kInvalidArgument);
}

}  // namespace micro
