// Copyright 2026 The loglab Authors
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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "loglab/errors.hpp"
#include "loglab/pipeline.hpp"
#include "loglab/training.hpp"

using namespace loglab;

namespace {

// A small but non-trivial corpus shared by the training tests.
struct SmallRun {
  WeakDataset weak;
  Vocabulary vocab;
  ModelConfig model_config;
  TrainingConfig training_config;

  SmallRun() {
    auto spec = make_default_synthetic_spec();
    spec.n_messages = 2500;
    spec.n_failures = 12;
    spec.seed = 99;
    auto corpus = generate_synthetic(spec);
    weak = assign_weak_labels(std::move(corpus.records),
                              std::move(corpus.failure_times_ms), 5000);
    VocabularyBuilder builder;
    for (const auto& r : weak.records) builder.add(tokenize(r.content));
    vocab = builder.build();

    model_config.embed_dim = 32;
    model_config.ff_hidden_dim = 64;
    model_config.max_len = 12;
    model_config.vocab_size = vocab.size();
    model_config.seed = 7;

    training_config.batch_size = 128;
    training_config.epochs = 2;
    training_config.learning_rate = 1e-3;
    training_config.shuffle_seed = 7;
  }
};

const SmallRun& small_run() {
  static const SmallRun run;
  return run;
}

std::vector<double> eval_scores(const SmallRun& run,
                                const ModelParameters& params) {
  const auto encoded =
      encode_all(run.weak.records, run.vocab, run.model_config.max_len);
  return score_dataset_norms(encoded, params, run.model_config);
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("config validation") {
  TrainingConfig config;
  config.epochs = 0;
  CHECK_THROWS_AS(config.validate(), InvalidConfig);
  config = {};
  config.batch_size = 0;
  CHECK_THROWS_AS(config.validate(), InvalidConfig);
  config = {};
  config.learning_rate = 0.0;
  CHECK_THROWS_AS(config.validate(), InvalidConfig);
}

TEST_CASE("training requires both weak classes") {
  const auto& run = small_run();
  WeakDataset all_p;
  all_p.records = run.weak.records;
  all_p.weak_labels.assign(all_p.records.size(), kWeakPositive);
  all_p.n_positive = all_p.records.size();
  CHECK_THROWS_AS(
      train(all_p, run.vocab, run.model_config, run.training_config),
      DegeneratePartition);
}

TEST_CASE("two seeded runs are identical") {
  const auto& run = small_run();
  const TrainResult a =
      train(run.weak, run.vocab, run.model_config, run.training_config);
  const TrainResult b =
      train(run.weak, run.vocab, run.model_config, run.training_config);

  REQUIRE(a.log.epochs.size() == b.log.epochs.size());
  for (std::size_t e = 0; e < a.log.epochs.size(); ++e) {
    CHECK(a.log.epochs[e].mean_loss == b.log.epochs[e].mean_loss);
    CHECK(a.log.epochs[e].mean_p_term == b.log.epochs[e].mean_p_term);
    CHECK(a.log.epochs[e].mean_u_term == b.log.epochs[e].mean_u_term);
  }
  const auto scores_a = eval_scores(run, a.params);
  const auto scores_b = eval_scores(run, b.params);
  CHECK(scores_a == scores_b);  // bitwise
}

TEST_CASE("loss decreases over the run") {
  const auto& run = small_run();
  const TrainResult result =
      train(run.weak, run.vocab, run.model_config, run.training_config);
  REQUIRE(result.log.epochs.size() == run.training_config.epochs);
  CHECK(result.log.epochs.back().mean_loss <
        result.log.epochs.front().mean_loss);
  // P-branch term never grows beyond noise across epochs
  CHECK(result.log.epochs.back().mean_p_term <=
        result.log.epochs.front().mean_p_term * 1.05);
  for (const auto& e : result.log.epochs) {
    CHECK(std::isfinite(e.mean_loss));
    CHECK(e.wall_seconds >= 0.0);
  }
}

TEST_CASE("training log file layout") {
  TrainingLog log;
  log.epochs.push_back({1, 0.5, 0.4, 1.5, 2.25});
  const std::string path =
      (std::filesystem::temp_directory_path() / "loglab_trainlog.tsv").string();
  log.save(path);
  std::ifstream in(path);
  std::string header, row;
  REQUIRE(std::getline(in, header));
  CHECK(header == "epoch\tmean_loss\tmean_p_term\tmean_u_term\twall_seconds");
  REQUIRE(std::getline(in, row));
  CHECK(row.substr(0, 6) == "1\t0.5\t");
  std::remove(path.c_str());
}

TEST_CASE("checkpoint round trip reproduces scores bit-exactly") {
  const auto& run = small_run();
  const TrainResult result =
      train(run.weak, run.vocab, run.model_config, run.training_config);
  const auto before = eval_scores(run, result.params);

  const std::string path =
      (std::filesystem::temp_directory_path() / "loglab_ckpt.bin").string();
  save_checkpoint(path, run.model_config, result.params);
  const Checkpoint restored = load_checkpoint(path, run.vocab.size());
  CHECK(restored.config.embed_dim == run.model_config.embed_dim);
  CHECK(restored.config.max_len == run.model_config.max_len);

  const auto after = eval_scores(run, restored.params);
  CHECK(before == after);  // bitwise
  std::remove(path.c_str());
}

TEST_CASE("corrupt checkpoints are rejected") {
  const auto& run = small_run();
  const ModelParameters params = init_parameters(run.model_config);
  const std::string path =
      (std::filesystem::temp_directory_path() / "loglab_ckpt2.bin").string();
  save_checkpoint(path, run.model_config, params);

  // flip one payload byte
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(256);
    char byte = 0;
    f.seekg(256);
    f.read(&byte, 1);
    byte ^= 0x40;
    f.seekp(256);
    f.write(&byte, 1);
  }
  CHECK_THROWS_AS(load_checkpoint(path), Error);

  // truncation
  save_checkpoint(path, run.model_config, params);
  std::filesystem::resize_file(path, 128);
  CHECK_THROWS_AS(load_checkpoint(path), IoError);

  // not a checkpoint at all
  {
    std::ofstream f(path, std::ios::binary);
    f << "plain text";
  }
  CHECK_THROWS_AS(load_checkpoint(path), VersionMismatch);

  // vocabulary mismatch
  save_checkpoint(path, run.model_config, params);
  CHECK_THROWS_AS(load_checkpoint(path, run.vocab.size() + 5),
                  VersionMismatch);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent.bin"), IoError);
  std::remove(path.c_str());
}

}  // TEST_SUITE
