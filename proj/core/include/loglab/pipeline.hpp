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

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "loglab/evaluation.hpp"
#include "loglab/ingestion.hpp"
#include "loglab/preprocessing.hpp"
#include "loglab/training.hpp"
#include "loglab/weak_supervision.hpp"

namespace loglab {

// Everything a full run needs, read from a flat key=value file with
// optional command-line overrides. All randomness flows from `seed`.
struct RunConfig {
  // input: a log file path, or the literal "synthetic"
  std::string dataset;
  std::string format = "bgl";
  std::size_t limit = 0;  // 0 = no limit

  // synthetic corpus (when dataset == "synthetic")
  std::size_t synthetic_messages = 50000;
  std::size_t synthetic_templates = 20;
  std::size_t synthetic_anomaly_templates = 2;
  std::size_t synthetic_failures = 50;
  double synthetic_rate_per_s = 5.0;

  // weak windows
  std::int64_t delta_ms = 5000;

  // preprocessing
  std::size_t max_len = 0;  // 0 = derive from format name
  std::size_t min_token_freq = 1;

  // model
  std::size_t embed_dim = 128;
  std::size_t ff_hidden_dim = 256;
  std::size_t n_layers = 2;
  std::size_t n_heads = 2;
  double dropout = 0.10;

  // training
  std::size_t batch_size = 1024;
  std::size_t epochs = 8;
  double learning_rate = 1e-4;
  double weight_decay = 5e-5;

  // labeling; 0 = default threshold q^(2/3)
  double threshold = 0.0;

  std::uint64_t seed = 42;
  std::string out_dir = "out";
};

// Known config keys, in file order. Unknown keys are ConfigErrors naming
// the key, as are unparsable values.
RunConfig parse_config_file(const std::string& path);
void apply_override(RunConfig& config, const std::string& key,
                    const std::string& value);
void validate(const RunConfig& config);  // throws ConfigError naming the key

// The bundled desk-scale run: synthetic corpus, delta 5000 ms, and training
// settings sized for a 50k-message corpus (batch 256, lr 1e-3); the model
// keeps the standard dimensions. Mirrors configs/synthetic.cfg.
RunConfig default_synthetic_run_config();

std::size_t resolved_max_len(const RunConfig& config);
ModelConfig model_config_from(const RunConfig& config, std::size_t vocab_size);
TrainingConfig training_config_from(const RunConfig& config);

// Shared front half of every command: load or generate records, build the
// weak partition and the vocabulary.
struct PreparedData {
  std::vector<LogRecord> records;      // moved into `weak`
  WeakDataset weak;
  Vocabulary vocab;
  std::size_t max_len = 0;
  std::size_t malformed_lines = 0;
};

PreparedData prepare_data(const RunConfig& config);

// Stage commands. Outputs land in config.out_dir:
//   prepare: normalized.tsv, weak_labels.tsv, vocab.tsv
//   train:   checkpoint.bin, training_log.tsv
//   label:   labeled.tsv
//   evaluate: report.kv, report.txt (threshold sweep included)
// run_all composes the four stages and returns the evaluation report.
void cmd_prepare(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_label(const RunConfig& config, const std::string& checkpoint_path);
EvalReport cmd_evaluate(const RunConfig& config,
                        const std::string& labeled_path);
EvalReport cmd_run_all(const RunConfig& config);

// Default artifact locations under out_dir.
std::string checkpoint_path(const RunConfig& config);
std::string labeled_path(const RunConfig& config);

}  // namespace loglab
