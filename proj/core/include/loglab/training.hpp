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
#include <functional>
#include <string>
#include <vector>

#include "loglab/model.hpp"
#include "loglab/objective.hpp"
#include "loglab/preprocessing.hpp"
#include "loglab/weak_supervision.hpp"

namespace loglab {

struct TrainingConfig {
  std::size_t batch_size = 1024;
  std::size_t epochs = 8;
  double learning_rate = 1e-4;
  double weight_decay = 5e-5;  // classic L2, folded into the gradient
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t shuffle_seed = 42;
  double epsilon_norm = 1e-6;

  void validate() const;  // throws InvalidConfig
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double mean_p_term = 0.0;  // mean |z|^2 over P samples
  double mean_u_term = 0.0;  // mean q^2/|z| over U samples
  double wall_seconds = 0.0;
};

struct TrainingLog {
  std::vector<EpochStats> epochs;

  // One tab-separated record per epoch.
  void save(const std::string& path) const;
};

struct TrainResult {
  ModelParameters params;
  TrainingLog log;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Mini-batch Adam over the PU objective. Batches are drawn from a
// per-epoch deterministic reshuffle; the last incomplete batch is kept and
// its actual size is the loss normalizer. Weight decay is coupled: wd * p
// is added to every parameter gradient before the Adam moments. Throws
// DegeneratePartition when either weak class is empty and NonFiniteLoss
// (with step diagnostics) if the loss leaves the reals.
TrainResult train(const WeakDataset& dataset, const Vocabulary& vocab,
                  const ModelConfig& model_config,
                  const TrainingConfig& training_config,
                  const EpochCallback& on_epoch = {});

// Variant for callers that already encoded the corpus; avoids a second
// tokenize/encode pass.
TrainResult train_encoded(const EncodedDataset& encoded,
                          const std::vector<std::uint8_t>& weak_labels,
                          double q, const ModelConfig& model_config,
                          const TrainingConfig& training_config,
                          const EpochCallback& on_epoch = {});

// Versioned binary checkpoint holding the model config and every weight
// array; restoring yields bit-identical eval-mode scores. A payload
// checksum rejects corrupt files.
void save_checkpoint(const std::string& path, const ModelConfig& config,
                     const ModelParameters& params);

struct Checkpoint {
  ModelConfig config;
  ModelParameters params;
};

Checkpoint load_checkpoint(const std::string& path);

// Additionally requires the stored vocab size to match; throws
// VersionMismatch otherwise.
Checkpoint load_checkpoint(const std::string& path,
                           std::size_t expected_vocab_size);

}  // namespace loglab
