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

#include "loglab/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "loglab/errors.hpp"

namespace loglab {
namespace {

constexpr char kCheckpointMagic[4] = {'L', 'G', 'L', 'B'};
constexpr std::uint32_t kCheckpointVersion = 1;

// FNV-1a over the payload; catches bit rot and truncation.
std::uint64_t fnv1a(std::uint64_t state, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    state ^= bytes[i];
    state *= 1099511628211ULL;
  }
  return state;
}

struct AdamState {
  ModelParameters m;
  ModelParameters v;
  std::size_t step = 0;
};

// One coupled-weight-decay Adam step over every trainable tensor.
void adam_step(ModelParameters& params, ModelParameters& grads,
               AdamState& state, const TrainingConfig& cfg) {
  ++state.step;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

  struct Cursor {
    double* p;
    double* g;
    double* m;
    double* v;
  };
  std::vector<Cursor> cursors;
  std::vector<std::ptrdiff_t> sizes;
  visit_tensors(params, [&](std::string_view, double* data,
                            std::ptrdiff_t size) {
    cursors.push_back({data, nullptr, nullptr, nullptr});
    sizes.push_back(size);
  });
  std::size_t i = 0;
  visit_tensors(grads, [&](std::string_view, double* data, std::ptrdiff_t) {
    cursors[i++].g = data;
  });
  i = 0;
  visit_tensors(state.m, [&](std::string_view, double* data, std::ptrdiff_t) {
    cursors[i++].m = data;
  });
  i = 0;
  visit_tensors(state.v, [&](std::string_view, double* data, std::ptrdiff_t) {
    cursors[i++].v = data;
  });

  for (std::size_t t = 0; t < cursors.size(); ++t) {
    auto [p, g, m, v] = cursors[t];
    for (std::ptrdiff_t k = 0; k < sizes[t]; ++k) {
      const double grad = g[k] + cfg.weight_decay * p[k];
      m[k] = b1 * m[k] + (1.0 - b1) * grad;
      v[k] = b2 * v[k] + (1.0 - b2) * grad * grad;
      const double m_hat = m[k] / bias1;
      const double v_hat = v[k] / bias2;
      p[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
    }
  }
}

void zero_gradients(ModelParameters& grads) {
  visit_tensors(grads, [](std::string_view, double* data, std::ptrdiff_t size) {
    std::memset(data, 0, static_cast<std::size_t>(size) * sizeof(double));
  });
}

}  // namespace

void TrainingConfig::validate() const {
  if (batch_size == 0) throw InvalidConfig("batch_size must be >= 1");
  if (epochs == 0) throw InvalidConfig("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate must be > 0");
  if (weight_decay < 0.0) throw InvalidConfig("weight_decay must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw InvalidConfig("adam betas must lie in [0,1)");
  }
  if (!(epsilon_norm > 0.0)) throw InvalidConfig("epsilon_norm must be > 0");
}

void TrainingLog::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "epoch\tmean_loss\tmean_p_term\tmean_u_term\twall_seconds\n";
  out.precision(17);
  for (const auto& e : epochs) {
    out << e.epoch << '\t' << e.mean_loss << '\t' << e.mean_p_term << '\t'
        << e.mean_u_term << '\t' << e.wall_seconds << '\n';
  }
  if (!out) throw IoError("write error on '" + path + "'");
}

TrainResult train(const WeakDataset& dataset, const Vocabulary& vocab,
                  const ModelConfig& model_config,
                  const TrainingConfig& training_config,
                  const EpochCallback& on_epoch) {
  const EncodedDataset encoded =
      encode_all(dataset.records, vocab, model_config.max_len);
  return train_encoded(encoded, dataset.weak_labels, dataset.q(), model_config,
                       training_config, on_epoch);
}

TrainResult train_encoded(const EncodedDataset& encoded,
                          const std::vector<std::uint8_t>& weak_labels,
                          double q, const ModelConfig& model_config,
                          const TrainingConfig& training_config,
                          const EpochCallback& on_epoch) {
  model_config.validate();
  training_config.validate();
  if (encoded.count != weak_labels.size()) {
    throw ShapeMismatch("encoded corpus and weak labels disagree in size");
  }
  if (encoded.count == 0) throw EmptyDataset("nothing to train on");
  const std::size_t n_u = static_cast<std::size_t>(
      std::count(weak_labels.begin(), weak_labels.end(), kWeakUnlabeled));
  if (n_u == 0 || n_u == encoded.count) {
    throw DegeneratePartition("training needs both P and U non-empty");
  }

  LossConfig loss_config{q, training_config.epsilon_norm};
  loss_config.validate();

  TrainResult result;
  result.params = init_parameters(model_config);
  ModelParameters grads = make_zero_parameters(model_config);
  AdamState adam{make_zero_parameters(model_config),
                 make_zero_parameters(model_config), 0};

  Rng dropout_rng(Rng::mix(training_config.shuffle_seed, 0x0d70));

  const std::size_t n = encoded.count;
  const std::size_t L = encoded.max_len;
  const std::size_t bs = training_config.batch_size;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<std::int32_t> batch_ids(bs * L);
  std::vector<std::uint8_t> batch_mask(bs * L);
  std::vector<std::uint8_t> batch_y(bs);
  ForwardCache cache;

  for (std::size_t epoch = 1; epoch <= training_config.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();

    // Deterministic per-epoch reshuffle (Fisher-Yates).
    Rng shuffle_rng(Rng::mix(training_config.shuffle_seed, epoch));
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[shuffle_rng.below(i + 1)]);
    }

    double loss_sum = 0.0;
    double p_sum = 0.0, u_sum = 0.0;
    std::size_t p_count = 0, u_count = 0;

    for (std::size_t begin = 0; begin < n; begin += bs) {
      const std::size_t m = std::min(bs, n - begin);
      for (std::size_t b = 0; b < m; ++b) {
        const std::size_t row = order[begin + b];
        std::memcpy(batch_ids.data() + b * L, encoded.ids.data() + row * L,
                    L * sizeof(std::int32_t));
        std::memcpy(batch_mask.data() + b * L, encoded.mask.data() + row * L,
                    L * sizeof(std::uint8_t));
        batch_y[b] = weak_labels[row];
      }
      const Batch batch{batch_ids.data(), batch_mask.data(), m, L};
      const std::vector<std::uint8_t> y(batch_y.begin(), batch_y.begin() + m);

      const Eigen::MatrixXd z = encoder_forward(batch, result.params,
                                                model_config, &dropout_rng,
                                                &cache);
      const LossResult loss = pu_loss(z, y, loss_config);
      if (!std::isfinite(loss.loss)) {
        throw NonFiniteLoss("loss became non-finite at epoch " +
                            std::to_string(epoch) + ", sample offset " +
                            std::to_string(begin));
      }
      loss_sum += loss.loss * static_cast<double>(m);
      for (std::size_t b = 0; b < m; ++b) {
        if (y[b] == kWeakPositive) {
          p_sum += loss.per_sample[b];
          ++p_count;
        } else {
          u_sum += loss.per_sample[b];
          ++u_count;
        }
      }

      const Eigen::MatrixXd z_grad = pu_loss_gradient(z, y, loss_config);
      zero_gradients(grads);
      encoder_backward(batch, result.params, model_config, cache, z_grad,
                       grads);
      adam_step(result.params, grads, adam, training_config);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_sum / static_cast<double>(n);
    stats.mean_p_term = p_count ? p_sum / static_cast<double>(p_count) : 0.0;
    stats.mean_u_term = u_count ? u_sum / static_cast<double>(u_count) : 0.0;
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      epoch_start)
            .count();
    result.log.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

namespace {

void write_raw(std::ofstream& out, std::uint64_t& checksum, const void* data,
               std::size_t size) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  checksum = fnv1a(checksum, data, size);
}

void read_raw(std::ifstream& in, std::uint64_t& checksum, void* data,
              std::size_t size) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in.gcount()) != size) {
    throw IoError("checkpoint truncated");
  }
  checksum = fnv1a(checksum, data, size);
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelConfig& config,
                     const ModelParameters& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  std::uint64_t checksum = 1469598103934665603ULL;  // FNV offset basis
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_raw(out, checksum, &kCheckpointVersion, sizeof(kCheckpointVersion));

  const std::uint64_t fields[7] = {config.embed_dim,  config.ff_hidden_dim,
                                   config.n_layers,   config.n_heads,
                                   config.max_len,    config.vocab_size,
                                   config.seed};
  write_raw(out, checksum, fields, sizeof(fields));
  write_raw(out, checksum, &config.dropout, sizeof(config.dropout));

  visit_tensors(const_cast<ModelParameters&>(params),
                [&](std::string_view, double* data, std::ptrdiff_t size) {
                  write_raw(out, checksum, data,
                            static_cast<std::size_t>(size) * sizeof(double));
                });
  out.write(reinterpret_cast<const char*>(&checksum), sizeof(checksum));
  if (!out) throw IoError("write error on '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");

  char magic[4];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) ||
      std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw VersionMismatch("'" + path + "' is not a checkpoint file");
  }
  std::uint64_t checksum = 1469598103934665603ULL;
  std::uint32_t version = 0;
  read_raw(in, checksum, &version, sizeof(version));
  if (version != kCheckpointVersion) {
    throw VersionMismatch("unsupported checkpoint version " +
                          std::to_string(version));
  }

  std::uint64_t fields[7];
  read_raw(in, checksum, fields, sizeof(fields));
  Checkpoint ckpt;
  ckpt.config.embed_dim = fields[0];
  ckpt.config.ff_hidden_dim = fields[1];
  ckpt.config.n_layers = fields[2];
  ckpt.config.n_heads = fields[3];
  ckpt.config.max_len = fields[4];
  ckpt.config.vocab_size = fields[5];
  ckpt.config.seed = fields[6];
  read_raw(in, checksum, &ckpt.config.dropout, sizeof(ckpt.config.dropout));
  ckpt.config.validate();

  ckpt.params = make_zero_parameters(ckpt.config);
  ckpt.params.positional = sinusoidal_positional_encoding(
      ckpt.config.embed_dim, ckpt.config.max_len);
  visit_tensors(ckpt.params,
                [&](std::string_view, double* data, std::ptrdiff_t size) {
                  read_raw(in, checksum, data,
                           static_cast<std::size_t>(size) * sizeof(double));
                });

  std::uint64_t stored = 0;
  in.read(reinterpret_cast<char*>(&stored), sizeof(stored));
  if (static_cast<std::size_t>(in.gcount()) != sizeof(stored) ||
      stored != checksum) {
    throw IoError("checkpoint '" + path + "' failed its checksum");
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::string& path,
                           std::size_t expected_vocab_size) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.config.vocab_size != expected_vocab_size) {
    throw VersionMismatch("checkpoint vocabulary size " +
                          std::to_string(ckpt.config.vocab_size) +
                          " does not match active vocabulary of " +
                          std::to_string(expected_vocab_size));
  }
  return ckpt;
}

}  // namespace loglab
