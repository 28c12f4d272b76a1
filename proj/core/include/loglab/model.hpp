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

#include <Eigen/Core>
#include <cstdint>
#include <string_view>
#include <vector>

#include "loglab/ingestion.hpp"
#include "loglab/preprocessing.hpp"
#include "loglab/rng.hpp"

namespace loglab {

struct ModelConfig {
  std::size_t embed_dim = 128;
  std::size_t ff_hidden_dim = 256;
  std::size_t n_layers = 2;
  std::size_t n_heads = 2;
  double dropout = 0.10;
  std::size_t max_len = 12;
  std::size_t vocab_size = 0;
  std::uint64_t seed = 42;

  void validate() const;  // throws InvalidConfig
};

// One post-norm encoder layer: multi-head self-attention and a two-layer
// feed-forward block, each followed by residual + layer norm.
struct EncoderLayerParams {
  Eigen::MatrixXd w_query, w_key, w_value, w_out;  // embed_dim x embed_dim
  Eigen::VectorXd b_query, b_key, b_value, b_out;  // embed_dim
  Eigen::VectorXd ln1_gamma, ln1_beta;
  Eigen::MatrixXd w_ff1;  // ff_hidden_dim x embed_dim
  Eigen::VectorXd b_ff1;
  Eigen::MatrixXd w_ff2;  // embed_dim x ff_hidden_dim
  Eigen::VectorXd b_ff2;
  Eigen::VectorXd ln2_gamma, ln2_beta;
};

struct ModelParameters {
  Eigen::MatrixXd embedding;   // embed_dim x vocab_size, one column per token
  Eigen::MatrixXd positional;  // embed_dim x max_len, fixed sinusoids
  std::vector<EncoderLayerParams> layers;
  // Bias-free linear read-out of the final [CLS] vector. Layer norm pins
  // the norm of its own output at sqrt(embed_dim) for every input, so a
  // raw post-norm [CLS] vector cannot carry an input-dependent anomaly
  // score; the read-out frees the norm. No bias: a constant score must
  // not be expressible independently of the input.
  Eigen::MatrixXd score_proj;  // embed_dim x embed_dim
};

// Visits every trainable tensor in a fixed order as (name, data, size).
// The positional encodings are excluded: they are not parameters.
template <typename Params, typename Fn>
void visit_tensors(Params& params, Fn&& fn) {
  fn(std::string_view("embedding"), params.embedding.data(),
     params.embedding.size());
  for (auto& layer : params.layers) {
    fn(std::string_view("w_query"), layer.w_query.data(), layer.w_query.size());
    fn(std::string_view("b_query"), layer.b_query.data(), layer.b_query.size());
    fn(std::string_view("w_key"), layer.w_key.data(), layer.w_key.size());
    fn(std::string_view("b_key"), layer.b_key.data(), layer.b_key.size());
    fn(std::string_view("w_value"), layer.w_value.data(), layer.w_value.size());
    fn(std::string_view("b_value"), layer.b_value.data(), layer.b_value.size());
    fn(std::string_view("w_out"), layer.w_out.data(), layer.w_out.size());
    fn(std::string_view("b_out"), layer.b_out.data(), layer.b_out.size());
    fn(std::string_view("ln1_gamma"), layer.ln1_gamma.data(), layer.ln1_gamma.size());
    fn(std::string_view("ln1_beta"), layer.ln1_beta.data(), layer.ln1_beta.size());
    fn(std::string_view("w_ff1"), layer.w_ff1.data(), layer.w_ff1.size());
    fn(std::string_view("b_ff1"), layer.b_ff1.data(), layer.b_ff1.size());
    fn(std::string_view("w_ff2"), layer.w_ff2.data(), layer.w_ff2.size());
    fn(std::string_view("b_ff2"), layer.b_ff2.data(), layer.b_ff2.size());
    fn(std::string_view("ln2_gamma"), layer.ln2_gamma.data(), layer.ln2_gamma.size());
    fn(std::string_view("ln2_beta"), layer.ln2_beta.data(), layer.ln2_beta.size());
  }
  fn(std::string_view("score_proj"), params.score_proj.data(),
     params.score_proj.size());
}

// Fixed sinusoidal positional encodings, embed_dim x max_len.
Eigen::MatrixXd sinusoidal_positional_encoding(std::size_t embed_dim,
                                               std::size_t max_len);

// Deterministic given config.seed. Projections are Xavier-uniform, token
// embeddings unit normal, biases zero. The final layer norm gain starts at
// 0.5 so initial scores sit around 0.5*sqrt(embed_dim): far from both the
// zero norm that stalls the U branch and the huge norms that stall P.
ModelParameters init_parameters(const ModelConfig& config);

// Same shapes as init_parameters would give, all trainable tensors zero.
// Used for gradients and optimizer state.
ModelParameters make_zero_parameters(const ModelConfig& config);

struct ScoredMessage {
  std::size_t id = 0;
  Eigen::VectorXd z;   // read-out of the final [CLS] vector, dim embed_dim
  double score = 0.0;  // |z|
};

// Non-owning view over `count` encoded rows of length max_len each.
struct Batch {
  const std::int32_t* ids = nullptr;
  const std::uint8_t* mask = nullptr;
  std::size_t count = 0;
  std::size_t max_len = 0;

  static Batch of(const EncodedDataset& data) {
    return {data.ids.data(), data.mask.data(), data.count, data.max_len};
  }
};

// Cached activations of one forward pass, consumed by encoder_backward.
// Buffers are reused across calls to avoid reallocation.
struct ForwardCache {
  Eigen::MatrixXd cls_out;  // final [CLS] vectors before the read-out
  struct LayerCache {
    Eigen::MatrixXd input;        // layer input, embed_dim x n_cols
    Eigen::MatrixXd q, k, v;      // projections
    Eigen::MatrixXd attn_probs;   // max_len x (count * heads * max_len)
    Eigen::MatrixXd attn_concat;  // pre-w_out head concat
    Eigen::MatrixXd drop1, drop2; // dropout multipliers (empty = no dropout)
    Eigen::MatrixXd ln1_xhat, ln2_xhat;
    Eigen::VectorXd ln1_inv_std, ln2_inv_std;
    Eigen::MatrixXd ln1_out;      // feed-forward input
    Eigen::MatrixXd ff_pre;       // before relu
    Eigen::MatrixXd ff_act;       // after relu
  };
  std::vector<LayerCache> layers;
};

// Runs the encoder over a batch and returns the [CLS] outputs as columns
// of an embed_dim x count matrix. Dropout is applied only when
// dropout_rng is non-null and config.dropout > 0. When cache is non-null
// every intermediate needed by encoder_backward is recorded.
Eigen::MatrixXd encoder_forward(const Batch& batch,
                                const ModelParameters& params,
                                const ModelConfig& config,
                                Rng* dropout_rng = nullptr,
                                ForwardCache* cache = nullptr);

// Accumulates d(loss)/d(parameters) into `grads` (same shapes as params,
// zero-initialize with make_zero_parameters) given d(loss)/dz.
void encoder_backward(const Batch& batch, const ModelParameters& params,
                      const ModelConfig& config, const ForwardCache& cache,
                      const Eigen::MatrixXd& z_grad, ModelParameters& grads);

// Scores one batch. training_mode enables dropout and then requires an rng
// unless dropout is zero. Ids in the batch must be < config.vocab_size.
// Message ids are the batch positions.
std::vector<ScoredMessage> forward(const Batch& batch,
                                   const ModelParameters& params,
                                   const ModelConfig& config,
                                   bool training_mode = false,
                                   Rng* dropout_rng = nullptr);

// Tokenizes, encodes and scores every record in order (eval mode, no
// dropout). Message ids are the record ids.
std::vector<ScoredMessage> score_dataset(const std::vector<LogRecord>& records,
                                         const Vocabulary& vocab,
                                         const ModelParameters& params,
                                         const ModelConfig& config,
                                         std::size_t batch_size = 256);

// Same pipeline as score_dataset but keeps only |z| per record; used on
// corpora where storing every output vector would be wasteful.
std::vector<double> score_dataset_norms(const EncodedDataset& data,
                                        const ModelParameters& params,
                                        const ModelConfig& config,
                                        std::size_t batch_size = 256);

}  // namespace loglab
