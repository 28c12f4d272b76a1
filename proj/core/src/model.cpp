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

#include "loglab/model.hpp"

#include <cmath>
#include <limits>

#include "loglab/errors.hpp"

namespace loglab {
namespace {

constexpr double kLayerNormEps = 1e-5;

// Initial anomaly-score magnitude. The encoder output has norm close to
// sqrt(embed_dim), so the read-out starts at Xavier scale shrunk to put
// every score near kInitialScore: close to where the two penalty branches
// balance for realistic class ratios. Starting much higher stalls training
// in a long uniform-shrink phase; starting at zero stalls the U branch
// outright.
constexpr double kInitialScore = 0.3;

Eigen::MatrixXd xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd w(rows, cols);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w.data()[i] = rng.uniform(-limit, limit);
  }
  return w;
}

// y = gamma .* (x - mu) / sqrt(var + eps) + beta, per column. xhat and the
// per-column 1/sqrt(var + eps) are kept for the backward pass.
void layer_norm_forward(const Eigen::MatrixXd& input,
                        const Eigen::VectorXd& gamma,
                        const Eigen::VectorXd& beta, Eigen::MatrixXd& xhat,
                        Eigen::VectorXd& inv_std, Eigen::MatrixXd& out) {
  const Eigen::Index d = input.rows();
  const Eigen::Index n = input.cols();
  xhat.resize(d, n);
  inv_std.resize(n);
  out.resize(d, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double mu = input.col(c).mean();
    const auto centered = input.col(c).array() - mu;
    const double var = centered.square().sum() / static_cast<double>(d);
    const double r = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.col(c) = centered * r;
    inv_std(c) = r;
    out.col(c) =
        gamma.array() * xhat.col(c).array() + beta.array();
  }
}

void layer_norm_backward(const Eigen::MatrixXd& d_out,
                         const Eigen::VectorXd& gamma,
                         const Eigen::MatrixXd& xhat,
                         const Eigen::VectorXd& inv_std,
                         Eigen::MatrixXd& d_input, Eigen::VectorXd& d_gamma,
                         Eigen::VectorXd& d_beta) {
  const Eigen::Index d = xhat.rows();
  const Eigen::Index n = xhat.cols();
  d_gamma += (d_out.cwiseProduct(xhat)).rowwise().sum();
  d_beta += d_out.rowwise().sum();
  d_input.resize(d, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto g = d_out.col(c).array() * gamma.array();
    const double mean_g = g.mean();
    const double mean_gx = (g * xhat.col(c).array()).mean();
    d_input.col(c) =
        inv_std(c) * (g - mean_g - xhat.col(c).array() * mean_gx);
  }
}

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p,
                             Rng& rng) {
  Eigen::MatrixXd mask(rows, cols);
  const double scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.uniform() < p ? 0.0 : scale;
  }
  return mask;
}

void check_batch(const Batch& batch, const ModelConfig& config) {
  if (batch.count == 0) throw EmptyBatch("empty forward batch");
  if (batch.max_len != config.max_len) {
    throw ShapeMismatch("batch length " + std::to_string(batch.max_len) +
                        " != configured max_len " +
                        std::to_string(config.max_len));
  }
  const std::size_t n = batch.count * batch.max_len;
  for (std::size_t p = 0; p < n; ++p) {
    const std::int32_t id = batch.ids[p];
    if (id < 0 || static_cast<std::size_t>(id) >= config.vocab_size) {
      throw ShapeMismatch("token id " + std::to_string(id) +
                          " outside vocabulary of size " +
                          std::to_string(config.vocab_size));
    }
  }
  for (std::size_t b = 0; b < batch.count; ++b) {
    if (batch.mask[b * batch.max_len] == 0) {
      throw ShapeMismatch("position 0 must never be masked");
    }
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (embed_dim == 0 || n_heads == 0 || embed_dim % n_heads != 0) {
    throw InvalidConfig("embed_dim (" + std::to_string(embed_dim) +
                        ") must be a positive multiple of n_heads (" +
                        std::to_string(n_heads) + ")");
  }
  if (ff_hidden_dim == 0) throw InvalidConfig("ff_hidden_dim must be > 0");
  if (n_layers == 0) throw InvalidConfig("n_layers must be > 0");
  if (!(dropout >= 0.0) || dropout >= 1.0) {
    throw InvalidConfig("dropout must lie in [0,1)");
  }
  if (max_len < 2) throw InvalidConfig("max_len must be >= 2");
  if (vocab_size == 0) throw InvalidConfig("vocab_size must be > 0");
}

Eigen::MatrixXd sinusoidal_positional_encoding(std::size_t embed_dim,
                                               std::size_t max_len) {
  Eigen::MatrixXd pe(embed_dim, max_len);
  for (std::size_t pos = 0; pos < max_len; ++pos) {
    for (std::size_t i = 0; i < embed_dim; i += 2) {
      const double angle =
          static_cast<double>(pos) /
          std::pow(10000.0, static_cast<double>(i) /
                                static_cast<double>(embed_dim));
      pe(i, pos) = std::sin(angle);
      if (i + 1 < embed_dim) pe(i + 1, pos) = std::cos(angle);
    }
  }
  return pe;
}

ModelParameters init_parameters(const ModelConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const std::size_t d = config.embed_dim;
  const std::size_t ff = config.ff_hidden_dim;

  ModelParameters params;
  params.embedding.resize(d, config.vocab_size);
  for (Eigen::Index i = 0; i < params.embedding.size(); ++i) {
    params.embedding.data()[i] = rng.normal();
  }
  params.positional = sinusoidal_positional_encoding(d, config.max_len);

  params.layers.resize(config.n_layers);
  for (std::size_t l = 0; l < config.n_layers; ++l) {
    auto& layer = params.layers[l];
    layer.w_query = xavier_uniform(d, d, rng);
    layer.w_key = xavier_uniform(d, d, rng);
    layer.w_value = xavier_uniform(d, d, rng);
    layer.w_out = xavier_uniform(d, d, rng);
    layer.b_query = Eigen::VectorXd::Zero(d);
    layer.b_key = Eigen::VectorXd::Zero(d);
    layer.b_value = Eigen::VectorXd::Zero(d);
    layer.b_out = Eigen::VectorXd::Zero(d);
    layer.ln1_gamma = Eigen::VectorXd::Ones(d);
    layer.ln1_beta = Eigen::VectorXd::Zero(d);
    layer.w_ff1 = xavier_uniform(ff, d, rng);
    layer.b_ff1 = Eigen::VectorXd::Zero(ff);
    layer.w_ff2 = xavier_uniform(d, ff, rng);
    layer.b_ff2 = Eigen::VectorXd::Zero(d);
    layer.ln2_gamma = Eigen::VectorXd::Ones(d);
    layer.ln2_beta = Eigen::VectorXd::Zero(d);
  }

  // |W h| for iid entries of std s and |h| = sqrt(d) is about d * s.
  params.score_proj = xavier_uniform(d, d, rng);
  params.score_proj *= kInitialScore / std::sqrt(static_cast<double>(d));
  return params;
}

ModelParameters make_zero_parameters(const ModelConfig& config) {
  config.validate();
  const std::size_t d = config.embed_dim;
  const std::size_t ff = config.ff_hidden_dim;
  ModelParameters params;
  params.embedding = Eigen::MatrixXd::Zero(d, config.vocab_size);
  params.positional = Eigen::MatrixXd::Zero(d, config.max_len);
  params.layers.resize(config.n_layers);
  for (auto& layer : params.layers) {
    layer.w_query = Eigen::MatrixXd::Zero(d, d);
    layer.w_key = Eigen::MatrixXd::Zero(d, d);
    layer.w_value = Eigen::MatrixXd::Zero(d, d);
    layer.w_out = Eigen::MatrixXd::Zero(d, d);
    layer.b_query = Eigen::VectorXd::Zero(d);
    layer.b_key = Eigen::VectorXd::Zero(d);
    layer.b_value = Eigen::VectorXd::Zero(d);
    layer.b_out = Eigen::VectorXd::Zero(d);
    layer.ln1_gamma = Eigen::VectorXd::Zero(d);
    layer.ln1_beta = Eigen::VectorXd::Zero(d);
    layer.w_ff1 = Eigen::MatrixXd::Zero(ff, d);
    layer.b_ff1 = Eigen::VectorXd::Zero(ff);
    layer.w_ff2 = Eigen::MatrixXd::Zero(d, ff);
    layer.b_ff2 = Eigen::VectorXd::Zero(d);
    layer.ln2_gamma = Eigen::VectorXd::Zero(d);
    layer.ln2_beta = Eigen::VectorXd::Zero(d);
  }
  params.score_proj = Eigen::MatrixXd::Zero(d, d);
  return params;
}

Eigen::MatrixXd encoder_forward(const Batch& batch,
                                const ModelParameters& params,
                                const ModelConfig& config, Rng* dropout_rng,
                                ForwardCache* cache) {
  config.validate();
  check_batch(batch, config);

  const Eigen::Index d = static_cast<Eigen::Index>(config.embed_dim);
  const Eigen::Index L = static_cast<Eigen::Index>(config.max_len);
  const Eigen::Index count = static_cast<Eigen::Index>(batch.count);
  const Eigen::Index n_cols = count * L;
  const Eigen::Index heads = static_cast<Eigen::Index>(config.n_heads);
  const Eigen::Index dh = d / heads;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
  const bool use_dropout = dropout_rng != nullptr && config.dropout > 0.0;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  ForwardCache local;
  ForwardCache& ws = cache != nullptr ? *cache : local;
  ws.layers.resize(config.n_layers);

  Eigen::MatrixXd x(d, n_cols);
  for (Eigen::Index p = 0; p < n_cols; ++p) {
    x.col(p) = params.embedding.col(batch.ids[p]) + params.positional.col(p % L);
  }

  Eigen::MatrixXd scores(L, L);
  for (std::size_t l = 0; l < config.n_layers; ++l) {
    const auto& layer = params.layers[l];
    auto& c = ws.layers[l];
    c.input = std::move(x);

    c.q.noalias() = layer.w_query * c.input;
    c.q.colwise() += layer.b_query;
    c.k.noalias() = layer.w_key * c.input;
    c.k.colwise() += layer.b_key;
    c.v.noalias() = layer.w_value * c.input;
    c.v.colwise() += layer.b_value;

    c.attn_probs.resize(L, count * heads * L);
    c.attn_concat.resize(d, n_cols);
    for (Eigen::Index b = 0; b < count; ++b) {
      const std::uint8_t* mask = batch.mask + b * L;
      for (Eigen::Index h = 0; h < heads; ++h) {
        const auto qb = c.q.block(h * dh, b * L, dh, L);
        const auto kb = c.k.block(h * dh, b * L, dh, L);
        const auto vb = c.v.block(h * dh, b * L, dh, L);
        scores.noalias() = qb.transpose() * kb;
        scores *= inv_sqrt_dh;
        // [PAD] keys get -inf logits: exactly zero weight after softmax,
        // so nothing at a masked position can reach an unmasked one.
        for (Eigen::Index j = 0; j < L; ++j) {
          if (mask[j] == 0) scores.col(j).setConstant(kNegInf);
        }
        auto probs = c.attn_probs.block(0, (b * heads + h) * L, L, L);
        for (Eigen::Index i = 0; i < L; ++i) {
          const double row_max = scores.row(i).maxCoeff();
          probs.row(i) = (scores.row(i).array() - row_max).exp();
          probs.row(i) /= probs.row(i).sum();
        }
        c.attn_concat.block(h * dh, b * L, dh, L).noalias() =
            vb * probs.transpose();
      }
    }

    Eigen::MatrixXd sublayer;
    sublayer.noalias() = layer.w_out * c.attn_concat;
    sublayer.colwise() += layer.b_out;
    if (use_dropout) {
      c.drop1 = dropout_mask(d, n_cols, config.dropout, *dropout_rng);
      sublayer = sublayer.cwiseProduct(c.drop1);
    } else {
      c.drop1.resize(0, 0);
    }
    sublayer += c.input;
    layer_norm_forward(sublayer, layer.ln1_gamma, layer.ln1_beta, c.ln1_xhat,
                       c.ln1_inv_std, c.ln1_out);

    c.ff_pre.noalias() = layer.w_ff1 * c.ln1_out;
    c.ff_pre.colwise() += layer.b_ff1;
    c.ff_act = c.ff_pre.cwiseMax(0.0);
    Eigen::MatrixXd ff;
    ff.noalias() = layer.w_ff2 * c.ff_act;
    ff.colwise() += layer.b_ff2;
    if (use_dropout) {
      c.drop2 = dropout_mask(d, n_cols, config.dropout, *dropout_rng);
      ff = ff.cwiseProduct(c.drop2);
    } else {
      c.drop2.resize(0, 0);
    }
    ff += c.ln1_out;
    layer_norm_forward(ff, layer.ln2_gamma, layer.ln2_beta, c.ln2_xhat,
                       c.ln2_inv_std, x);
  }

  ws.cls_out.resize(d, count);
  for (Eigen::Index b = 0; b < count; ++b) {
    ws.cls_out.col(b) = x.col(b * L);
  }
  Eigen::MatrixXd z;
  z.noalias() = params.score_proj * ws.cls_out;
  return z;
}

void encoder_backward(const Batch& batch, const ModelParameters& params,
                      const ModelConfig& config, const ForwardCache& cache,
                      const Eigen::MatrixXd& z_grad, ModelParameters& grads) {
  const Eigen::Index d = static_cast<Eigen::Index>(config.embed_dim);
  const Eigen::Index L = static_cast<Eigen::Index>(config.max_len);
  const Eigen::Index count = static_cast<Eigen::Index>(batch.count);
  const Eigen::Index n_cols = count * L;
  const Eigen::Index heads = static_cast<Eigen::Index>(config.n_heads);
  const Eigen::Index dh = d / heads;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
  if (z_grad.rows() != d || z_grad.cols() != count) {
    throw ShapeMismatch("z_grad shape does not match batch");
  }
  if (cache.layers.size() != config.n_layers) {
    throw ShapeMismatch("forward cache does not match config");
  }

  // Through the read-out, then into the [CLS] column of each message.
  grads.score_proj.noalias() += z_grad * cache.cls_out.transpose();
  Eigen::MatrixXd d_cls;
  d_cls.noalias() = params.score_proj.transpose() * z_grad;
  Eigen::MatrixXd d_x = Eigen::MatrixXd::Zero(d, n_cols);
  for (Eigen::Index b = 0; b < count; ++b) {
    d_x.col(b * L) = d_cls.col(b);
  }

  Eigen::MatrixXd d_r, d_pre, d_q, d_k, d_v;
  Eigen::MatrixXd d_ob(dh, L), d_vb(dh, L), d_pb(L, L), d_sb(L, L);
  for (std::size_t l = config.n_layers; l-- > 0;) {
    const auto& layer = params.layers[l];
    const auto& c = cache.layers[l];
    auto& g = grads.layers[l];

    // ln2
    layer_norm_backward(d_x, layer.ln2_gamma, c.ln2_xhat, c.ln2_inv_std, d_r,
                        g.ln2_gamma, g.ln2_beta);

    // feed-forward
    Eigen::MatrixXd d_ff = c.drop2.size() ? d_r.cwiseProduct(c.drop2) : d_r;
    g.w_ff2.noalias() += d_ff * c.ff_act.transpose();
    g.b_ff2 += d_ff.rowwise().sum();
    d_pre.noalias() = layer.w_ff2.transpose() * d_ff;
    d_pre = (c.ff_pre.array() > 0.0).select(d_pre, 0.0);
    g.w_ff1.noalias() += d_pre * c.ln1_out.transpose();
    g.b_ff1 += d_pre.rowwise().sum();
    Eigen::MatrixXd d_h;
    d_h.noalias() = layer.w_ff1.transpose() * d_pre;
    d_h += d_r;  // residual skip

    // ln1
    layer_norm_backward(d_h, layer.ln1_gamma, c.ln1_xhat, c.ln1_inv_std, d_r,
                        g.ln1_gamma, g.ln1_beta);

    // attention output projection
    Eigen::MatrixXd d_attn = c.drop1.size() ? d_r.cwiseProduct(c.drop1) : d_r;
    g.w_out.noalias() += d_attn * c.attn_concat.transpose();
    g.b_out += d_attn.rowwise().sum();
    Eigen::MatrixXd d_concat;
    d_concat.noalias() = layer.w_out.transpose() * d_attn;

    d_q.setZero(d, n_cols);
    d_k.setZero(d, n_cols);
    d_v.setZero(d, n_cols);
    for (Eigen::Index b = 0; b < count; ++b) {
      for (Eigen::Index h = 0; h < heads; ++h) {
        const auto probs = c.attn_probs.block(0, (b * heads + h) * L, L, L);
        const auto qb = c.q.block(h * dh, b * L, dh, L);
        const auto kb = c.k.block(h * dh, b * L, dh, L);
        const auto vb = c.v.block(h * dh, b * L, dh, L);
        d_ob = d_concat.block(h * dh, b * L, dh, L);

        d_vb.noalias() = d_ob * probs;
        d_pb.noalias() = d_ob.transpose() * vb;
        // softmax backward, row-wise; masked columns stay zero because
        // their probabilities are exactly zero.
        for (Eigen::Index i = 0; i < L; ++i) {
          const double dot = d_pb.row(i).dot(probs.row(i));
          d_sb.row(i) =
              probs.row(i).array() * (d_pb.row(i).array() - dot);
        }
        d_sb *= inv_sqrt_dh;
        d_q.block(h * dh, b * L, dh, L).noalias() = kb * d_sb.transpose();
        d_k.block(h * dh, b * L, dh, L).noalias() = qb * d_sb;
        d_v.block(h * dh, b * L, dh, L) = d_vb;
      }
    }

    g.w_query.noalias() += d_q * c.input.transpose();
    g.b_query += d_q.rowwise().sum();
    g.w_key.noalias() += d_k * c.input.transpose();
    g.b_key += d_k.rowwise().sum();
    g.w_value.noalias() += d_v * c.input.transpose();
    g.b_value += d_v.rowwise().sum();

    d_x.noalias() = layer.w_query.transpose() * d_q;
    d_x.noalias() += layer.w_key.transpose() * d_k;
    d_x.noalias() += layer.w_value.transpose() * d_v;
    d_x += d_r;  // residual skip
  }

  for (Eigen::Index p = 0; p < n_cols; ++p) {
    grads.embedding.col(batch.ids[p]) += d_x.col(p);
  }
}

std::vector<ScoredMessage> forward(const Batch& batch,
                                   const ModelParameters& params,
                                   const ModelConfig& config,
                                   bool training_mode, Rng* dropout_rng) {
  if (training_mode && config.dropout > 0.0 && dropout_rng == nullptr) {
    throw InvalidConfig("training-mode forward with dropout needs an rng");
  }
  const Eigen::MatrixXd z = encoder_forward(
      batch, params, config, training_mode ? dropout_rng : nullptr, nullptr);
  std::vector<ScoredMessage> out(batch.count);
  for (std::size_t b = 0; b < batch.count; ++b) {
    out[b].id = b;
    out[b].z = z.col(b);
    out[b].score = out[b].z.norm();
  }
  return out;
}

std::vector<ScoredMessage> score_dataset(const std::vector<LogRecord>& records,
                                         const Vocabulary& vocab,
                                         const ModelParameters& params,
                                         const ModelConfig& config,
                                         std::size_t batch_size) {
  if (batch_size == 0) throw InvalidConfig("batch_size must be > 0");
  const EncodedDataset data = encode_all(records, vocab, config.max_len);
  std::vector<ScoredMessage> out;
  out.reserve(records.size());
  for (std::size_t begin = 0; begin < data.count; begin += batch_size) {
    const std::size_t n = std::min(batch_size, data.count - begin);
    const Batch batch{data.ids.data() + begin * data.max_len,
                      data.mask.data() + begin * data.max_len, n,
                      data.max_len};
    const Eigen::MatrixXd z = encoder_forward(batch, params, config);
    for (std::size_t b = 0; b < n; ++b) {
      ScoredMessage msg;
      msg.id = records[begin + b].id;
      msg.z = z.col(static_cast<Eigen::Index>(b));
      msg.score = msg.z.norm();
      out.push_back(std::move(msg));
    }
  }
  return out;
}

std::vector<double> score_dataset_norms(const EncodedDataset& data,
                                        const ModelParameters& params,
                                        const ModelConfig& config,
                                        std::size_t batch_size) {
  if (batch_size == 0) throw InvalidConfig("batch_size must be > 0");
  std::vector<double> scores;
  scores.reserve(data.count);
  for (std::size_t begin = 0; begin < data.count; begin += batch_size) {
    const std::size_t n = std::min(batch_size, data.count - begin);
    const Batch batch{data.ids.data() + begin * data.max_len,
                      data.mask.data() + begin * data.max_len, n,
                      data.max_len};
    const Eigen::MatrixXd z = encoder_forward(batch, params, config);
    for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(n); ++b) {
      scores.push_back(z.col(b).norm());
    }
  }
  return scores;
}

}  // namespace loglab
