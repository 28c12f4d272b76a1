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

#include <benchmark/benchmark.h>

#include "loglab/model.hpp"
#include "loglab/objective.hpp"
#include "loglab/rng.hpp"

namespace {

struct Fixture {
  loglab::ModelConfig config;
  loglab::ModelParameters params;
  std::vector<std::int32_t> ids;
  std::vector<std::uint8_t> mask;

  explicit Fixture(std::size_t batch) {
    config.vocab_size = 200;
    config.max_len = 12;
    params = loglab::init_parameters(config);
    loglab::Rng rng(11);
    ids.resize(batch * config.max_len);
    mask.assign(batch * config.max_len, 1);
    for (std::size_t b = 0; b < batch; ++b) {
      ids[b * config.max_len] = loglab::kClsId;
      for (std::size_t l = 1; l < config.max_len; ++l) {
        ids[b * config.max_len + l] =
            static_cast<std::int32_t>(5 + rng.below(config.vocab_size - 5));
      }
    }
  }

  loglab::Batch batch() const {
    return {ids.data(), mask.data(), mask.size() / config.max_len,
            config.max_len};
  }
};

void BM_ForwardEval(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(loglab::encoder_forward(f.batch(), f.params, f.config));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_ForwardEval)->Arg(64)->Arg(256)->Arg(1024);

void BM_TrainStep(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  loglab::ModelParameters grads = loglab::make_zero_parameters(f.config);
  loglab::ForwardCache cache;
  loglab::Rng dropout_rng(3);
  std::vector<std::uint8_t> y(static_cast<std::size_t>(state.range(0)), 0);
  for (std::size_t i = 0; i < y.size(); i += 10) y[i] = 1;
  const loglab::LossConfig loss_config{0.9, 1e-6};

  for (auto _ : state) {
    const Eigen::MatrixXd z = loglab::encoder_forward(
        f.batch(), f.params, f.config, &dropout_rng, &cache);
    const Eigen::MatrixXd z_grad = loglab::pu_loss_gradient(z, y, loss_config);
    loglab::visit_tensors(grads, [](std::string_view, double* data,
                                    std::ptrdiff_t size) {
      std::fill(data, data + size, 0.0);
    });
    loglab::encoder_backward(f.batch(), f.params, f.config, cache, z_grad,
                             grads);
    benchmark::DoNotOptimize(grads.embedding.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_TrainStep)->Arg(256)->Arg(1024);

}  // namespace
