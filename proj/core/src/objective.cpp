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

#include "loglab/objective.hpp"

#include <cmath>

#include "loglab/errors.hpp"

namespace loglab {

void LossConfig::validate() const {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw InvalidQ("q must lie in (0,1), got " + std::to_string(q));
  }
  if (!(epsilon > 0.0)) {
    throw InvalidConfig("epsilon must be positive");
  }
}

namespace {

void check_batch(const Eigen::MatrixXd& z,
                 const std::vector<std::uint8_t>& y_tilde,
                 const LossConfig& config) {
  config.validate();
  if (z.cols() == 0) throw EmptyBatch("empty loss batch");
  if (static_cast<std::size_t>(z.cols()) != y_tilde.size()) {
    throw ShapeMismatch("z has " + std::to_string(z.cols()) +
                        " samples but y has " + std::to_string(y_tilde.size()));
  }
  if (!z.allFinite()) throw NonFiniteInput("non-finite entries in z batch");
}

}  // namespace

LossResult pu_loss(const Eigen::MatrixXd& z,
                   const std::vector<std::uint8_t>& y_tilde,
                   const LossConfig& config) {
  check_batch(z, y_tilde, config);
  const std::size_t m = y_tilde.size();
  const double q_sq = config.q * config.q;

  LossResult result;
  result.per_sample.resize(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double norm = z.col(i).norm();
    const double term = y_tilde[i] == 0
                            ? norm * norm
                            : q_sq / std::max(norm, config.epsilon);
    result.per_sample[i] = term;
    total += term;
  }
  result.loss = total / static_cast<double>(m);
  return result;
}

Eigen::MatrixXd pu_loss_gradient(const Eigen::MatrixXd& z,
                                 const std::vector<std::uint8_t>& y_tilde,
                                 const LossConfig& config) {
  check_batch(z, y_tilde, config);
  const std::size_t m = y_tilde.size();
  const double q_sq = config.q * config.q;
  const double inv_m = 1.0 / static_cast<double>(m);

  Eigen::MatrixXd grad(z.rows(), z.cols());
  for (std::size_t i = 0; i < m; ++i) {
    const double norm = z.col(i).norm();
    if (y_tilde[i] == 0) {
      grad.col(i) = (2.0 * inv_m) * z.col(i);
    } else if (norm > config.epsilon) {
      grad.col(i) = (-q_sq * inv_m / (norm * norm * norm)) * z.col(i);
    } else {
      // Inside the floor the penalty is the constant q^2/epsilon.
      grad.col(i).setZero();
    }
  }
  return grad;
}

double decision_threshold(double q) {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw InvalidQ("q must lie in (0,1), got " + std::to_string(q));
  }
  return std::cbrt(q * q);
}

}  // namespace loglab
