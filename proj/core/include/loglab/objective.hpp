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
#include <vector>

namespace loglab {

// Parameters of the positive/unlabeled objective. q is the global class
// ratio |P| / (|P| + |U|); epsilon floors the norm in the U branch so a
// collapsed score cannot blow the division up.
struct LossConfig {
  double q = 0.5;
  double epsilon = 1e-6;

  void validate() const;  // throws InvalidQ / InvalidConfig
};

struct LossResult {
  double loss = 0.0;
  // (1 - y)*|z|^2 + y*q^2/max(|z|, eps) per sample, for diagnostics.
  std::vector<double> per_sample;
};

// Mean over the batch of the per-sample penalties. P samples (y = 0) pay
// |z|^2, pulling trusted-normal scores to zero; U samples (y = 1) pay
// q^2 / |z|, pushing suspect scores away from zero, with the q^2 weight
// compensating for how small U typically is. Columns of z are samples.
// Throws EmptyBatch, ShapeMismatch, NonFiniteInput.
LossResult pu_loss(const Eigen::MatrixXd& z,
                   const std::vector<std::uint8_t>& y_tilde,
                   const LossConfig& config);

// d(loss)/dz per sample: 2 z / m for P, -q^2 z / (m |z|^3) for U. Inside
// the epsilon floor the U branch is constant, so its gradient there is
// zero; both pieces match finite differences of pu_loss.
Eigen::MatrixXd pu_loss_gradient(const Eigen::MatrixXd& z,
                                 const std::vector<std::uint8_t>& y_tilde,
                                 const LossConfig& config);

// Default labeling threshold q^(2/3): the score at which the two penalty
// branches balance, |z|^2 = q^2 / |z|. Throws InvalidQ outside (0, 1).
double decision_threshold(double q);

}  // namespace loglab
