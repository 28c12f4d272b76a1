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

#include <cmath>

#include "loglab/errors.hpp"
#include "loglab/objective.hpp"
#include "loglab/rng.hpp"
#include "oracles.hpp"

using namespace loglab;

TEST_SUITE("objective") {

TEST_CASE("loss arithmetic matches the closed form") {
  // P sample at the origin pays nothing
  Eigen::MatrixXd z0 = Eigen::MatrixXd::Zero(4, 1);
  CHECK(pu_loss(z0, {0}, {0.5, 1e-6}).loss == 0.0);

  // single U sample: q^2 / |z| = 0.25 / 0.5
  Eigen::MatrixXd z1(2, 1);
  z1 << 0.5, 0.0;
  CHECK(pu_loss(z1, {1}, {0.5, 1e-6}).loss == 0.5);

  // mixed batch: (|z_P|^2 + q^2/|z_U|) / 2 = (4 + 0.25) / 2
  Eigen::MatrixXd z2(2, 2);
  z2 << 2.0, 1.0, 0.0, 0.0;
  const auto result = pu_loss(z2, {0, 1}, {0.5, 1e-6});
  CHECK(result.loss == 2.125);
  CHECK(result.per_sample[0] == 4.0);
  CHECK(result.per_sample[1] == 0.25);
}

TEST_CASE("loss input validation") {
  Eigen::MatrixXd z(2, 1);
  z << 1.0, 0.0;
  CHECK_THROWS_AS(pu_loss(Eigen::MatrixXd(2, 0), {}, {0.5, 1e-6}), EmptyBatch);
  CHECK_THROWS_AS(pu_loss(z, {0, 1}, {0.5, 1e-6}), ShapeMismatch);
  CHECK_THROWS_AS(pu_loss(z, {0}, {1.0, 1e-6}), InvalidQ);
  CHECK_THROWS_AS(pu_loss(z, {0}, {0.0, 1e-6}), InvalidQ);
  CHECK_THROWS_AS(pu_loss(z, {0}, {0.5, 0.0}), InvalidConfig);
  Eigen::MatrixXd bad(2, 1);
  bad << std::numeric_limits<double>::quiet_NaN(), 0.0;
  CHECK_THROWS_AS(pu_loss(bad, {0}, {0.5, 1e-6}), NonFiniteInput);
}

TEST_CASE("gradient closed forms") {
  Eigen::MatrixXd z(2, 1);
  z << 1.0, 0.0;
  const auto g = pu_loss_gradient(z, {0}, {0.5, 1e-6});
  CHECK(g(0, 0) == 2.0);
  CHECK(g(1, 0) == 0.0);

  // P gradient vanishes at the origin and is linear in z
  CHECK(pu_loss_gradient(Eigen::MatrixXd::Zero(3, 1), {0}, {0.5, 1e-6})
            .isZero(0.0));
  Eigen::MatrixXd z2 = 2.0 * z;
  CHECK(pu_loss_gradient(z2, {0}, {0.5, 1e-6}) ==
        2.0 * pu_loss_gradient(z, {0}, {0.5, 1e-6}));

  // U branch: -q^2 z / |z|^3
  Eigen::MatrixXd zu(2, 1);
  zu << 2.0, 0.0;
  const auto gu = pu_loss_gradient(zu, {1}, {0.5, 1e-6});
  CHECK(gu(0, 0) == doctest::Approx(-0.25 * 2.0 / 8.0));
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(99);
  const LossConfig config{0.7, 1e-6};
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::MatrixXd z(4, 3);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z.data()[i] = rng.uniform(-2.0, 2.0);
    }
    const std::vector<std::uint8_t> y = {0, 1,
                                         static_cast<std::uint8_t>(trial % 2)};
    const Eigen::MatrixXd analytic = pu_loss_gradient(z, y, config);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double numeric = testing::central_difference(
          [&] { return pu_loss(z, y, config).loss; }, z.data() + i, 1e-5);
      CHECK(std::abs(numeric - analytic.data()[i]) < 1e-6);
    }
  }
}

TEST_CASE("the floored U branch is flat") {
  const LossConfig config{0.5, 1e-6};
  Eigen::MatrixXd z(3, 1);
  z << 1e-9, -2e-9, 0.0;
  CHECK(pu_loss(z, {1}, config).loss == 0.25 / 1e-6);
  CHECK(pu_loss_gradient(z, {1}, config).isZero(0.0));
}

TEST_CASE("branch monotonicity and non-negativity") {
  const LossConfig config{0.6, 1e-6};
  Rng rng(4);
  double prev_a = -1.0, prev_b = std::numeric_limits<double>::infinity();
  for (double norm : {0.01, 0.1, 0.5, 1.0, 2.0, 8.0}) {
    Eigen::MatrixXd z(3, 1);
    z << norm, 0.0, 0.0;
    const double a = pu_loss(z, {0}, config).loss;
    const double b = pu_loss(z, {1}, config).loss;
    CHECK(a >= 0.0);
    CHECK(b >= 0.0);
    CHECK(a > prev_a);
    CHECK(b < prev_b);
    prev_a = a;
    prev_b = b;
  }
  // the U penalty scales as q^2 for fixed z
  Eigen::MatrixXd z(2, 1);
  z << 1.5, 0.0;
  const double b1 = pu_loss(z, {1}, {0.3, 1e-6}).loss;
  const double b2 = pu_loss(z, {1}, {0.9, 1e-6}).loss;
  CHECK(b2 / b1 == doctest::Approx(9.0));
  (void)rng;
}

TEST_CASE("decision threshold balances the branches") {
  CHECK(decision_threshold(0.5) == doctest::Approx(0.6300).epsilon(1e-4));
  // q from the 4.75M-corpus example
  CHECK(decision_threshold(0.9178) == doctest::Approx(0.9443).epsilon(1e-3));
  CHECK(decision_threshold(0.999999) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(decision_threshold(0.0), InvalidQ);
  CHECK_THROWS_AS(decision_threshold(1.0), InvalidQ);
  CHECK_THROWS_AS(decision_threshold(-0.5), InvalidQ);

  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double q = rng.uniform(1e-6, 1.0 - 1e-6);
    const double t = decision_threshold(q);
    const double a = t * t;
    const double b = q * q / t;
    CHECK(std::abs(a - b) < 1e-12);
  }
}

}  // TEST_SUITE
