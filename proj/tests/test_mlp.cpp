// Copyright 2026 The lneflow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lneflow/mlp.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lneflow/datasets.hpp"
#include "lneflow/error.hpp"
#include "lneflow/rng.hpp"
#include "test_util.hpp"

namespace lneflow::nn {
namespace {

// log(1 + e^-1), 40-digit mpmath evaluation.
constexpr double kSoftplusMinusOne = 0.31326168751822283405;

Vector central_difference_gradient(const Mlp& model, const Matrix& x, const std::vector<int>& y,
                                   double h) {
  Mlp probe = model;
  Vector theta = model.parameters();
  Vector g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double orig = theta[i];
    theta[i] = orig + h;
    probe.set_parameters(theta);
    const double fp = cross_entropy(mlp_forward(probe, x), y);
    theta[i] = orig - h;
    probe.set_parameters(theta);
    const double fm = cross_entropy(mlp_forward(probe, x), y);
    theta[i] = orig;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

TEST(MlpTest, ParameterLayout) {
  const Mlp m({2, 16, 16, 2});
  EXPECT_EQ(m.parameter_count(), 2 * 16 + 16 + 16 * 16 + 16 + 16 * 2 + 2);
  EXPECT_EQ(m.parameters(), Vector::Zero(m.parameter_count()));
  EXPECT_THROW(Mlp({3}), ContractViolation);
  Mlp copy = m;
  EXPECT_THROW(copy.set_parameters(Vector::Zero(3)), ContractViolation);
  EXPECT_THROW(copy.set_parameters(Vector::Constant(m.parameter_count(), NAN)), ContractViolation);
}

TEST(MlpTest, AffineForwardByHand) {
  Mlp m({2, 2});
  Vector theta(6);
  theta << 1, 0, 0, 1, 0.5, -0.5;  // W = I (row-major), b = (0.5, -0.5)
  m.set_parameters(theta);
  Matrix x(1, 2);
  x << 1, 2;
  const Matrix y = m.forward(x);
  EXPECT_DOUBLE_EQ(y(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(y(0, 1), 1.5);
}

TEST(MlpTest, RowMajorWeights) {
  Mlp m({2, 1});
  Vector theta(3);
  theta << 2, 3, 0;
  m.set_parameters(theta);
  Matrix x(1, 2);
  x << 1, 10;
  EXPECT_DOUBLE_EQ(m.forward(x)(0, 0), 32.0);
}

TEST(CrossEntropyTest, TwoClassClosedForm) {
  Matrix logits(1, 2);
  logits << 1, 2;
  const std::vector<int> label0 = {0}, label1 = {1};
  EXPECT_NEAR(cross_entropy(logits, label1), kSoftplusMinusOne, 1e-15);
  EXPECT_NEAR(cross_entropy(logits, label0), 1 + kSoftplusMinusOne, 1e-15);
  const Matrix g = cross_entropy_grad(logits, label1);
  const double p1 = 1 / (1 + std::exp(-1.0));
  EXPECT_NEAR(g(0, 0), 1 - p1, 1e-15);
  EXPECT_NEAR(g(0, 1), p1 - 1, 1e-15);
}

TEST(CrossEntropyTest, ExtremeLogitsStayFinite) {
  Matrix logits(2, 2);
  logits << 1000, -1000, -1000, 1000;
  const std::vector<int> y = {1, 1};
  const double l = cross_entropy(logits, y);
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_NEAR(l, 1000.0, 1e-9);
  EXPECT_TRUE(cross_entropy_grad(logits, y).allFinite());
}

TEST(CrossEntropyTest, WeightsEquivalentToDuplicatedRows) {
  RandomStream rng(1);
  Matrix logits(3, 2), dup(5, 2);
  for (auto& v : logits.reshaped()) v = rng.normal();
  dup << logits.row(0), logits.row(0), logits.row(1), logits.row(2), logits.row(2);
  const std::vector<int> y = {0, 1, 1}, ydup = {0, 0, 1, 1, 1};
  const std::vector<double> w = {2, 1, 2};
  EXPECT_NEAR(cross_entropy(logits, y, w), cross_entropy(dup, ydup), 1e-15);

  const Mlp m = Mlp::random({2, 4, 2}, rng);
  Matrix x(3, 2), xdup(5, 2);
  for (auto& v : x.reshaped()) v = rng.normal();
  xdup << x.row(0), x.row(0), x.row(1), x.row(2), x.row(2);
  EXPECT_LT((mlp_backward(m, x, y, w) - mlp_backward(m, xdup, ydup)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MlpBackwardTest, MatchesCentralDifferences) {
  RandomStream rng(2);
  for (const std::vector<int>& sizes : {std::vector<int>{2, 4, 2}, std::vector<int>{2, 5, 3, 2}}) {
    const Mlp m = Mlp::random(sizes, rng);
    Matrix x(10, 2);
    for (auto& v : x.reshaped()) v = rng.normal();
    std::vector<int> y(10);
    for (int i = 0; i < 10; ++i) y[i] = i % 2;
    const Vector analytic = mlp_backward(m, x, y);
    const Vector fd = central_difference_gradient(m, x, y, 1e-6);
    EXPECT_LT((analytic - fd).norm() / analytic.norm(), 1e-5);
  }
}

TEST(MlpBackwardTest, OutputGradientContract) {
  // backward(x, dy) is the gradient of <dy, forward(x)>: check linearity in dy.
  RandomStream rng(3);
  const Mlp m = Mlp::random({2, 3, 2}, rng);
  Matrix x(4, 2), dy1(4, 2), dy2(4, 2);
  for (auto& v : x.reshaped()) v = rng.normal();
  for (auto& v : dy1.reshaped()) v = rng.normal();
  for (auto& v : dy2.reshaped()) v = rng.normal();
  const Vector combined = m.backward(x, 2.0 * dy1 + dy2);
  EXPECT_LT((combined - 2.0 * m.backward(x, dy1) - m.backward(x, dy2)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(AccuracyTest, ArgMax) {
  Matrix logits(4, 2);
  logits << 1, 0, 0, 1, 2, 3, 5, -1;
  const std::vector<int> y = {0, 1, 0, 0};
  EXPECT_DOUBLE_EQ(accuracy(logits, y), 0.75);
}

TEST(DatasetTest, BlobsShapeBalanceAndSeed) {
  const data::Split a = data::make_blobs(7);
  EXPECT_EQ(a.train.x.rows(), 500);
  EXPECT_EQ(a.test.x.rows(), 200);
  EXPECT_EQ(a.train.x.cols(), 2);
  int ones = 0;
  Eigen::Vector2d mean1 = Eigen::Vector2d::Zero();
  for (int i = 0; i < 500; ++i) {
    ones += a.train.y[i];
    if (a.train.y[i] == 1) mean1 += a.train.x.row(i).transpose();
  }
  EXPECT_EQ(ones, 250);
  mean1 /= ones;
  EXPECT_NEAR(mean1[0], 1.5, 0.25);
  EXPECT_NEAR(mean1[1], 1.5, 0.25);
  EXPECT_EQ(data::make_blobs(7).train.x, a.train.x);
  EXPECT_NE(data::make_blobs(8).train.x, a.train.x);
}

TEST(DatasetTest, MoonsAndNames) {
  const data::Split m = data::make_dataset(data::DatasetId::kMoons, 3, 100, 50);
  EXPECT_EQ(m.train.x.rows(), 100);
  EXPECT_EQ(m.test.y.size(), 50u);
  EXPECT_EQ(data::dataset_from_string("moons"), data::DatasetId::kMoons);
  EXPECT_EQ(data::to_string(data::DatasetId::kBlobs), "blobs");
  EXPECT_THROW(data::dataset_from_string("spirals"), ContractViolation);
}

}  // namespace
}  // namespace lneflow::nn
