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

#include "lneflow/strong_approx.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "lneflow/error.hpp"
#include "lneflow/rng.hpp"

namespace lneflow::strong {
namespace {

TEST(DecomposeTest, LayoutAndRoundTrip) {
  Matrix m(3, 3);
  m << 1, 2, 4, 2, 3, 5, 4, 5, 6;
  const MetricEntries e = decompose(m);
  ASSERT_EQ(e.lower.size(), 3);
  EXPECT_EQ(e.lower, Eigen::Vector3d(2, 4, 5));
  EXPECT_EQ(e.diag, Eigen::Vector3d(1, 3, 6));
  EXPECT_EQ(combine(e), m);
  const Vector f = e.features();
  ASSERT_EQ(f.size(), 6);
  EXPECT_EQ(combine(MetricEntries::from_features(3, f)), m);
}

TEST(DecomposeTest, RejectsNonSymmetric) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = 1e-16;
  EXPECT_THROW(decompose(m), ContractViolation);
  EXPECT_THROW(decompose(Matrix::Identity(2, 3)), ContractViolation);
}

TEST(InverseLossTest, Examples) {
  const Matrix i3 = Matrix::Identity(3, 3);
  EXPECT_DOUBLE_EQ(inverse_loss(i3, 2 * i3), 3.0);
  EXPECT_EQ(inverse_loss(i3, i3), 0.0);
  Matrix g(2, 2);
  g << 2, 1, 1, 2;
  EXPECT_LT(inverse_loss(g, g.inverse()), 1e-30);
}

TEST(InverseLossTest, GradientMatchesCentralDifferences) {
  RandomStream rng(1);
  Matrix g(3, 3), gt(3, 3);
  for (auto& v : g.reshaped()) v = rng.normal();
  for (auto& v : gt.reshaped()) v = rng.normal();
  const Matrix analytic = inverse_loss_grad(g, gt);
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Matrix p = gt, m = gt;
      p(i, j) += h;
      m(i, j) -= h;
      const double fd = (inverse_loss(g, p) - inverse_loss(g, m)) / (2 * h);
      EXPECT_NEAR(analytic(i, j), fd, 1e-6 * (1 + std::abs(fd)));
    }
}

TEST(SampleMetricsTest, ExactInverseAndRejection) {
  RandomStream rng(2);
  const auto samples = sample_metrics(4, 50, 0.3, 3.0, 0.5, rng);
  ASSERT_EQ(samples.size(), 50u);
  for (const auto& s : samples) {
    EXPECT_LT((s.metric * s.exact_inverse - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-13);
    // 1 - |u|^2 is the smallest eigenvalue.
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.metric);
    EXPECT_GE(es.eigenvalues()[0], 0.5 - 1e-12);
  }
}

TEST(InverseApproxConfigTest, Validation) {
  InverseApproxConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.dim = 0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg.dim = 9;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = InverseApproxConfig{};
  cfg.max_u_norm_sq = 1.0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(InverseApproximatorTest, MemorizesIdentity) {
  InverseApproxConfig cfg;
  cfg.identity_only = true;
  cfg.iterations = 2000;
  cfg.seed = 3;
  const InverseApproxResult r = train_inverse_approximator(cfg);
  EXPECT_FALSE(r.report.aborted);
  EXPECT_LT(r.report.heldout_mean_loss, 1e-12);
  const Matrix out = r.approximator.apply(Matrix::Identity(4, 4));
  EXPECT_LT((out - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(InverseApproximatorTest, TrainingReducesLossAndIsSeeded) {
  InverseApproxConfig cfg;
  cfg.dim = 3;
  cfg.train_samples = 64;
  cfg.heldout_samples = 32;
  cfg.hidden = 16;
  cfg.iterations = 300;
  cfg.log_every = 100;
  cfg.seed = 4;
  const InverseApproxResult a = train_inverse_approximator(cfg);
  const InverseApproxResult b = train_inverse_approximator(cfg);
  ASSERT_GE(a.report.log.size(), 2u);
  EXPECT_LT(a.report.log.back().loss, a.report.log.front().loss);
  EXPECT_EQ(a.approximator.net().parameters(), b.approximator.net().parameters());
  EXPECT_EQ(a.report.heldout_mean_loss, b.report.heldout_mean_loss);
}

TEST(InverseApproximatorTest, DeviationIsBracketedByLoss) {
  // I - g g~ = g (g^-1 - g~), so |g~ - g^-1|_F lies between sqrt(loss) and
  // sqrt(loss) / lambda_min(g) with lambda_max(g) = 1.
  InverseApproxConfig cfg;
  cfg.dim = 3;
  cfg.train_samples = 64;
  cfg.heldout_samples = 32;
  cfg.hidden = 16;
  cfg.iterations = 200;
  cfg.seed = 5;
  RandomStream rng(6);
  const auto train = sample_metrics(3, 64, cfg.tau, cfg.xi_range, cfg.max_u_norm_sq, rng);
  const auto heldout = sample_metrics(3, 32, cfg.tau, cfg.xi_range, cfg.max_u_norm_sq, rng);
  const InverseApproxResult r = train_inverse_approximator(train, heldout, cfg);
  for (const auto& s : heldout) {
    const Matrix gt = r.approximator.apply(s.metric);
    const double root = std::sqrt(inverse_loss(s.metric, gt));
    const double dev = (gt - s.exact_inverse).norm();
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.metric);
    EXPECT_GE(dev, root * (1 - 1e-9));
    EXPECT_LE(dev, root / es.eigenvalues()[0] * (1 + 1e-9));
  }
}

}  // namespace
}  // namespace lneflow::strong
