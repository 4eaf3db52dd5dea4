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

#pragma once

// Learned approximation of the inverse LNE metric.
//
// A symmetric metric is split into its strict lower triangle P and its
// diagonal A; a small tanh network maps (P, A) of g to (P~, A~), which are
// recombined into g~ and trained to minimize |I - g g~|_F^2.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "lneflow/mlp.hpp"

namespace lneflow {
class RandomStream;
}

namespace lneflow::strong {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// P: n(n-1)/2 strict-lower entries in row-major order (1,0), (2,0), (2,1), ...
/// A: the n diagonal entries.
struct MetricEntries {
  int dim = 0;
  Vector lower;
  Vector diag;

  /// [P; A], the network input/output layout.
  Vector features() const;
  static MetricEntries from_features(int dim, const Vector& f);
};

/// Throws ContractViolation unless m is square and exactly symmetric.
MetricEntries decompose(const Matrix& m);
/// Places P in both triangles and A on the diagonal.
Matrix combine(const MetricEntries& e);

/// |I - g g~|_F^2.
double inverse_loss(const Matrix& g, const Matrix& g_tilde);
/// d inverse_loss / d g~ = -2 g^T (I - g g~).
Matrix inverse_loss_grad(const Matrix& g, const Matrix& g_tilde);

struct MetricSample {
  Matrix metric;         // I - u u^T
  Matrix exact_inverse;  // I + u u^T / (1 - |u|^2)
};

/// lne_metric of random points xi ~ U[-xi_range, xi_range]^n, rejecting those
/// with |tanh(tau xi)|^2 > max_u_norm_sq.
std::vector<MetricSample> sample_metrics(int dim, int count, double tau, double xi_range,
                                         double max_u_norm_sq, RandomStream& rng);

struct InverseApproxConfig {
  int dim = 4;
  double tau = 0.1;
  double xi_range = 3.0;
  double max_u_norm_sq = 0.9;
  int train_samples = 256;
  int heldout_samples = 128;
  int hidden = 64;
  double init_scale = 0.1;
  double learning_rate = 0.2;
  int iterations = 5000;
  int log_every = 100;
  std::uint64_t seed = 0;
  /// Train and evaluate on copies of the identity metric only.
  bool identity_only = false;

  void validate() const;
};

struct ApproxLogRow {
  long long iteration = 0;
  double loss = 0.0;
  double heldout_loss = 0.0;
  double max_dev = 0.0;
};

struct InverseApproxReport {
  double heldout_mean_loss = 0.0;
  /// max over held-out samples of |g~ - exact inverse|_F.
  double max_deviation = 0.0;
  /// Training stopped on a non-finite loss; the net is the last good one.
  bool aborted = false;
  std::vector<ApproxLogRow> log;
};

class InverseApproximator {
 public:
  InverseApproximator(int dim, nn::Mlp net);

  int dim() const { return dim_; }
  const nn::Mlp& net() const { return net_; }
  /// g~ for a batch of metrics.
  std::vector<Matrix> apply(const std::vector<Matrix>& metrics) const;
  Matrix apply(const Matrix& metric) const;

 private:
  int dim_;
  nn::Mlp net_;
};

struct InverseApproxResult {
  InverseApproximator approximator;
  InverseApproxReport report;
};

/// Plain full-batch gradient descent on the mean of inverse_loss.
InverseApproxResult train_inverse_approximator(const std::vector<MetricSample>& train,
                                               const std::vector<MetricSample>& heldout,
                                               const InverseApproxConfig& cfg);

/// Draws train and held-out sets from cfg.seed, then trains.
InverseApproxResult train_inverse_approximator(const InverseApproxConfig& cfg);

}  // namespace lneflow::strong
