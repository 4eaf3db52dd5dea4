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

#include <span>
#include <vector>

#include <Eigen/Core>

namespace lneflow {
class RandomStream;
}

namespace lneflow::nn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Fully connected network with tanh hidden layers and an affine output.
///
/// All weights and biases live in one flat parameter vector. Layer l
/// contributes its weight matrix (out x in, row-major) followed by its bias.
/// Batches are row-major in the sense that each row of the input is a sample.
class Mlp {
 public:
  /// Zero-initialized. Needs at least an input and an output size.
  explicit Mlp(std::vector<int> layer_sizes);

  /// Weights ~ N(0, (scale^2) / fan_in), biases zero.
  static Mlp random(std::vector<int> layer_sizes, RandomStream& rng, double scale = 1.0);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  Eigen::Index parameter_count() const { return params_.size(); }

  const Vector& parameters() const { return params_; }
  /// Throws ContractViolation on size mismatch or non-finite entries.
  void set_parameters(const Vector& theta);

  Matrix forward(const Matrix& x) const;

  /// Gradient with respect to the parameters of sum_{s,o} dy(s,o) y(s,o),
  /// where y = forward(x). `output_grad` is dL/dy for the caller's loss.
  Vector backward(const Matrix& x, const Matrix& output_grad) const;

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;
  Vector params_;
};

/// Mean softmax cross-entropy, optionally sample-weighted
/// (sum_s w_s l_s / sum_s w_s).
double cross_entropy(const Matrix& logits, std::span<const int> labels,
                     std::span<const double> weights = {});
/// d cross_entropy / d logits.
Matrix cross_entropy_grad(const Matrix& logits, std::span<const int> labels,
                          std::span<const double> weights = {});

/// Predicted logits for a batch.
Matrix mlp_forward(const Mlp& model, const Matrix& batch);
/// Gradient of the (weighted) mean cross-entropy over the batch.
Vector mlp_backward(const Mlp& model, const Matrix& batch, std::span<const int> labels,
                    std::span<const double> weights = {});

/// Fraction of rows whose arg-max logit equals the label.
double accuracy(const Matrix& logits, std::span<const int> labels);

}  // namespace lneflow::nn
