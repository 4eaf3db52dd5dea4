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
#include <string>

#include "lneflow/error.hpp"
#include "lneflow/rng.hpp"

namespace lneflow::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_labels(const Matrix& logits, std::span<const int> labels,
                  std::span<const double> weights) {
  require(static_cast<Eigen::Index>(labels.size()) == logits.rows(),
          "label count does not match batch size");
  require(weights.empty() || weights.size() == labels.size(),
          "weight count does not match batch size");
  for (int y : labels)
    require(y >= 0 && y < logits.cols(), "label " + std::to_string(y) + " out of range");
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p = logits;
  for (Eigen::Index s = 0; s < p.rows(); ++s) {
    const double m = p.row(s).maxCoeff();
    p.row(s) = (p.row(s).array() - m).exp();
    p.row(s) /= p.row(s).sum();
  }
  return p;
}

double weight_of(std::span<const double> w, std::size_t s) { return w.empty() ? 1.0 : w[s]; }

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  require(sizes_.size() >= 2, "Mlp: need input and output sizes");
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    require(sizes_[l] > 0 && sizes_[l + 1] > 0, "Mlp: layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_ = Vector::Zero(total);
}

Mlp Mlp::random(std::vector<int> layer_sizes, RandomStream& rng, double scale) {
  Mlp m(std::move(layer_sizes));
  for (std::size_t l = 0; l + 1 < m.sizes_.size(); ++l) {
    const int in = m.sizes_[l], out = m.sizes_[l + 1];
    const double sd = scale / std::sqrt(static_cast<double>(in));
    double* w = m.params_.data() + m.offsets_[l];
    for (int q = 0; q < in * out; ++q) w[q] = rng.normal() * sd;
  }
  return m;
}

void Mlp::set_parameters(const Vector& theta) {
  require(theta.size() == params_.size(), "Mlp: parameter count mismatch");
  require(theta.allFinite(), "Mlp: non-finite parameters");
  params_ = theta;
}

Matrix Mlp::forward(const Matrix& x) const {
  require(x.cols() == input_size(), "Mlp::forward: input width mismatch");
  Matrix a = x;
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const RowMat> w(params_.data() + offsets_[l], out, in);
    Eigen::Map<const Vector> b(params_.data() + offsets_[l] + out * in, out);
    Matrix z = a * w.transpose();
    z.rowwise() += b.transpose();
    a = (l + 1 < layers) ? Matrix(z.array().tanh()) : z;
  }
  return a;
}

Vector Mlp::backward(const Matrix& x, const Matrix& output_grad) const {
  require(x.cols() == input_size(), "Mlp::backward: input width mismatch");
  require(output_grad.rows() == x.rows() && output_grad.cols() == output_size(),
          "Mlp::backward: output gradient shape mismatch");
  const std::size_t layers = sizes_.size() - 1;
  std::vector<Matrix> acts;
  acts.reserve(layers + 1);
  acts.push_back(x);
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const RowMat> w(params_.data() + offsets_[l], out, in);
    Eigen::Map<const Vector> b(params_.data() + offsets_[l] + out * in, out);
    Matrix z = acts.back() * w.transpose();
    z.rowwise() += b.transpose();
    acts.emplace_back(z.array().tanh());
  }

  Vector grad = Vector::Zero(params_.size());
  Matrix delta = output_grad;
  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const RowMat> w(params_.data() + offsets_[l], out, in);
    Eigen::Map<RowMat> gw(grad.data() + offsets_[l], out, in);
    Eigen::Map<Vector> gb(grad.data() + offsets_[l] + out * in, out);
    gw = delta.transpose() * acts[l];
    gb = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * w).cwiseProduct(Matrix((1.0 - acts[l].array().square())));
    }
  }
  return grad;
}

double cross_entropy(const Matrix& logits, std::span<const int> labels,
                     std::span<const double> weights) {
  check_labels(logits, labels, weights);
  double total = 0.0, wsum = 0.0;
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    const double m = logits.row(s).maxCoeff();
    const double lse = m + std::log((logits.row(s).array() - m).exp().sum());
    const double w = weight_of(weights, static_cast<std::size_t>(s));
    total += w * (lse - logits(s, labels[s]));
    wsum += w;
  }
  return total / wsum;
}

Matrix cross_entropy_grad(const Matrix& logits, std::span<const int> labels,
                          std::span<const double> weights) {
  check_labels(logits, labels, weights);
  Matrix g = softmax_rows(logits);
  double wsum = 0.0;
  for (std::size_t s = 0; s < labels.size(); ++s) wsum += weight_of(weights, s);
  for (Eigen::Index s = 0; s < g.rows(); ++s) {
    g(s, labels[s]) -= 1.0;
    g.row(s) *= weight_of(weights, static_cast<std::size_t>(s)) / wsum;
  }
  return g;
}

Matrix mlp_forward(const Mlp& model, const Matrix& batch) { return model.forward(batch); }

Vector mlp_backward(const Mlp& model, const Matrix& batch, std::span<const int> labels,
                    std::span<const double> weights) {
  const Matrix logits = model.forward(batch);
  return model.backward(batch, cross_entropy_grad(logits, labels, weights));
}

double accuracy(const Matrix& logits, std::span<const int> labels) {
  require(static_cast<Eigen::Index>(labels.size()) == logits.rows(),
          "label count does not match batch size");
  if (labels.empty()) return 0.0;
  std::size_t hits = 0;
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    Eigen::Index best;
    logits.row(s).maxCoeff(&best);
    if (best == labels[s]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace lneflow::nn
