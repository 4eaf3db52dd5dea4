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
#include <string>

#include "lneflow/error.hpp"
#include "lneflow/lne_geometry.hpp"
#include "lneflow/rng.hpp"

namespace lneflow::strong {

namespace {

int feature_count(int n) { return n * (n + 1) / 2; }

// Network input: (P, A - 1), the entries of g - I. Centring the diagonal
// keeps the tanh layer out of saturation; it is an affine reparameterization
// of the first layer, not a different model.
Matrix input_features(const std::vector<Matrix>& metrics, int n) {
  Matrix x(static_cast<Eigen::Index>(metrics.size()), feature_count(n));
  for (std::size_t s = 0; s < metrics.size(); ++s) {
    Vector f = decompose(metrics[s]).features();
    f.tail(n).array() -= 1.0;
    x.row(static_cast<Eigen::Index>(s)) = f.transpose();
  }
  return x;
}

Matrix features_of(const std::vector<MetricSample>& samples, int n) {
  std::vector<Matrix> metrics;
  metrics.reserve(samples.size());
  for (const auto& s : samples) metrics.push_back(s.metric);
  return input_features(metrics, n);
}

// Per-sample losses of the network output `y` (one feature row per sample),
// and optionally dL/dy for the mean loss.
double evaluate(const std::vector<MetricSample>& samples, const Matrix& y, int n,
                Matrix* dy, std::vector<double>* losses = nullptr) {
  const auto m = static_cast<double>(samples.size());
  double total = 0.0;
  if (dy) dy->resize(y.rows(), y.cols());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto row = static_cast<Eigen::Index>(s);
    const Matrix g_tilde = combine(MetricEntries::from_features(n, y.row(row).transpose()));
    const double l = inverse_loss(samples[s].metric, g_tilde);
    total += l;
    if (losses) losses->push_back(l);
    if (dy) {
      const Matrix gm = inverse_loss_grad(samples[s].metric, g_tilde);
      Eigen::Index q = 0;
      for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) (*dy)(row, q++) = (gm(i, j) + gm(j, i)) / m;
      for (int i = 0; i < n; ++i) (*dy)(row, q++) = gm(i, i) / m;
    }
  }
  return total / m;
}

}  // namespace

Vector MetricEntries::features() const {
  Vector f(lower.size() + diag.size());
  f << lower, diag;
  return f;
}

MetricEntries MetricEntries::from_features(int dim, const Vector& f) {
  require(f.size() == feature_count(dim), "MetricEntries: feature length mismatch");
  const Eigen::Index np = dim * (dim - 1) / 2;
  return {dim, f.head(np), f.tail(dim)};
}

MetricEntries decompose(const Matrix& m) {
  require(m.rows() == m.cols() && m.rows() >= 1, "decompose: matrix must be square");
  const int n = static_cast<int>(m.rows());
  MetricEntries e{n, Vector(n * (n - 1) / 2), m.diagonal()};
  Eigen::Index q = 0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      require(m(i, j) == m(j, i), "decompose: matrix is not symmetric at (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")");
      e.lower[q++] = m(i, j);
    }
  return e;
}

Matrix combine(const MetricEntries& e) {
  const int n = e.dim;
  require(e.diag.size() == n && e.lower.size() == n * (n - 1) / 2,
          "combine: entry counts do not match dimension");
  Matrix m(n, n);
  m.diagonal() = e.diag;
  Eigen::Index q = 0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      m(i, j) = e.lower[q];
      m(j, i) = e.lower[q];
      ++q;
    }
  return m;
}

double inverse_loss(const Matrix& g, const Matrix& g_tilde) {
  require(g.rows() == g.cols() && g_tilde.rows() == g.rows() && g_tilde.cols() == g.cols(),
          "inverse_loss: dimension mismatch");
  return (Matrix::Identity(g.rows(), g.cols()) - g * g_tilde).squaredNorm();
}

Matrix inverse_loss_grad(const Matrix& g, const Matrix& g_tilde) {
  require(g.rows() == g.cols() && g_tilde.rows() == g.rows() && g_tilde.cols() == g.cols(),
          "inverse_loss_grad: dimension mismatch");
  return -2.0 * g.transpose() * (Matrix::Identity(g.rows(), g.cols()) - g * g_tilde);
}

std::vector<MetricSample> sample_metrics(int dim, int count, double tau, double xi_range,
                                         double max_u_norm_sq, RandomStream& rng) {
  require(dim >= 1 && count >= 0, "sample_metrics: invalid sizes");
  require(max_u_norm_sq < 1.0, "sample_metrics: max |u|^2 must be < 1");
  std::vector<MetricSample> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    Vector xi(dim);
    for (auto& v : xi) v = rng.uniform(-xi_range, xi_range);
    const auto m = geometry::lne_metric(geometry::CoordPoint(xi, tau));
    const double un = m.u_norm_sq();
    if (un > max_u_norm_sq) continue;
    Matrix inv = m.u() * m.u().transpose() / (1.0 - un);
    inv.diagonal().array() += 1.0;
    out.push_back({m.dense(), inv});
  }
  return out;
}

void InverseApproxConfig::validate() const {
  require(dim >= 1 && dim <= 8, "inverse-approx: dim must be in [1, 8]");
  require(tau > 0.0, "inverse-approx: tau must be positive");
  require(xi_range > 0.0, "inverse-approx: xi_range must be positive");
  require(max_u_norm_sq > 0.0 && max_u_norm_sq <= 0.9,
          "inverse-approx: max_u_norm_sq must be in (0, 0.9]");
  require(train_samples >= 1 && heldout_samples >= 1,
          "inverse-approx: sample counts must be >= 1");
  require(hidden >= 1, "inverse-approx: hidden must be >= 1");
  require(init_scale > 0.0, "inverse-approx: init_scale must be positive");
  require(learning_rate > 0.0, "inverse-approx: learning_rate must be positive");
  require(iterations >= 1, "inverse-approx: iterations must be >= 1");
  require(log_every >= 1, "inverse-approx: log_every must be >= 1");
}

InverseApproximator::InverseApproximator(int dim, nn::Mlp net) : dim_(dim), net_(std::move(net)) {
  require(net_.input_size() == feature_count(dim) && net_.output_size() == feature_count(dim),
          "InverseApproximator: network size does not match dimension");
}

std::vector<Matrix> InverseApproximator::apply(const std::vector<Matrix>& metrics) const {
  for (const auto& m : metrics)
    require(m.rows() == dim_ && m.cols() == dim_, "InverseApproximator: dimension mismatch");
  const Matrix y = net_.forward(input_features(metrics, dim_));
  std::vector<Matrix> out;
  for (Eigen::Index s = 0; s < y.rows(); ++s)
    out.push_back(combine(MetricEntries::from_features(dim_, y.row(s).transpose())));
  return out;
}

Matrix InverseApproximator::apply(const Matrix& metric) const {
  return apply(std::vector<Matrix>{metric}).front();
}

InverseApproxResult train_inverse_approximator(const std::vector<MetricSample>& train,
                                               const std::vector<MetricSample>& heldout,
                                               const InverseApproxConfig& cfg) {
  cfg.validate();
  require(!train.empty() && !heldout.empty(), "train_inverse_approximator: empty sample set");
  const int n = cfg.dim;
  const int f = feature_count(n);
  for (const auto* set : {&train, &heldout})
    for (const auto& s : *set)
      require(s.metric.rows() == n && s.metric.cols() == n,
              "train_inverse_approximator: sample dimension mismatch");

  RandomStream rng = RandomStream::derive(cfg.seed, "strong.init");
  nn::Mlp net({f, cfg.hidden, f});
  {
    // Weights ~ N(0, init_scale^2), biases zero.
    Vector theta = net.parameters();
    Eigen::Index q = 0;
    for (int l = 0; l < 2; ++l) {
      const int in = l == 0 ? f : cfg.hidden;
      const int out = l == 0 ? cfg.hidden : f;
      for (int w = 0; w < in * out; ++w) theta[q++] = rng.normal() * cfg.init_scale;
      q += out;
    }
    net.set_parameters(theta);
  }

  const Matrix x_train = features_of(train, n);
  const Matrix x_held = features_of(heldout, n);

  auto heldout_metrics = [&](const nn::Mlp& model) {
    const Matrix y = model.forward(x_held);
    const double loss = evaluate(heldout, y, n, nullptr);
    double max_dev = 0.0;
    for (std::size_t s = 0; s < heldout.size(); ++s) {
      const Matrix gt = combine(
          MetricEntries::from_features(n, y.row(static_cast<Eigen::Index>(s)).transpose()));
      max_dev = std::max(max_dev, (gt - heldout[s].exact_inverse).norm());
    }
    return std::pair{loss, max_dev};
  };

  InverseApproxReport report;
  nn::Mlp last_good = net;
  Matrix dy;
  for (long long it = 0; it <= cfg.iterations; ++it) {
    const Matrix y = net.forward(x_train);
    const double loss = evaluate(train, y, n, &dy);
    if (!std::isfinite(loss) || !dy.allFinite()) {
      report.aborted = true;
      net = last_good;
      break;
    }
    last_good = net;
    if (it % cfg.log_every == 0 || it == cfg.iterations) {
      const auto [hl, md] = heldout_metrics(net);
      report.log.push_back({it, loss, hl, md});
    }
    if (it == cfg.iterations) break;
    const Vector grad = net.backward(x_train, dy);
    const Vector next = net.parameters() - cfg.learning_rate * grad;
    if (!next.allFinite()) {
      report.aborted = true;
      break;
    }
    net.set_parameters(next);
  }

  const auto [hl, md] = heldout_metrics(net);
  report.heldout_mean_loss = hl;
  report.max_deviation = md;
  return {InverseApproximator(n, std::move(net)), std::move(report)};
}

InverseApproxResult train_inverse_approximator(const InverseApproxConfig& cfg) {
  cfg.validate();
  std::vector<MetricSample> train, heldout;
  if (cfg.identity_only) {
    const Matrix id = Matrix::Identity(cfg.dim, cfg.dim);
    train.assign(static_cast<std::size_t>(cfg.train_samples), {id, id});
    heldout.assign(static_cast<std::size_t>(cfg.heldout_samples), {id, id});
  } else {
    RandomStream train_rng = RandomStream::derive(cfg.seed, "strong.train_samples");
    RandomStream held_rng = RandomStream::derive(cfg.seed, "strong.heldout_samples");
    train = sample_metrics(cfg.dim, cfg.train_samples, cfg.tau, cfg.xi_range,
                           cfg.max_u_norm_sq, train_rng);
    heldout = sample_metrics(cfg.dim, cfg.heldout_samples, cfg.tau, cfg.xi_range,
                             cfg.max_u_norm_sq, held_rng);
  }
  return train_inverse_approximator(train, heldout, cfg);
}

}  // namespace lneflow::strong
