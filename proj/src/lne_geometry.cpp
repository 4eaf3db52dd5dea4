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

#include "lneflow/lne_geometry.hpp"

#include <cmath>
#include <string>

#include "lneflow/error.hpp"

namespace lneflow::geometry {

CoordPoint::CoordPoint(Vector xi, double tau) : xi_(std::move(xi)), tau_(tau) {
  require(xi_.size() >= 1, "CoordPoint: dimension must be >= 1");
  require(tau_ > 0.0 && std::isfinite(tau_), "CoordPoint: tau must be positive");
  require(xi_.allFinite(), "CoordPoint: xi must be finite");
}

LneMetric::LneMetric(Vector u) : u_(std::move(u)) {
  require(u_.size() >= 1, "LneMetric: dimension must be >= 1");
  require((u_.array().abs() < 1.0).all(), "LneMetric: |u_i| must be < 1");
}

Matrix LneMetric::dense() const {
  Matrix g = -u_ * u_.transpose();
  g.diagonal().array() += 1.0;
  return g;
}

double log_cosh(double x) {
  const double a = std::abs(x);
  if (a > 20.0) {
    // cosh(a) = e^a (1 + e^{-2a}) / 2
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
  }
  return std::log(std::cosh(a));
}

double potential(const CoordPoint& p) {
  const double tau = p.tau();
  double sum = 0.0;
  for (double x : p.xi()) sum += log_cosh(tau * x);
  return sum / (tau * tau);
}

namespace {

void require_compatible(const CoordPoint& a, const CoordPoint& b) {
  require(a.dim() == b.dim(), "dimension mismatch: " + std::to_string(a.dim()) +
                                  " vs " + std::to_string(b.dim()));
  require(a.tau() == b.tau(), "tau mismatch between points");
}

void require_length(Eigen::Index n, const Vector& v) {
  require(v.size() == n, "vector length " + std::to_string(v.size()) +
                             " does not match dimension " + std::to_string(n));
}

// One coordinate of the divergence with a = tau xi, a' = a + d:
//   log(cosh(a') / cosh(a)) - d tanh(a).
// For moderate |d| the log ratio is written as
//   log(cosh d + tanh(a) sinh d) = log1p(2 sinh^2(d/2) + tanh(a) sinh d),
// which avoids differencing two large log-cosh values.
double divergence_term(double a, double a_prime) {
  const double d = a_prime - a;
  const double t = std::tanh(a);
  if (std::abs(d) < 1.0) {
    const double sh = std::sinh(0.5 * d);
    return std::log1p(2.0 * sh * sh + t * std::sinh(d)) - d * t;
  }
  return log_cosh(a_prime) - log_cosh(a) - d * t;
}

}  // namespace

double divergence(const CoordPoint& p_prime, const CoordPoint& p) {
  require_compatible(p_prime, p);
  const double tau = p.tau();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.dim(); ++i) {
    sum += divergence_term(tau * p.xi()[i], tau * p_prime.xi()[i]);
  }
  return sum / (tau * tau);
}

LneMetric lne_metric(const CoordPoint& p) {
  return LneMetric((p.tau() * p.xi().array()).tanh().matrix());
}

Vector metric_apply(const LneMetric& m, const Vector& v) {
  require_length(m.dim(), v);
  return v - m.u() * m.u().dot(v);
}

Vector natural_grad_exact(const CoordPoint& p, const Vector& grad,
                          DomainGuard guard) {
  require_length(p.dim(), grad);
  const LneMetric m = lne_metric(p);
  const double schur = 1.0 - m.u_norm_sq();
  if (!(schur >= guard.eps_guard)) {
    throw NotPositiveDefinite("1 - |tanh(tau xi)|^2 = " + std::to_string(schur) +
                              " is below the guard " +
                              std::to_string(guard.eps_guard));
  }
  return grad + m.u() * (m.u().dot(grad) / schur);
}

Vector natural_grad_weak(const CoordPoint& p, const Vector& grad) {
  require_length(p.dim(), grad);
  const LneMetric m = lne_metric(p);
  return grad + m.u() * m.u().dot(grad);
}

bool is_strictly_diag_dominant(const LneMetric& m) {
  const Vector& u = m.u();
  const double abs_sum = u.cwiseAbs().sum();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double ui = std::abs(u[i]);
    const double off = ui * (abs_sum - ui);
    if (!(std::abs(1.0 - ui * ui) > off)) return false;
  }
  return true;
}

double ball_radius(const LneMetric& m, const Vector& dxi) {
  require_length(m.dim(), dxi);
  require(dxi.squaredNorm() > 0.0, "ball_radius: probe direction must be non-zero");
  // The form is indefinite along u once |u| > 1; the radius is clamped at 0.
  const double proj = m.u().dot(dxi);
  const double q = dxi.squaredNorm() - proj * proj;
  return std::sqrt(std::max(q, 0.0));
}

Matrix hessian_fd(const CoordPoint& p, double step) {
  require(step > 0.0, "hessian_fd: step must be positive");
  const Eigen::Index n = p.dim();
  auto d_at = [&](const Vector& offset) {
    return divergence(CoordPoint(p.xi() + offset, p.tau()), p);
  };
  const double d0 = d_at(Vector::Zero(n));
  Matrix h(n, n);
  Vector e = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    e.setZero();
    e[i] = step;
    h(i, i) = (d_at(e) - 2.0 * d0 + d_at(-e)) / (step * step);
    for (Eigen::Index j = 0; j < i; ++j) {
      Vector f = Vector::Zero(n);
      f[j] = step;
      const double v =
          (d_at(e + f) - d_at(e - f) - d_at(-e + f) + d_at(-e - f)) /
          (4.0 * step * step);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

}  // namespace lneflow::geometry
