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

// Linearly-nearly-Euclidean (LNE) geometry on parameter space.
//
// The potential phi(xi) = sum_i log(cosh(tau xi_i)) / tau^2 generates a
// Bregman divergence; the metric attached to it has the rank-one form
// I - u u^T with u = tanh(tau xi). Everything here is a pure function of its
// inputs and safe to call concurrently.

#include <Eigen/Core>

namespace lneflow::geometry {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultTau = 0.1;

/// A parameter point xi in R^n together with the metric scale tau.
class CoordPoint {
 public:
  /// Throws ContractViolation unless n >= 1, tau > 0 and xi is finite.
  CoordPoint(Vector xi, double tau = kDefaultTau);

  const Vector& xi() const { return xi_; }
  double tau() const { return tau_; }
  Eigen::Index dim() const { return xi_.size(); }

 private:
  Vector xi_;
  double tau_;
};

/// The matrix I - u u^T, stored as u alone.
class LneMetric {
 public:
  /// Throws ContractViolation unless every |u_i| < 1.
  explicit LneMetric(Vector u);

  static LneMetric identity(Eigen::Index n) { return LneMetric(Vector::Zero(n)); }

  const Vector& u() const { return u_; }
  Eigen::Index dim() const { return u_.size(); }
  double u_norm_sq() const { return u_.squaredNorm(); }
  /// Dense n x n matrix. O(n^2); intended for tests and small problems.
  Matrix dense() const;

 private:
  Vector u_;
};

struct DomainGuard {
  /// Exact inversion requires 1 - |u|^2 >= eps_guard.
  double eps_guard = 1e-6;
};

/// log(cosh(x)) without overflow for large |x|.
double log_cosh(double x);

double potential(const CoordPoint& p);

/// Bregman divergence of the potential: D[p_prime : p].
/// Zero iff the points coincide; non-negative otherwise.
double divergence(const CoordPoint& p_prime, const CoordPoint& p);

LneMetric lne_metric(const CoordPoint& p);

/// v - u (u^T v) in O(n).
Vector metric_apply(const LneMetric& m, const Vector& v);

/// (I - u u^T)^{-1} grad = grad + u (u^T grad) / (1 - |u|^2).
/// Throws NotPositiveDefinite when 1 - |u|^2 < guard.eps_guard.
Vector natural_grad_exact(const CoordPoint& p, const Vector& grad,
                          DomainGuard guard = {});

/// (I + u u^T) grad. Defined everywhere.
Vector natural_grad_weak(const CoordPoint& p, const Vector& grad);

/// Row-wise strict diagonal dominance of I - u u^T.
bool is_strictly_diag_dominant(const LneMetric& m);

/// sqrt(dxi^T (I - u u^T) dxi). dxi must be non-zero.
double ball_radius(const LneMetric& m, const Vector& dxi);

/// Central finite-difference Hessian of xi' -> divergence(xi', p) at xi' = p.
/// Exactly symmetric.
Matrix hessian_fd(const CoordPoint& p, double step);

}  // namespace lneflow::geometry
