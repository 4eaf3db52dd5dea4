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

// Explicit integration of the Ricci-DeTurck flow
//   d/dt g = -2 Ric(g) + nabla_i W_j + nabla_j W_i,   W^k = g^{pq} Gamma^k_pq,
// for g = delta + gamma on a periodic grid.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lneflow/diffgeo.hpp"
#include "lneflow/tensor_grid.hpp"

namespace lneflow::flow {

using diffgeo::GridShape;
using diffgeo::MetricGrid;
using diffgeo::SymTensorGrid;

enum class ProfileKind { kFourierMode, kGaussianBump, kRandomSmooth };

/// Constant tensor the scalar profiles are multiplied by (unit Frobenius
/// norm): e0 e0^T, (e0 e1^T + e1 e0^T)/sqrt(2), or delta/sqrt(n).
enum class TensorDirection { kDiagonal, kOffDiagonal, kTrace };

struct Profile {
  ProfileKind kind = ProfileKind::kFourierMode;
  /// Number of periods along axis 0 (fourier_mode).
  int wavenumber = 1;
  TensorDirection direction = TensorDirection::kDiagonal;
  /// Gaussian width as a fraction of the domain length (gaussian_bump).
  double width = 0.125;
  /// Seed for random_smooth.
  std::uint64_t seed = 0;
};

inline constexpr double kCflSafety = 0.5;

struct FlowConfig {
  int dim = 2;
  int points = 64;
  double length = 2.0 * std::numbers::pi;
  Profile profile;
  /// Sup norm of the initial perturbation.
  double epsilon = 1e-3;
  double t_max = 50.0;
  double tol = 1e-8;
  double blowup_threshold = 1e6;
  /// Defaults to the CFL bound.
  std::optional<double> dt;

  GridShape shape() const { return GridShape::cube(dim, points, length); }
  /// Throws ContractViolation on invalid values.
  void validate() const;
};

/// Largest admissible explicit step: kCflSafety * h^2 / (2 n).
double cfl_bound(const GridShape& shape);

struct HistoryRow {
  long long step = 0;
  double t = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double sup_rm = 0.0;
  /// L2 distance from gamma to its componentwise spatial mean, i.e. to the
  /// nearest constant (hence stationary) metric.
  double l2_fluct = 0.0;
};

class FlowState {
 public:
  /// Throws ContractViolation when dt is not in (0, cfl_bound], and
  /// DegenerateMetric when g is not positive-definite.
  FlowState(MetricGrid g, double dt);

  double t() const { return t_; }
  double dt() const { return dt_; }
  long long steps() const { return steps_; }
  const MetricGrid& metric() const { return g_; }
  const std::vector<HistoryRow>& history() const { return history_; }

  /// Mutable access to gamma. Drops the cached right-hand side.
  SymTensorGrid& perturbation();

 private:
  friend void step(FlowState& s);

  void record();

  MetricGrid g_;
  double dt_;
  double t_ = 0.0;
  long long steps_ = 0;
  std::vector<HistoryRow> history_;
  std::optional<SymTensorGrid> rhs_;
  double sup_rm_ = 0.0;
};

/// Builds gamma(0) from the profile, scaled so its sup norm is exactly
/// epsilon. Throws DegenerateMetric if delta + gamma(0) is not
/// positive-definite.
FlowState init_perturbation(const FlowConfig& cfg);

SymTensorGrid flow_rhs(const MetricGrid& g);

/// One explicit Euler step. Throws SingularityDetected on non-finite values.
void step(FlowState& s);

enum class Verdict { kConverged, kTimedOut, kSingularityDetected };

std::string to_string(Verdict v);

struct RunResult {
  Verdict verdict = Verdict::kConverged;
  std::string reason;
};

/// Steps until the flow is within tol of a constant metric in L2
/// (HistoryRow::l2_fluct < tol), t > t_max, or a singularity (sup |Rm| above
/// the blow-up threshold, non-finite values, degenerate metric).
///
/// Constant metrics are fixed points of the flow, and on the torus the
/// nonlinear terms feed a constant component that never decays, so the limit
/// is generally delta + const rather than delta itself.
/// `observer`, if set, sees the initial state and the state after each step.
RunResult run(FlowState& s, const FlowConfig& cfg,
              const std::function<void(const FlowState&)>& observer = {});

/// sqrt(sum_points |d|^2 h^n), summed in flat-index order.
double l2_norm(const SymTensorGrid& d);
/// l2_norm of d minus its componentwise mean.
double l2_fluctuation(const SymTensorGrid& d);
/// max over points of the pointwise Frobenius norm.
double linf_norm(const SymTensorGrid& d);
double sup_riemann(const MetricGrid& g);

/// Columns step,t,l2,linf,sup_rm,l2_fluct, then a "#verdict=..." footer line.
void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& history,
                       const RunResult& result);

}  // namespace lneflow::flow
