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

// Toy-scale training under the LNE natural-gradient flows, with tracking of
// the metric ball radius B_r = sqrt(dxi^T (I - u u^T) dxi) along training.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "lneflow/datasets.hpp"
#include "lneflow/lne_geometry.hpp"
#include "lneflow/mlp.hpp"

namespace lneflow::optim {

using Vector = Eigen::VectorXd;

enum class ProbeMode { kUpdateDirection, kFixedRandom };
/// kWeak: (I + u u^T) grad; kExact: (I - u u^T)^{-1} grad; kEuclidean: grad.
enum class FlowKind { kWeak, kExact, kEuclidean };

inline constexpr Eigen::Index kMaxExactParameters = 1000;

struct TrainConfig {
  double tau = geometry::kDefaultTau;
  double learning_rate = 0.1;
  int steps = 200;
  std::uint64_t seed = 0;
  data::DatasetId dataset = data::DatasetId::kBlobs;
  ProbeMode probe = ProbeMode::kUpdateDirection;
  int radius_every = 1;
  std::vector<int> layers = {2, 16, 16, 2};
  FlowKind flow = FlowKind::kWeak;
  double init_scale = 1.0;

  void validate() const;
};

struct RadiusSample {
  long long step = 0;
  double radius = 0.0;
};

/// (step, B_r) pairs with strictly increasing steps and B_r >= 0.
class RadiusSeries {
 public:
  void append(long long step, double radius);
  const std::vector<RadiusSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  /// Mean and population standard deviation of the last `count` radii.
  std::pair<double, double> tail_stats(std::size_t count) const;

 private:
  std::vector<RadiusSample> samples_;
};

/// Parameters of the model viewed as a point of the LNE parameter manifold.
geometry::CoordPoint as_coord_point(const nn::Mlp& model, double tau);

/// Preconditioned gradient for cfg.flow, evaluated at the model's current
/// parameters.
Vector precondition(const nn::Mlp& model, const Vector& grad, const TrainConfig& cfg);

/// theta - eta * (I + u u^T) grad with u = tanh(tau theta).
/// Throws NumericalFailure on a non-finite gradient.
nn::Mlp train_step_weak(const nn::Mlp& model, const data::Dataset& batch,
                        const TrainConfig& cfg);

/// B_r for the probe direction after normalizing it to unit length.
double track_radius(const nn::Mlp& model, const TrainConfig& cfg, const Vector& probe);

struct TrainRow {
  long long step = 0;
  double train_loss = 0.0;
  double test_acc = 0.0;
  double radius = 0.0;
};

/// Both probe conventions, logged side by side.
struct RadiusRow {
  long long step = 0;
  double update_direction = 0.0;
  double fixed_random = 0.0;
  /// The update was zero, so the update-direction column used the fixed probe.
  bool fallback = false;
};

struct TrainResult {
  std::vector<TrainRow> rows;
  std::vector<RadiusRow> radius_log;
  RadiusSeries radii;  // series for cfg.probe
  nn::Mlp model;
  double final_test_acc = 0.0;
};

/// Full-batch training on the configured dataset. Rows are logged every
/// cfg.radius_every steps, after the update of that step.
TrainResult train(const TrainConfig& cfg);

}  // namespace lneflow::optim
