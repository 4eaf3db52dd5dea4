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

#include "lneflow/lne_optimizer.hpp"

#include <cmath>
#include <string>

#include "lneflow/error.hpp"
#include "lneflow/rng.hpp"

namespace lneflow::optim {

void TrainConfig::validate() const {
  require(tau > 0.0 && std::isfinite(tau), "train: tau must be positive");
  require(learning_rate > 0.0 && std::isfinite(learning_rate),
          "train: learning_rate must be positive");
  require(steps >= 1, "train: steps must be >= 1");
  require(radius_every >= 1, "train: radius_every must be >= 1");
  require(layers.size() >= 2, "train: need at least input and output layers");
  require(layers.front() == 2 && layers.back() == 2,
          "train: toy datasets need 2 inputs and 2 outputs");
  require(init_scale > 0.0, "train: init_scale must be positive");
}

void RadiusSeries::append(long long step, double radius) {
  require(samples_.empty() || step > samples_.back().step,
          "RadiusSeries: steps must be strictly increasing");
  require(radius >= 0.0, "RadiusSeries: radius must be non-negative");
  samples_.push_back({step, radius});
}

std::pair<double, double> RadiusSeries::tail_stats(std::size_t count) const {
  require(count >= 1 && count <= samples_.size(), "RadiusSeries: not enough samples");
  const std::size_t first = samples_.size() - count;
  double mean = 0.0;
  for (std::size_t i = first; i < samples_.size(); ++i) mean += samples_[i].radius;
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (std::size_t i = first; i < samples_.size(); ++i) {
    const double d = samples_[i].radius - mean;
    var += d * d;
  }
  return {mean, std::sqrt(var / static_cast<double>(count))};
}

geometry::CoordPoint as_coord_point(const nn::Mlp& model, double tau) {
  return geometry::CoordPoint(model.parameters(), tau);
}

Vector precondition(const nn::Mlp& model, const Vector& grad, const TrainConfig& cfg) {
  switch (cfg.flow) {
    case FlowKind::kWeak:
      return geometry::natural_grad_weak(as_coord_point(model, cfg.tau), grad);
    case FlowKind::kExact:
      require(model.parameter_count() <= kMaxExactParameters,
              "exact natural gradient is limited to " +
                  std::to_string(kMaxExactParameters) + " parameters");
      return geometry::natural_grad_exact(as_coord_point(model, cfg.tau), grad);
    case FlowKind::kEuclidean:
      return grad;
  }
  return grad;
}

namespace {

Vector checked_gradient(const nn::Mlp& model, const data::Dataset& batch) {
  Vector grad = nn::mlp_backward(model, batch.x, batch.y);
  if (!grad.allFinite()) throw NumericalFailure("non-finite loss gradient");
  return grad;
}

}  // namespace

nn::Mlp train_step_weak(const nn::Mlp& model, const data::Dataset& batch,
                        const TrainConfig& cfg) {
  const Vector grad = checked_gradient(model, batch);
  nn::Mlp next = model;
  next.set_parameters(model.parameters() -
                      cfg.learning_rate *
                          geometry::natural_grad_weak(as_coord_point(model, cfg.tau), grad));
  return next;
}

double track_radius(const nn::Mlp& model, const TrainConfig& cfg, const Vector& probe) {
  const double len = probe.norm();
  require(len > 0.0, "track_radius: zero probe");
  return geometry::ball_radius(geometry::lne_metric(as_coord_point(model, cfg.tau)),
                               probe / len);
}

TrainResult train(const TrainConfig& cfg) {
  cfg.validate();
  const data::Split split = data::make_dataset(cfg.dataset, cfg.seed);
  RandomStream init_rng = RandomStream::derive(cfg.seed, "optim.init");
  nn::Mlp model = nn::Mlp::random(cfg.layers, init_rng, cfg.init_scale);

  RandomStream probe_rng = RandomStream::derive(cfg.seed, "optim.probe");
  Vector fixed_probe(model.parameter_count());
  for (auto& v : fixed_probe) v = probe_rng.normal();
  fixed_probe.normalize();

  TrainResult result{{}, {}, {}, model, 0.0};
  for (long long s = 1; s <= cfg.steps; ++s) {
    const Vector grad = checked_gradient(model, split.train);
    const Vector update = -cfg.learning_rate * precondition(model, grad, cfg);
    if (!update.allFinite()) throw NumericalFailure("non-finite update at step " + std::to_string(s));

    const bool log_now = s % cfg.radius_every == 0 || s == cfg.steps;
    RadiusRow rr;
    if (log_now) {
      // Radii are measured at the point the step starts from.
      rr.step = s;
      rr.fixed_random = track_radius(model, cfg, fixed_probe);
      rr.fallback = !(update.squaredNorm() > 0.0);
      rr.update_direction = rr.fallback ? rr.fixed_random : track_radius(model, cfg, update);
    }

    model.set_parameters(model.parameters() + update);

    if (log_now) {
      const double radius =
          cfg.probe == ProbeMode::kUpdateDirection ? rr.update_direction : rr.fixed_random;
      const double loss = nn::cross_entropy(model.forward(split.train.x), split.train.y);
      if (!std::isfinite(loss)) throw NumericalFailure("non-finite loss at step " + std::to_string(s));
      const double acc = nn::accuracy(model.forward(split.test.x), split.test.y);
      result.rows.push_back({s, loss, acc, radius});
      result.radius_log.push_back(rr);
      result.radii.append(s, radius);
    }
  }
  result.final_test_acc = nn::accuracy(model.forward(split.test.x), split.test.y);
  result.model = std::move(model);
  return result;
}

}  // namespace lneflow::optim
