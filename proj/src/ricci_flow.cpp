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

#include "lneflow/ricci_flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lneflow/csv.hpp"
#include "lneflow/error.hpp"
#include "lneflow/rng.hpp"

namespace lneflow::flow {

void FlowConfig::validate() const {
  require(dim == 2 || dim == 3, "ricci-sim: dim must be 2 or 3");
  require(points >= 3, "ricci-sim: points must be >= 3");
  require(length > 0.0, "ricci-sim: length must be positive");
  require(epsilon >= 0.0 && std::isfinite(epsilon), "ricci-sim: epsilon must be >= 0");
  require(tol > 0.0, "ricci-sim: tol must be positive");
  require(t_max >= 0.0, "ricci-sim: t_max must be >= 0");
  require(blowup_threshold > 0.0, "ricci-sim: blowup_threshold must be positive");
  require(profile.wavenumber >= 1, "ricci-sim: wavenumber must be >= 1");
  require(profile.width > 0.0, "ricci-sim: width must be positive");
  if (dt) {
    require(*dt > 0.0 && *dt <= cfl_bound(shape()),
            "ricci-sim: dt must be in (0, CFL bound]");
  }
  if (profile.direction == TensorDirection::kOffDiagonal)
    require(dim >= 2, "ricci-sim: off-diagonal direction needs dim >= 2");
}

double cfl_bound(const GridShape& shape) {
  const double h = shape.min_spacing();
  return kCflSafety * h * h / (2.0 * shape.dim());
}

FlowState::FlowState(MetricGrid g, double dt) : g_(std::move(g)), dt_(dt) {
  require(dt > 0.0 && dt <= cfl_bound(g_.shape()),
          "FlowState: dt " + std::to_string(dt) + " violates the CFL bound " +
              std::to_string(cfl_bound(g_.shape())));
  g_.check_nondegenerate();
  record();
}

SymTensorGrid& FlowState::perturbation() {
  rhs_.reset();
  return g_.perturbation();
}

void FlowState::record() {
  auto eval = diffgeo::deturck_rhs(g_);
  sup_rm_ = eval.sup_riemann;
  rhs_ = std::move(eval.rhs);
  const auto& gamma = g_.perturbation();
  history_.push_back(
      {steps_, t_, l2_norm(gamma), linf_norm(gamma), sup_rm_, l2_fluctuation(gamma)});
}

namespace {

Eigen::MatrixXd direction_tensor(TensorDirection d, int n) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  switch (d) {
    case TensorDirection::kDiagonal:
      e(0, 0) = 1.0;
      break;
    case TensorDirection::kOffDiagonal:
      e(0, 1) = e(1, 0) = 1.0 / std::sqrt(2.0);
      break;
    case TensorDirection::kTrace:
      e = Eigen::MatrixXd::Identity(n, n) / std::sqrt(static_cast<double>(n));
      break;
  }
  return e;
}

double periodic_offset(double x, double centre, double length) {
  double d = std::fmod(x - centre, length);
  if (d > 0.5 * length) d -= length;
  if (d < -0.5 * length) d += length;
  return d;
}

SymTensorGrid profile_field(const FlowConfig& cfg) {
  const GridShape shape = cfg.shape();
  const int n = cfg.dim;
  SymTensorGrid field(shape);
  const Eigen::MatrixXd e = direction_tensor(cfg.profile.direction, n);
  const double two_pi = 2.0 * std::numbers::pi;

  switch (cfg.profile.kind) {
    case ProfileKind::kFourierMode: {
      const double k = two_pi * cfg.profile.wavenumber / cfg.length;
      for (std::size_t p = 0; p < shape.size(); ++p)
        field.set(p, std::sin(k * shape.position(p)[0]) * e);
      break;
    }
    case ProfileKind::kGaussianBump: {
      const double w = cfg.profile.width * cfg.length;
      const double centre = 0.5 * cfg.length;
      std::vector<double> s(shape.size());
      double mean = 0.0;
      for (std::size_t p = 0; p < shape.size(); ++p) {
        const auto x = shape.position(p);
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) {
          const double d = periodic_offset(x[a], centre, cfg.length);
          r2 += d * d;
        }
        s[p] = std::exp(-r2 / (2.0 * w * w));
        mean += s[p];
      }
      mean /= static_cast<double>(shape.size());
      for (std::size_t p = 0; p < shape.size(); ++p) field.set(p, (s[p] - mean) * e);
      break;
    }
    case ProfileKind::kRandomSmooth: {
      // Each stored component is a random sum of low, non-constant Fourier
      // modes |k_a| <= 2 with amplitudes decaying like 1 / (1 + |k|^2).
      RandomStream rng = RandomStream::derive(cfg.profile.seed, "ricci_flow.random_smooth");
      struct Mode {
        std::array<int, 3> k;
        double a, b;
      };
      const int kmax = 2;
      for (int c = 0; c < field.components(); ++c) {
        std::vector<Mode> modes;
        for (int kx = -kmax; kx <= kmax; ++kx)
          for (int ky = -kmax; ky <= kmax; ++ky)
            for (int kz = (n == 3 ? -kmax : 0); kz <= (n == 3 ? kmax : 0); ++kz) {
              if (kx == 0 && ky == 0 && kz == 0) continue;
              const double decay = 1.0 / (1.0 + kx * kx + ky * ky + kz * kz);
              const double a = rng.normal() * decay;
              const double b = rng.normal() * decay;
              modes.push_back({{kx, ky, kz}, a, b});
            }
        for (std::size_t p = 0; p < shape.size(); ++p) {
          const auto x = shape.position(p);
          double v = 0.0;
          for (const Mode& m : modes) {
            double phase = 0.0;
            for (int a = 0; a < n; ++a) phase += m.k[a] * x[a];
            phase *= two_pi / cfg.length;
            v += m.a * std::cos(phase) + m.b * std::sin(phase);
          }
          field.values()[p * field.components() + c] = v;
        }
      }
      break;
    }
  }
  return field;
}

}  // namespace

FlowState init_perturbation(const FlowConfig& cfg) {
  cfg.validate();
  SymTensorGrid gamma(cfg.shape());
  if (cfg.epsilon > 0.0) {
    gamma = profile_field(cfg);
    const double sup = linf_norm(gamma);
    require(sup > 0.0, "init_perturbation: profile vanishes on this grid");
    const double scale = cfg.epsilon / sup;
    for (double& v : gamma.values()) v *= scale;
  }
  return FlowState(MetricGrid(std::move(gamma)), cfg.dt.value_or(cfl_bound(cfg.shape())));
}

SymTensorGrid flow_rhs(const MetricGrid& g) { return diffgeo::deturck_rhs(g).rhs; }

void step(FlowState& s) {
  SymTensorGrid& gamma = s.g_.perturbation();
  if (!gamma.all_finite()) throw SingularityDetected("non-finite metric before step");
  if (!s.rhs_) {
    s.rhs_ = flow_rhs(s.g_);
  }
  const auto& rhs = s.rhs_->values();
  auto& v = gamma.values();
  for (std::size_t q = 0; q < v.size(); ++q) v[q] += s.dt_ * rhs[q];
  if (!gamma.all_finite()) throw SingularityDetected("non-finite metric after step");
  s.t_ += s.dt_;
  ++s.steps_;
  s.record();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kConverged:
      return "Converged";
    case Verdict::kTimedOut:
      return "TimedOut";
    case Verdict::kSingularityDetected:
      return "SingularityDetected";
  }
  return "Unknown";
}

RunResult run(FlowState& s, const FlowConfig& cfg,
              const std::function<void(const FlowState&)>& observer) {
  if (observer) observer(s);
  for (;;) {
    if (!s.metric().perturbation().all_finite())
      return {Verdict::kSingularityDetected, "non-finite metric"};
    const HistoryRow& last = s.history().back();
    if (!std::isfinite(last.sup_rm) || last.sup_rm > cfg.blowup_threshold)
      return {Verdict::kSingularityDetected,
              "sup|Rm| = " + format_double(last.sup_rm) + " exceeds threshold"};
    if (last.l2_fluct < cfg.tol) return {Verdict::kConverged, ""};
    if (s.t() > cfg.t_max) return {Verdict::kTimedOut, ""};
    try {
      step(s);
      if (observer) observer(s);
    } catch (const SingularityDetected& e) {
      return {Verdict::kSingularityDetected, e.what()};
    } catch (const DegenerateMetric& e) {
      return {Verdict::kSingularityDetected, e.what()};
    }
  }
}

double l2_norm(const SymTensorGrid& d) {
  double s = 0.0;
  for (std::size_t p = 0; p < d.shape().size(); ++p) {
    const double f = d.frobenius_at(p);
    s += f * f;
  }
  return std::sqrt(s * d.shape().cell_volume());
}

double l2_fluctuation(const SymTensorGrid& d) {
  const int nc = d.components();
  const std::size_t n = d.shape().size();
  std::vector<double> mean(static_cast<std::size_t>(nc), 0.0);
  for (std::size_t p = 0; p < n; ++p)
    for (int c = 0; c < nc; ++c) mean[c] += d.values()[p * nc + c];
  for (double& m : mean) m /= static_cast<double>(n);
  SymTensorGrid centred = d;
  for (std::size_t p = 0; p < n; ++p)
    for (int c = 0; c < nc; ++c) centred.values()[p * nc + c] -= mean[c];
  return l2_norm(centred);
}

double linf_norm(const SymTensorGrid& d) {
  double m = 0.0;
  for (std::size_t p = 0; p < d.shape().size(); ++p) {
    const double f = d.frobenius_at(p);
    if (std::isnan(f)) return f;
    m = std::max(m, f);
  }
  return m;
}

double sup_riemann(const MetricGrid& g) { return diffgeo::curvature_fields(g).sup_riemann; }

void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& history,
                       const RunResult& result) {
  CsvWriter csv(os);
  csv.header({"step", "t", "l2", "linf", "sup_rm", "l2_fluct"});
  for (const auto& r : history) {
    csv.field(r.step).field(r.t).field(r.l2).field(r.linf).field(r.sup_rm).field(r.l2_fluct);
    csv.end_row();
  }
  os << "#verdict=" << to_string(result.verdict);
  if (!history.empty())
    os << " steps=" << history.back().step << " t=" << format_double(history.back().t);
  if (!result.reason.empty()) os << " reason=\"" << result.reason << '"';
  os << '\n';
}

}  // namespace lneflow::flow
