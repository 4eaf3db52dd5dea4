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

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "lneflow/rng.hpp"

namespace lneflow::testing {

inline Eigen::VectorXd uniform_vector(RandomStream& rng, Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline Eigen::VectorXd normal_vector(RandomStream& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace lneflow::testing
