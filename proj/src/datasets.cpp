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

#include "lneflow/datasets.hpp"

#include <cmath>
#include <numbers>

#include "lneflow/error.hpp"
#include "lneflow/rng.hpp"

namespace lneflow::data {

namespace {

template <typename Sampler>
Dataset sample(int count, Sampler&& draw) {
  Dataset d{Eigen::MatrixXd(count, 2), std::vector<int>(static_cast<std::size_t>(count))};
  for (int s = 0; s < count; ++s) {
    const int label = s % 2;
    const auto [x0, x1] = draw(label);
    d.x(s, 0) = x0;
    d.x(s, 1) = x1;
    d.y[static_cast<std::size_t>(s)] = label;
  }
  return d;
}

}  // namespace

DatasetId dataset_from_string(const std::string& name) {
  if (name == "blobs") return DatasetId::kBlobs;
  if (name == "moons") return DatasetId::kMoons;
  throw ContractViolation("unknown dataset '" + name + "'");
}

std::string to_string(DatasetId id) { return id == DatasetId::kBlobs ? "blobs" : "moons"; }

Split make_blobs(std::uint64_t seed, int n_train, int n_test) {
  RandomStream rng = RandomStream::derive(seed, "data.blobs");
  auto draw = [&](int label) {
    const double c = label == 0 ? -1.5 : 1.5;
    const double a = rng.normal(c, 1.0);
    const double b = rng.normal(c, 1.0);
    return std::pair{a, b};
  };
  Split s;
  s.train = sample(n_train, draw);
  s.test = sample(n_test, draw);
  return s;
}

Split make_moons(std::uint64_t seed, int n_train, int n_test) {
  RandomStream rng = RandomStream::derive(seed, "data.moons");
  auto draw = [&](int label) {
    const double t = std::numbers::pi * rng.uniform();
    double a, b;
    if (label == 0) {
      a = std::cos(t);
      b = std::sin(t);
    } else {
      a = 1.0 - std::cos(t);
      b = 0.5 - std::sin(t);
    }
    a += rng.normal(0.0, 0.1);
    b += rng.normal(0.0, 0.1);
    return std::pair{a, b};
  };
  Split s;
  s.train = sample(n_train, draw);
  s.test = sample(n_test, draw);
  return s;
}

Split make_dataset(DatasetId id, std::uint64_t seed, int n_train, int n_test) {
  return id == DatasetId::kBlobs ? make_blobs(seed, n_train, n_test)
                                 : make_moons(seed, n_train, n_test);
}

}  // namespace lneflow::data
