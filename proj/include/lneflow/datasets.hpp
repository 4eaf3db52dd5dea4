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

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lneflow::data {

struct Dataset {
  Eigen::MatrixXd x;  // one sample per row
  std::vector<int> y;
};

struct Split {
  Dataset train;
  Dataset test;
};

enum class DatasetId { kBlobs, kMoons };

/// "blobs" or "moons"; throws ContractViolation otherwise.
DatasetId dataset_from_string(const std::string& name);
std::string to_string(DatasetId id);

/// Two isotropic Gaussian classes in 2D, unit variance, centred at
/// (-1.5, -1.5) and (1.5, 1.5). Classes alternate so every split is balanced.
Split make_blobs(std::uint64_t seed, int n_train = 500, int n_test = 200);

/// Two interleaved half circles with Gaussian noise (sd 0.1).
Split make_moons(std::uint64_t seed, int n_train = 500, int n_test = 200);

Split make_dataset(DatasetId id, std::uint64_t seed, int n_train = 500, int n_test = 200);

}  // namespace lneflow::data
