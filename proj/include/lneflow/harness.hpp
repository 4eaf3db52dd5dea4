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

// Experiment configuration, dispatch and result files for the CLI.
//
// A run is described by one JSON document:
//
//   {
//     "seed": 42,                  // required for randomized experiments
//     "output_dir": "out/run1",    // optional, default "out"
//     "ricci_sim": { ... }         // exactly the block of the subcommand
//   }
//
// Unknown keys anywhere are rejected. Every run writes manifest.json into
// the output directory, including runs that end in a failure verdict.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lneflow/lne_optimizer.hpp"
#include "lneflow/ricci_flow.hpp"
#include "lneflow/strong_approx.hpp"

namespace lneflow::harness {

enum class Subcommand { kRicciSim, kTrain, kInverseApprox, kDivergenceCheck, kCurvatureCheck };

/// CLI spelling, e.g. "ricci-sim".
std::string to_string(Subcommand s);
/// Throws ConfigError for unknown names.
Subcommand subcommand_from_string(const std::string& name);

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitDegenerate = 3,
  kExitSingularity = 4,
};

struct DivergenceCheckConfig {
  std::vector<int> dims = {1, 2, 8, 32};
  std::vector<double> taus = {0.05, 0.1, 1.0};
  /// 12 cells x 834 pairs >= 10^4 pairs.
  int pairs_per_cell = 834;
  double xi_range = 3.0;
};

struct CurvatureCheckConfig {
  std::vector<int> resolutions = {64, 128};
  double amplitude = 0.01;
  double min_order = 1.8;
};

struct ExperimentConfig {
  Subcommand subcommand = Subcommand::kRicciSim;
  std::optional<std::uint64_t> seed;
  std::string output_dir = "out";
  /// ricci-sim grid snapshots every N steps; 0 disables.
  int dump_every = 0;

  flow::FlowConfig ricci;
  optim::TrainConfig train;
  strong::InverseApproxConfig inverse;
  DivergenceCheckConfig divergence;
  CurvatureCheckConfig curvature;

  /// The validated configuration with all defaults filled in, serialized
  /// with sorted keys.
  std::string effective_json;
  /// FNV-1a of effective_json, as 16 hex digits.
  std::string hash;
};

/// Parses and validates a configuration document. Throws ConfigError with a
/// 1-based line number where one can be attributed.
ExperimentConfig parse_config(Subcommand sub, const std::string& text);
ExperimentConfig parse_config_file(Subcommand sub, const std::filesystem::path& path);

struct RunManifest {
  std::string config_hash;
  std::string artifact_version;
  std::string started_at;
  std::string finished_at;
  std::map<std::string, std::string> verdicts;
  std::vector<std::string> outputs;
  int exit_code = 0;
  std::string error;
};

struct RunOutcome {
  int exit_code = 0;
  RunManifest manifest;
};

/// Runs the experiment, writing CSV outputs and manifest.json under
/// cfg.output_dir. Module errors become exit codes, not exceptions.
RunOutcome run_experiment(const ExperimentConfig& cfg);

/// Library version string recorded in manifests.
std::string artifact_version();

}  // namespace lneflow::harness
