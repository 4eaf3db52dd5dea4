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

// Command-line front end:
//
//   lneflow <subcommand> --config <path> [--out <dir>] [--dump-every N]
//
// Exit codes: 0 success, 1 failed check, 2 configuration error,
// 3 numerical degeneracy, 4 singularity verdict.
// LNEFLOW_LOG=quiet|info|debug controls stderr verbosity.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lneflow/error.hpp"
#include "lneflow/harness.hpp"

namespace {

int log_level() {
  const char* v = std::getenv("LNEFLOW_LOG");
  if (!v) return 1;
  const std::string s(v);
  if (s == "quiet") return 0;
  if (s == "debug") return 2;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lneflow::harness;

  CLI::App app{"LNE geometry, Ricci-DeTurck flow and natural-gradient experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int dump_every = -1;

  for (int i = 0; i < 5; ++i) {
    const auto sub = static_cast<Subcommand>(i);
    CLI::App* cmd = app.add_subcommand(to_string(sub));
    cmd->add_option("--config", config_path, "JSON configuration file")->required();
    cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    if (sub == Subcommand::kRicciSim)
      cmd->add_option("--dump-every", dump_every, "Write a grid snapshot every N steps")
          ->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const Subcommand sub = subcommand_from_string(app.get_subcommands().front()->get_name());
  const int verbosity = log_level();

  ExperimentConfig cfg;
  try {
    cfg = parse_config_file(sub, config_path);
  } catch (const lneflow::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kExitConfig;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (dump_every >= 0) cfg.dump_every = dump_every;

  if (verbosity >= 2) std::cerr << "config " << cfg.hash << ": " << cfg.effective_json << '\n';

  RunOutcome outcome;
  try {
    outcome = run_experiment(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  if (verbosity >= 1) {
    for (const auto& [k, v] : outcome.manifest.verdicts) std::cerr << k << ": " << v << '\n';
    std::cerr << "outputs in " << cfg.output_dir << '\n';
  }
  return outcome.exit_code;
}
