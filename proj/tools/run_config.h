// Copyright 2026 The gridsynth Authors
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


// Run configuration shared by every subcommand.

#ifndef GRIDSYNTH_TOOLS_RUN_CONFIG_H_
#define GRIDSYNTH_TOOLS_RUN_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gridsynth/case_io.h"
#include "gridsynth/synth.h"
#include "nlohmann/json.hpp"

namespace gridsynth {

// Environment variable naming the default output directory.
inline constexpr char kOutputDirEnv[] = "GRIDSYNTH_OUTPUT_DIR";

struct RunConfig {
  std::vector<std::string> case_paths;
  ReleaseAlgorithm algorithm = ReleaseAlgorithm::kCro;
  // Adjacency in MW. A positive alpha_pct overrides it with that percentage
  // of the mean bus load.
  double alpha = 20.0;
  double alpha_pct = 0.0;
  double epsilon = 1.0;
  double eta = 0.05;
  double beta = 1.0;
  double gamma = 1e-3;
  int tau = 5;
  int tau_max = 10;
  int samples = 100;
  uint64_t seed = 0;
  int jobs = 1;
  std::string output_dir;
  // Adds wall_time_ms columns, which makes CSV output run dependent.
  bool timings = false;
  bool enforce_nonneg_loads = true;
  bool cost_sensitivity_includes_penalty = false;
  // Violation penalty in $/MW; zero keeps the case default.
  double psi = 0.0;
  int64_t node_limit = 1000000;
  int attack_set_rounds = 4;
};

nlohmann::json RunConfigToJson(const RunConfig& config);
// Overwrites the fields present in `value`.
absl::Status MergeRunConfig(const nlohmann::json& value, RunConfig* config);
absl::StatusOr<RunConfig> ReadRunConfigFile(const std::string& path);

// Checks ranges and that every case file exists.
absl::Status ValidateRunConfig(const RunConfig& config);

// Hex digest of the settings that affect results. Jobs, output directory and
// timing columns are excluded.
std::string ConfigHash(const RunConfig& config);

// Adjacency in MW for a case.
double ResolveAlpha(const RunConfig& config, const GridCase& grid);

SynthConfig ToSynthConfig(const RunConfig& config, double alpha_mw);

// The configured directory, else the environment default, else ".".
std::string OutputDir(const RunConfig& config);

}  // namespace gridsynth

#endif  // GRIDSYNTH_TOOLS_RUN_CONFIG_H_
