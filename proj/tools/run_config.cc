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


#include "run_config.h"

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "gridsynth/dp.h"

namespace gridsynth {
namespace {

using nlohmann::json;

template <typename T>
absl::Status Take(const json& value, const char* key, T* out) {
  if (!value.contains(key)) return absl::OkStatus();
  try {
    *out = value.at(key).get<T>();
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", key, "': ", e.what()));
  }
  return absl::OkStatus();
}

json ResultSettings(const RunConfig& c) {
  json out = RunConfigToJson(c);
  out.erase("jobs");
  out.erase("output_dir");
  out.erase("timings");
  return out;
}

}  // namespace

json RunConfigToJson(const RunConfig& c) {
  return {{"cases", c.case_paths},
          {"algorithm", ReleaseAlgorithmName(c.algorithm)},
          {"alpha", c.alpha},
          {"alpha_pct", c.alpha_pct},
          {"epsilon", c.epsilon},
          {"eta", c.eta},
          {"beta", c.beta},
          {"gamma", c.gamma},
          {"tau", c.tau},
          {"tau_max", c.tau_max},
          {"samples", c.samples},
          {"seed", c.seed},
          {"jobs", c.jobs},
          {"output_dir", c.output_dir},
          {"timings", c.timings},
          {"enforce_nonneg_loads", c.enforce_nonneg_loads},
          {"cost_sensitivity_includes_penalty",
           c.cost_sensitivity_includes_penalty},
          {"psi", c.psi},
          {"node_limit", c.node_limit},
          {"attack_set_rounds", c.attack_set_rounds}};
}

absl::Status MergeRunConfig(const json& value, RunConfig* c) {
  if (!value.is_object()) {
    return absl::InvalidArgumentError("config must be a JSON object");
  }
  static const char* const kKnown[] = {
      "cases", "case", "algorithm", "alpha", "alpha_pct", "epsilon", "eta",
      "beta", "gamma", "tau", "tau_max", "samples", "seed", "jobs",
      "output_dir", "timings", "enforce_nonneg_loads",
      "cost_sensitivity_includes_penalty", "psi", "node_limit",
      "attack_set_rounds"};
  for (const auto& item : value.items()) {
    bool known = false;
    for (const char* key : kKnown) known = known || item.key() == key;
    if (!known) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", item.key(), "'"));
    }
  }
  std::string algo;
  if (value.contains("case")) {
    std::string path;
    if (absl::Status s = Take(value, "case", &path); !s.ok()) return s;
    c->case_paths = {path};
  }
  for (absl::Status s :
       {Take(value, "cases", &c->case_paths), Take(value, "algorithm", &algo),
        Take(value, "alpha", &c->alpha), Take(value, "alpha_pct", &c->alpha_pct),
        Take(value, "epsilon", &c->epsilon), Take(value, "eta", &c->eta),
        Take(value, "beta", &c->beta), Take(value, "gamma", &c->gamma),
        Take(value, "tau", &c->tau), Take(value, "tau_max", &c->tau_max),
        Take(value, "samples", &c->samples), Take(value, "seed", &c->seed),
        Take(value, "jobs", &c->jobs),
        Take(value, "output_dir", &c->output_dir),
        Take(value, "timings", &c->timings),
        Take(value, "enforce_nonneg_loads", &c->enforce_nonneg_loads),
        Take(value, "cost_sensitivity_includes_penalty",
             &c->cost_sensitivity_includes_penalty),
        Take(value, "psi", &c->psi), Take(value, "node_limit", &c->node_limit),
        Take(value, "attack_set_rounds", &c->attack_set_rounds)}) {
    if (!s.ok()) return s;
  }
  if (!algo.empty()) {
    absl::StatusOr<ReleaseAlgorithm> parsed = ParseReleaseAlgorithm(algo);
    if (!parsed.ok()) return parsed.status();
    c->algorithm = *parsed;
  }
  return absl::OkStatus();
}

absl::StatusOr<RunConfig> ReadRunConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  json value;
  try {
    value = json::parse(in);
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": invalid JSON: ", e.what()));
  }
  RunConfig config;
  if (absl::Status s = MergeRunConfig(value, &config); !s.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", s.message()));
  }
  return config;
}

absl::Status ValidateRunConfig(const RunConfig& c) {
  for (const std::string& path : c.case_paths) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      return absl::NotFoundError(absl::StrCat("case file not found: ", path));
    }
  }
  if (c.samples < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("samples must be at least 1, got ", c.samples));
  }
  if (c.jobs < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("jobs must be at least 1, got ", c.jobs));
  }
  if (!(c.alpha > 0.0) && !(c.alpha_pct > 0.0)) {
    return absl::InvalidArgumentError("alpha must be positive");
  }
  if (c.alpha_pct < 0.0) {
    return absl::InvalidArgumentError("alpha_pct must be nonnegative");
  }
  if (!(c.epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  if (c.eta < 0.0 || c.beta < 0.0 || c.gamma < 0.0) {
    return absl::InvalidArgumentError("eta, beta and gamma must be >= 0");
  }
  if (c.tau < 0 || c.tau_max < 0) {
    return absl::InvalidArgumentError("tau must be nonnegative");
  }
  if (c.node_limit < 1 || c.attack_set_rounds < 1) {
    return absl::InvalidArgumentError(
        "node_limit and attack_set_rounds must be positive");
  }
  return absl::OkStatus();
}

std::string ConfigHash(const RunConfig& config) {
  return absl::StrFormat("%016x", Fnv1a(ResultSettings(config).dump()));
}

double ResolveAlpha(const RunConfig& config, const GridCase& grid) {
  if (config.alpha_pct > 0.0 && grid.num_buses() > 0) {
    return config.alpha_pct / 100.0 * grid.TotalLoad() / grid.num_buses();
  }
  return config.alpha;
}

SynthConfig ToSynthConfig(const RunConfig& c, double alpha_mw) {
  SynthConfig s;
  s.alpha = alpha_mw;
  s.epsilon = c.epsilon;
  s.eta = c.eta;
  s.beta = c.beta;
  s.gamma = c.gamma;
  s.tau = c.tau;
  s.enforce_nonneg_loads = c.enforce_nonneg_loads;
  s.cost_sensitivity_includes_penalty = c.cost_sensitivity_includes_penalty;
  s.attack_set_rounds = c.attack_set_rounds;
  s.solve.node_limit = c.node_limit;
  return s;
}

std::string OutputDir(const RunConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return ".";
}

}  // namespace gridsynth
