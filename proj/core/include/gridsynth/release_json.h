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


// JSON form of synthetic releases and privacy ledgers.
//
// Rationals are written as "p/q" strings next to their double value so the
// accountant can be re-run on a file. Doubles use the shortest round-trip
// representation, so a release serializes to the same bytes on every run.

#ifndef GRIDSYNTH_RELEASE_JSON_H_
#define GRIDSYNTH_RELEASE_JSON_H_

#include <cstdint>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "gridsynth/case_io.h"
#include "gridsynth/dp.h"
#include "gridsynth/synth.h"
#include "nlohmann/json.hpp"

namespace gridsynth {

inline constexpr int kReleaseFormatVersion = 1;

nlohmann::json RationalToJson(const Rational& value);
absl::StatusOr<Rational> RationalFromJson(const nlohmann::json& value);

nlohmann::json LedgerToJson(const Ledger& ledger);
absl::StatusOr<Ledger> LedgerFromJson(const nlohmann::json& value);

nlohmann::json PrivacyToJson(const PrivacyParams& params);
absl::StatusOr<PrivacyParams> PrivacyFromJson(const nlohmann::json& value);

nlohmann::json SynthConfigToJson(const SynthConfig& config);
// Missing keys keep their defaults.
absl::StatusOr<SynthConfig> SynthConfigFromJson(const nlohmann::json& value);

nlohmann::json ReleaseToJson(const SyntheticRelease& release,
                             const GridCase& grid, const SynthConfig& config);

// The parts of a release file needed to evaluate or audit it.
struct ReleaseRecord {
  std::string case_name;
  ReleaseAlgorithm algorithm = ReleaseAlgorithm::kPp;
  uint64_t seed = 0;
  std::vector<int> bus_ids;
  Eigen::VectorXd d_tilde;
  SynthConfig config;
  PrivacyParams privacy;
  Ledger ledger;
  std::vector<int> rows;
};

absl::StatusOr<ReleaseRecord> ReleaseFromJson(const nlohmann::json& value);

}  // namespace gridsynth

#endif  // GRIDSYNTH_RELEASE_JSON_H_
