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

// Grid case data and the DC power transfer distribution factor matrix.
//
// Cases are read from the MATPOWER text format restricted to the `mpc.bus`,
// `mpc.branch`, `mpc.gen` and `mpc.gencost` tables plus `mpc.baseMVA`.
// Out-of-service branches and generators are dropped at parse time. Only
// polynomial cost rows whose quadratic coefficient is zero are accepted.

#ifndef GRIDSYNTH_CASE_IO_H_
#define GRIDSYNTH_CASE_IO_H_

#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "nlohmann/json.hpp"

namespace gridsynth {

struct Bus {
  int id = 0;
  // Active load in MW. This is the bus entry of the load vector d.
  double load_mw = 0.0;
  // MATPOWER bus type. Type 3 marks the reference bus.
  int type = 1;

  bool operator==(const Bus&) const = default;
};

struct Branch {
  int from_bus = 0;
  int to_bus = 0;
  // Series reactance in per unit on the case base.
  double reactance = 0.0;
  // Thermal limit in MW. A MATPOWER rating of 0 means unlimited and is stored
  // as +infinity.
  double capacity_mw = 0.0;

  bool operator==(const Branch&) const = default;
};

struct Generator {
  int bus = 0;
  // Linear cost coefficient in $/MWh.
  double cost = 0.0;
  double p_min = 0.0;
  double p_max = 0.0;

  bool operator==(const Generator&) const = default;
};

struct GridCase {
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  int slack_bus = 0;
  // Non-fatal notes produced while parsing, e.g. clamped negative p_min.
  std::vector<std::string> warnings;

  int num_buses() const { return static_cast<int>(buses.size()); }
  int num_branches() const { return static_cast<int>(branches.size()); }
  int num_generators() const { return static_cast<int>(generators.size()); }

  // Position of bus `id` in `buses`, or -1.
  int BusIndex(int id) const;
  // Load vector d in bus order.
  std::vector<double> Loads() const;
  double TotalLoad() const;
  double MaxGeneratorCost() const;

  bool operator==(const GridCase& other) const {
    return name == other.name && base_mva == other.base_mva &&
           buses == other.buses && branches == other.branches &&
           generators == other.generators && slack_bus == other.slack_bus;
  }
};

struct PtdfMatrix {
  // Rows follow `GridCase::branches`, columns follow `GridCase::buses`.
  Eigen::MatrixXd entries;
  int slack_bus = 0;
};

enum class FindingKind {
  kDuplicateBus,
  kDanglingBranch,
  kSelfLoop,
  kNonpositiveReactance,
  kNegativeCapacity,
  kNonfiniteLoad,
  kGeneratorBus,
  kGeneratorLimits,
  kNegativeCost,
  kNoGenerator,
  kBadSlack,
  kDisconnected,
  kBadBaseMva,
};

struct CaseFinding {
  FindingKind kind;
  // Index into the relevant table (bus, branch or generator), or -1.
  int index = -1;
  std::string message;
};

// Parses MATPOWER case text. `name` overrides the function name in the file.
absl::StatusOr<GridCase> ParseCase(absl::string_view text,
                                   absl::string_view name = "");

// Reads and parses a case file. A missing file yields kNotFound.
absl::StatusOr<GridCase> ReadCaseFile(const std::string& path);

// Writes `grid` in the same format subset accepted by ParseCase.
std::string RenderCase(const GridCase& grid);

// Returns one finding per violated GridCase invariant.
std::vector<CaseFinding> ValidateCase(const GridCase& grid);

// PTDF with respect to `grid.slack_bus`.
absl::StatusOr<PtdfMatrix> ComputePtdf(const GridCase& grid);
// PTDF with respect to an explicit slack bus id.
absl::StatusOr<PtdfMatrix> ComputePtdf(const GridCase& grid, int slack_bus);

nlohmann::json CaseToJson(const GridCase& grid);

}  // namespace gridsynth

#endif  // GRIDSYNTH_CASE_IO_H_
