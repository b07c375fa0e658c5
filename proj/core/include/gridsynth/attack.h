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

// Load-redistribution attacks against the DC-OPF.
//
// An attack is a load shift delta with 1'delta = 0 and per-bus bounds. The
// bilevel attack maximizes C_opf(d + delta). The robust attack lets every
// load-dependent row take its own worst-case shift, which gives an upper
// bound computed by a single LP.

#ifndef GRIDSYNTH_ATTACK_H_
#define GRIDSYNTH_ATTACK_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "gridsynth/compact_model.h"
#include "gridsynth/linear_program.h"

namespace gridsynth {

struct AttackSet {
  Eigen::VectorXd delta_lo;  // <= 0
  Eigen::VectorXd delta_hi;  // >= 0
  std::optional<double> eta;

  int size() const { return static_cast<int>(delta_lo.size()); }
  // Number of coordinates with a nonzero range.
  int NumActive() const;
  bool Contains(const Eigen::VectorXd& delta, double tol = 1e-7) const;
};

// Bounds +-eta*d. Rejects negative loads and negative eta.
absl::StatusOr<AttackSet> MakeAttackSet(const Eigen::VectorXd& d, double eta);
// Zero-width set of dimension n.
AttackSet ZeroAttackSet(int n);

struct AttackResult {
  // C_att in $.
  double cost = 0.0;
  // One vector for the bilevel attack; one worst-case vector per robust row
  // for the robust attack, aligned with `rows`.
  std::vector<Eigen::VectorXd> delta;
  std::vector<int> rows;
  int64_t node_count = 0;
  bool proven_optimal = true;
  SolveStatus status = SolveStatus::kOptimal;
};

// max b'delta over the attack set, solved in closed form as a continuous
// knapsack. Ties prefer lower bus indices. The dual certificate satisfies
// mu_hi - mu_lo + lambda*1 = b with mu_hi'hi - mu_lo'lo = value.
struct WorstShift {
  double value = 0.0;
  Eigen::VectorXd delta;
  double lambda = 0.0;
  Eigen::VectorXd mu_hi;
  Eigen::VectorXd mu_lo;
};
WorstShift WorstCaseShift(const Eigen::VectorXd& b, const AttackSet& delta);

// The same value through the dual LP min mu_hi'hi - mu_lo'lo subject to
// -mu_hi + mu_lo - lambda*1 = -b, mu >= 0.
absl::StatusOr<double> RobustRowValue(const Eigen::VectorXd& b,
                                      const AttackSet& delta);

struct BoAttackOptions {
  BranchOptions branch;
};

absl::StatusOr<AttackResult> BoAttack(const CompactModel& model,
                                      const Eigen::VectorXd& d,
                                      const AttackSet& delta,
                                      const BoAttackOptions& options = {});

// The bilevel attack as a complementarity program, with the variable layout.
struct BoProgram {
  MixedProgram program;
  int delta_offset = 0;
  int x_offset = 0;
  // Multiplier variable per compact row, -1 for rows that cannot bind.
  std::vector<int> nu_var;
  std::vector<int> w_var;
};
BoProgram BuildBoProgram(const CompactModel& model, const Eigen::VectorXd& d,
                         const AttackSet& delta);

absl::StatusOr<AttackResult> RoAttack(const CompactModel& model,
                                      const Eigen::VectorXd& d,
                                      const AttackSet& delta);

// Robust treatment for `rows` only; all other rows stay deterministic.
absl::StatusOr<AttackResult> RoAttackReduced(const CompactModel& model,
                                             const Eigen::VectorXd& d,
                                             const AttackSet& delta,
                                             const std::vector<int>& rows);

// The robust LP with its dual blocks, exposed for inspection and export.
struct RoLp {
  LinearProgram lp;
  std::vector<int> robust_rows;
};
absl::StatusOr<RoLp> BuildRoLp(const CompactModel& model,
                               const Eigen::VectorXd& d,
                               const AttackSet& delta,
                               const std::vector<int>& rows);

inline constexpr int kOracleMaxActive = 8;

// Vertices of {1'delta = 0, lo <= delta <= hi}.
std::vector<Eigen::VectorXd> EnumerateVertices(const AttackSet& delta);

// Exhaustive maximum of C_opf(d + delta) over the vertices of the attack set.
absl::StatusOr<AttackResult> OracleAttack(const CompactModel& model,
                                          const Eigen::VectorXd& d,
                                          const AttackSet& delta);

// 100 * (C_att^BO(d) - C_opf(d)) / C_opf(d).
absl::StatusOr<double> DamagePercent(const CompactModel& model,
                                     const Eigen::VectorXd& d_release,
                                     const AttackSet& delta,
                                     const BoAttackOptions& options = {});

}  // namespace gridsynth

#endif  // GRIDSYNTH_ATTACK_H_
