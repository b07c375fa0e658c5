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

// Post-processing of obfuscated loads into a synthetic release.
//
// The standard program minimizes |C_opf(d~) - C~| + gamma |d~ - d~0|_1 with
// the OPF embedded through its KKT conditions. The attack-aware programs add
// beta |C_att^RO(d~) - C~| with a second embedded block for the robust
// attack, either over every attackable row or over a selected subset.
//
// Two assembled forms exist. The full form lists the robust block with its
// per-row dual variables and their complementarity pairs. Because the attack
// set is fixed during post-processing, each row's inner maximization has a
// constant value r_k, so the reduced form replaces the block by the shifted
// rows a_k'x1 + b_k'd~ + e_k + r_k <= 0. Both forms have the same optimal
// value; the reduced form is the one solved.

#ifndef GRIDSYNTH_SYNTH_H_
#define GRIDSYNTH_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "gridsynth/attack.h"
#include "gridsynth/compact_model.h"
#include "gridsynth/dp.h"
#include "gridsynth/linear_program.h"

namespace gridsynth {

enum class ReleaseAlgorithm { kPp, kCro, kCroExp };
std::string ReleaseAlgorithmName(ReleaseAlgorithm algo);
absl::StatusOr<ReleaseAlgorithm> ParseReleaseAlgorithm(absl::string_view name);

enum class ProgramForm { kReduced, kFull };

struct SizeReport {
  std::string label;
  int64_t n_variables = 0;
  int64_t n_complementarities = 0;
};

SizeReport SizeOf(const MixedProgram& program, std::string label);

struct PostProcessSpec {
  // False selects the standard program.
  bool attack_block = false;
  AttackSet delta;
  // Rows with robust treatment in the attack block.
  std::vector<int> robust_rows;
  double beta = 1.0;
  double gamma = 1e-3;
  bool enforce_nonneg_loads = true;
  ProgramForm form = ProgramForm::kReduced;
};

struct PostProcessProgram {
  MixedProgram program;
  int d_offset = 0;
  int x2_offset = 0;
  // -1 without an attack block.
  int x1_offset = -1;
  // Per compact row, -1 when absent.
  std::vector<int> nu_var;
  std::vector<int> theta_var;
  // Per compact row, zero for deterministic rows.
  std::vector<double> robust_shift;
  // Variable indices of the absolute-value splits.
  int fidelity_pos = 0;
  int attack_pos = -1;
  int load_pos = 0;
  // Full form only, per robust row: first index of the n-blocks.
  struct RobustBlock {
    int row = 0;
    int lambda = 0;
    int mu_hi = 0;
    int mu_lo = 0;
    int zeta = 0;
    int pi_hi = 0;
    int pi_lo = 0;
  };
  std::vector<RobustBlock> blocks;
};

absl::StatusOr<PostProcessProgram> BuildPostProcess(
    const CompactModel& model, const ObfuscatedLoads& d0, double c_tilde,
    const PostProcessSpec& spec);

struct PostProcessOptions {
  int64_t node_limit = 1000000;
  // Coordinate line searches that seed the incumbent.
  bool line_search = true;
  // Candidates from the line search passed on as starts.
  int max_starts = 6;
  // Extra load vectors tried as starting points.
  std::vector<Eigen::VectorXd> warm_loads;
};

struct PostProcessResult {
  Eigen::VectorXd d_tilde;
  double objective = 0.0;
  // c'x2 and c'x1 at the returned point; x1 is absent without an attack
  // block and then equals c'x2.
  double embedded_normal_cost = 0.0;
  double embedded_attack_cost = 0.0;
  int64_t node_count = 0;
  int64_t lp_solves = 0;
  bool proven_optimal = false;
  SolveStatus status = SolveStatus::kIterLimit;
  double best_bound = 0.0;
  SizeReport solved_size;
};

// Objective of the post-processing program at a load vector, evaluated with
// direct LP solves. Infinite when the OPF is infeasible.
double PostProcessObjective(const CompactModel& model,
                            const ObfuscatedLoads& d0, double c_tilde,
                            const PostProcessSpec& spec,
                            const Eigen::VectorXd& d_tilde);

absl::StatusOr<PostProcessResult> SolvePostProcess(
    const CompactModel& model, const ObfuscatedLoads& d0, double c_tilde,
    const PostProcessSpec& spec, const PostProcessOptions& options = {});

absl::StatusOr<PostProcessResult> PostProcessPp(
    const CompactModel& model, const ObfuscatedLoads& d0, double c_tilde,
    double gamma, const PostProcessOptions& options = {});

absl::StatusOr<PostProcessResult> PostProcessCro(
    const CompactModel& model, const ObfuscatedLoads& d0, double c_tilde,
    const AttackSet& delta, double beta, double gamma,
    const PostProcessOptions& options = {});

absl::StatusOr<PostProcessResult> PostProcessCroExp(
    const CompactModel& model, const ObfuscatedLoads& d0, double c_tilde,
    const AttackSet& delta, const std::vector<int>& rows, double beta,
    double gamma, const PostProcessOptions& options = {});

// Structural size of the full assembled program for an algorithm. `rows` is
// used by CRO-Exp only.
absl::StatusOr<SizeReport> ReportSize(const CompactModel& model,
                                      ReleaseAlgorithm algo,
                                      const std::vector<int>& rows = {});

struct SynthConfig {
  double alpha = 20.0;
  double epsilon = 1.0;
  double eta = 0.05;
  double beta = 1.0;
  double gamma = 1e-3;
  // Zero disables row selection; the release then spends eps/2 + eps/2.
  int tau = 5;
  bool enforce_nonneg_loads = true;
  bool cost_sensitivity_includes_penalty = false;
  // Attack-aware releases re-solve with the frozen attack set widened to
  // cover eta * d~ until it does, at most this many solves in total. One
  // keeps the set derived from d~0 only.
  int attack_set_rounds = 4;
  PostProcessOptions solve;
};

struct SyntheticRelease {
  ReleaseAlgorithm algorithm = ReleaseAlgorithm::kPp;
  uint64_t seed = 0;
  Eigen::VectorXd d_tilde;
  Eigen::VectorXd d_initial;
  PrivacyParams privacy;
  Ledger ledger;
  // The frozen attack set used by the final post-processing solve.
  AttackSet delta;
  std::vector<int> rows;
  // Fidelity: C_opf(d~) and the noisy target C~.
  double c_opf = 0.0;
  double c_target = 0.0;
  // Resilience: the robust value at d~ over the frozen attack set, with all
  // attackable rows (CRO) or the selected rows (CRO-Exp). Equals c_opf for
  // the standard program.
  double c_att_ro = 0.0;
  PostProcessResult stats;
  SizeReport size;
  // Post-processing solves, including attack set widening.
  int rounds = 1;
};

// Runs one release. Only the two obfuscation queries and the row selection
// read `d`.
absl::StatusOr<SyntheticRelease> RunRelease(const CompactModel& model,
                                            const Eigen::VectorXd& d,
                                            ReleaseAlgorithm algo,
                                            const SynthConfig& config,
                                            uint64_t seed);

// Attack set derived from max(d~0, 0).
AttackSet FrozenAttackSet(const ObfuscatedLoads& d0, double eta);

}  // namespace gridsynth

#endif  // GRIDSYNTH_SYNTH_H_
