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

// Linear programs, linear programs with complementarity pairs, and the
// solvers for both.
//
// Dual convention. Every solve is carried out on the equivalent minimization
// problem. For that problem `Solution::duals[i]` is the KKT multiplier of
// row i written as g_i(x) <= 0, so it is nonnegative for both <= and >= rows
// at an optimum. Equality rows report d(objective)/d(rhs). `bound_duals[j]`
// is the reduced cost of variable j: nonnegative at a lower bound,
// nonpositive at an upper bound, zero for basic variables.

#ifndef GRIDSYNTH_LINEAR_PROGRAM_H_
#define GRIDSYNTH_LINEAR_PROGRAM_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"

namespace gridsynth {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };
enum class Sense { kMinimize, kMaximize };
enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

std::string SolveStatusName(SolveStatus status);

struct LinearTerm {
  int var;
  double coef;
};

struct Constraint {
  std::vector<LinearTerm> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  std::string name;
};

struct LinearProgram {
  Sense sense = Sense::kMinimize;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> names;
  // Bounds introduced for tractability rather than by the model. The audit
  // warns when a solution sits on one of them.
  std::vector<bool> artificial_bound;
  double objective_offset = 0.0;
  std::vector<Constraint> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int AddVariable(double lo, double hi, double cost, std::string name = "");
  int AddRow(std::vector<LinearTerm> terms, Relation relation, double rhs,
             std::string name = "");

  absl::Status Validate() const;
  double RowActivity(int row, const std::vector<double>& x) const;
  double ObjectiveValue(const std::vector<double>& x) const;
};

struct ComplementarityPair {
  // Nonnegative multiplier variable.
  int multiplier_var;
  // A <= row whose slack must vanish whenever the multiplier is positive.
  int row;
};

struct MixedProgram {
  LinearProgram lp;
  std::vector<ComplementarityPair> pairs;

  absl::Status Validate() const;
};

struct Solution {
  SolveStatus status = SolveStatus::kIterLimit;
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> duals;
  std::vector<double> bound_duals;
  int64_t node_count = 0;
  int64_t iterations = 0;
  double max_complementarity_residual = 0.0;
  // Complementarity solves only: the search space was exhausted.
  bool proven_optimal = false;
  // Best bound over unexplored nodes when the search was cut short.
  double best_bound = 0.0;
  // Farkas multipliers (infeasible) or a primal ray (unbounded).
  bool has_certificate = false;
  std::vector<double> certificate;
};

struct SimplexOptions {
  int64_t max_iterations = 500000;
  int bland_after_degenerate = 500;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  // Disables Bland's rule entirely. Test hook for cycling examples.
  bool never_bland = false;
};

Solution SolveLp(const LinearProgram& lp, const SimplexOptions& options = {});

// Primal minus dual objective of an optimal solution, on the minimization
// form. The dual objective prices each row at its rhs and each nonbasic
// variable at the bound its reduced cost points to.
double DualityGap(const LinearProgram& lp, const Solution& solution);

// Receives every SolveLp result, including branch-and-bound nodes. nullptr
// removes it. Calls are serialized across threads.
using LpSolveObserver =
    std::function<void(const LinearProgram&, const Solution&)>;
void SetLpSolveObserver(LpSolveObserver observer);

struct BranchOptions {
  int64_t node_limit = 1000000;
  double absolute_gap = 1e-9;
  double relative_gap = 0.0;
  // A pair counts as satisfied when min(multiplier, slack) is below this.
  double complementarity_tol = 1e-9;
  // Invoke the heuristic every this many nodes; 0 disables it.
  int heuristic_frequency = 1;
  // Local search over adjacent leaves from every new incumbent.
  bool leaf_descent = true;
  SimplexOptions lp;
};

// Proposes a complementarity-feasible primal point from a node's relaxed
// primal. Candidates are checked and polished by the solver.
using PrimalHeuristic = std::function<std::optional<std::vector<double>>(
    const std::vector<double>& relaxed)>;

Solution SolveComplementarity(const MixedProgram& mp,
                              const BranchOptions& options = {},
                              const PrimalHeuristic& heuristic = nullptr,
                              const std::vector<std::vector<double>>& starts =
                                  {});

struct AuditFinding {
  enum class Kind {
    kPrimalInfeasible,
    kBoundViolation,
    kDualInfeasible,
    kStationarity,
    kComplementarity,
    kBoundActive,
    kDimension,
  };
  Kind kind;
  int index = -1;
  double magnitude = 0.0;
  std::string message;
};

struct AuditOptions {
  double tolerance = 1e-7;
  double bound_active_tol = 1e-6;
  // Check the returned duals against LP stationarity. Only meaningful for
  // programs without complementarity pairs.
  bool check_duals = true;
};

std::vector<AuditFinding> AuditSolution(const MixedProgram& mp,
                                        const Solution& solution,
                                        const AuditOptions& options = {});

// CPLEX LP format text of `lp`.
std::string WriteLpFile(const LinearProgram& lp);

// LP format text with complementarity pairs written as big-M disjunctions
// over binaries. M defaults to 1e4 times the largest objective or rhs
// magnitude.
std::string WriteBigMLpFile(const MixedProgram& mp,
                            std::optional<double> big_m = std::nullopt);
double DefaultBigM(const MixedProgram& mp);

}  // namespace gridsynth

#endif  // GRIDSYNTH_LINEAR_PROGRAM_H_
