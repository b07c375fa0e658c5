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

// Compact algebraic form of the DC-OPF.
//
// The decision vector is x = [p; v] with one dispatch entry per generator and
// one flow-violation entry per line. Every constraint is a row
//
//   a_k' x + b_k' d + e_k <= 0
//
// with canonical ordering GenUpper, GenLower, BalanceUpper, BalanceLower,
// FlowUpper, FlowLower, NonNegP, NonNegV. Lines without a thermal limit keep
// their flow rows with e_k = -inf; such rows can never bind.

#ifndef GRIDSYNTH_COMPACT_MODEL_H_
#define GRIDSYNTH_COMPACT_MODEL_H_

#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "gridsynth/case_io.h"

namespace gridsynth {

enum class RowTag {
  kGenUpper,
  kGenLower,
  kBalanceUpper,
  kBalanceLower,
  kFlowUpper,
  kFlowLower,
  kNonNegP,
  kNonNegV,
};

struct RowKind {
  RowTag tag;
  // Generator, line or variable index within the block.
  int index = 0;
  bool operator==(const RowKind&) const = default;
};

struct CompactRow {
  Eigen::VectorXd a;  // over x
  Eigen::VectorXd b;  // over buses
  double e = 0.0;
  RowKind kind;
  bool depends_on_load = false;
};

struct PenaltyConfig {
  // Uniform violation penalty in $/MW. Zero selects 10x the largest
  // generator cost.
  double psi = 0.0;
  // Optional per-line override; empty means uniform.
  std::vector<double> per_line;
};

struct CompactModel {
  Eigen::VectorXd c;
  std::vector<CompactRow> rows;
  int n_bus = 0;
  int n_gen = 0;
  int n_line = 0;
  double psi = 0.0;
  // Largest generator cost, the default cost-query sensitivity factor.
  double max_gen_cost = 0.0;
  std::vector<double> p_max;
  std::vector<double> p_min;

  int num_vars() const { return n_gen + n_line; }
  int num_rows() const { return static_cast<int>(rows.size()); }
  // Expected row count 2G + 2 + 2L + G + L.
  static int ExpectedRows(int n_gen, int n_line) {
    return 3 * n_gen + 2 + 3 * n_line;
  }
  // First row index of each block.
  int FirstRow(RowTag tag) const;
  // a_k' x + b_k' d + e_k.
  double RowValue(int k, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& d) const;
  // True when the row has a finite e_k and therefore can bind.
  bool RowIsFinite(int k) const;
  double Cost(const Eigen::VectorXd& x) const { return c.dot(x); }
};

// 10x the largest generator cost, or 1 when all costs are zero.
double DefaultPsi(const GridCase& grid);

absl::StatusOr<CompactModel> BuildCompact(const GridCase& grid,
                                          const PtdfMatrix& ptdf,
                                          const PenaltyConfig& penalty);

// Convenience wrapper: PTDF with the case slack and default penalty.
absl::StatusOr<CompactModel> BuildCompact(const GridCase& grid);

// Rows with b_k not identically zero, i.e. the balance and flow rows.
std::vector<int> AttackableRows(const CompactModel& model);

std::string RowTagName(RowTag tag);
std::string RowLabel(const CompactRow& row);

// CPLEX LP text of min c'x over the model rows at load `d`.
std::string ExportCompactLp(const CompactModel& model,
                            const Eigen::VectorXd& d);

}  // namespace gridsynth

#endif  // GRIDSYNTH_COMPACT_MODEL_H_
