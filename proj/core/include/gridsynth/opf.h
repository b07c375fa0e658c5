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

// DC-OPF solves over a compact model.

#ifndef GRIDSYNTH_OPF_H_
#define GRIDSYNTH_OPF_H_

#include <string>
#include <vector>

#include "Eigen/Dense"
#include "gridsynth/compact_model.h"
#include "gridsynth/linear_program.h"

namespace gridsynth {

struct OpfResult {
  bool feasible = false;
  // C_opf(d) in $.
  double cost = 0.0;
  Eigen::VectorXd p;
  Eigen::VectorXd v;
  // Stacked [p; v].
  Eigen::VectorXd x;
  // One nonnegative multiplier per compact row; zero for rows that cannot
  // bind.
  std::vector<double> duals;
  // Why the load is infeasible, when it is.
  std::string certificate;
  SolveStatus status = SolveStatus::kInfeasible;
  int64_t iterations = 0;
};

struct OpfLp {
  LinearProgram lp;
  // Compact row index of each LP row.
  std::vector<int> compact_row;
};

// min c'x s.t. a_k'x <= -b_k'd - e_k over the rows with finite e_k. The
// variables are free; nonnegativity lives in the NonNeg rows.
OpfLp BuildOpfLp(const CompactModel& model, const Eigen::VectorXd& d);

OpfResult SolveOpf(const CompactModel& model, const Eigen::VectorXd& d);

// Balance feasibility of a load vector: Σ max(0, p_min) <= 1'd <= Σ p_max.
bool BalanceFeasible(const CompactModel& model, const Eigen::VectorXd& d,
                     std::string* why = nullptr);

}  // namespace gridsynth

#endif  // GRIDSYNTH_OPF_H_
