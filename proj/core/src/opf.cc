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

#include "gridsynth/opf.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace gridsynth {

OpfLp BuildOpfLp(const CompactModel& model, const Eigen::VectorXd& d) {
  OpfLp out;
  LinearProgram& lp = out.lp;
  for (int i = 0; i < model.n_gen; ++i) {
    lp.AddVariable(-kInfinity, kInfinity, model.c(i), absl::StrCat("p", i));
  }
  for (int j = 0; j < model.n_line; ++j) {
    lp.AddVariable(-kInfinity, kInfinity, model.c(model.n_gen + j),
                   absl::StrCat("v", j));
  }
  for (int k = 0; k < model.num_rows(); ++k) {
    if (!model.RowIsFinite(k)) continue;
    const CompactRow& row = model.rows[k];
    std::vector<LinearTerm> terms;
    for (int j = 0; j < model.num_vars(); ++j) {
      if (row.a(j) != 0.0) terms.push_back({j, row.a(j)});
    }
    double rhs = -row.e;
    if (row.depends_on_load) rhs -= row.b.dot(d);
    lp.AddRow(std::move(terms), Relation::kLessEqual, rhs, RowLabel(row));
    out.compact_row.push_back(k);
  }
  return out;
}

bool BalanceFeasible(const CompactModel& model, const Eigen::VectorXd& d,
                     std::string* why) {
  double cap = 0.0;
  double floor = 0.0;
  for (int i = 0; i < model.n_gen; ++i) {
    cap += model.p_max[i];
    floor += std::max(0.0, model.p_min[i]);
  }
  const double total = d.sum();
  const double tol = 1e-9 * (1.0 + std::abs(total));
  if (total > cap + tol) {
    if (why) {
      *why = absl::StrFormat("total load %.6f MW exceeds capacity %.6f MW",
                             total, cap);
    }
    return false;
  }
  if (total < floor - tol) {
    if (why) {
      *why = absl::StrFormat(
          "total load %.6f MW is below the minimum generation %.6f MW", total,
          floor);
    }
    return false;
  }
  return true;
}

OpfResult SolveOpf(const CompactModel& model, const Eigen::VectorXd& d) {
  OpfResult result;
  result.duals.assign(model.num_rows(), 0.0);
  if (d.size() != model.n_bus) {
    result.certificate = "load vector has the wrong length";
    return result;
  }
  if (!BalanceFeasible(model, d, &result.certificate)) return result;
  OpfLp opf = BuildOpfLp(model, d);
  Solution sol = SolveLp(opf.lp);
  result.status = sol.status;
  result.iterations = sol.iterations;
  if (sol.status != SolveStatus::kOptimal) {
    result.certificate =
        absl::StrCat("LP solve ended with status ", SolveStatusName(sol.status));
    return result;
  }
  result.feasible = true;
  result.x = Eigen::Map<const Eigen::VectorXd>(sol.primal.data(),
                                               model.num_vars());
  for (int j = 0; j < model.num_vars(); ++j) {
    if (std::abs(result.x(j)) < 1e-12) result.x(j) = 0.0;
  }
  result.p = result.x.head(model.n_gen);
  result.v = result.x.tail(model.n_line);
  result.cost = model.c.dot(result.x);
  for (size_t r = 0; r < opf.compact_row.size(); ++r) {
    result.duals[opf.compact_row[r]] = sol.duals[r];
  }
  return result;
}

}  // namespace gridsynth
