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

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"
#include "gridsynth/linear_program.h"

namespace gridsynth {

std::string SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "Optimal";
    case SolveStatus::kInfeasible:
      return "Infeasible";
    case SolveStatus::kUnbounded:
      return "Unbounded";
    case SolveStatus::kIterLimit:
      return "IterLimit";
  }
  return "Unknown";
}

int LinearProgram::AddVariable(double lo, double hi, double cost,
                               std::string name) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  names.push_back(std::move(name));
  artificial_bound.push_back(false);
  return num_vars() - 1;
}

int LinearProgram::AddRow(std::vector<LinearTerm> terms, Relation relation,
                          double rhs, std::string name) {
  rows.push_back({std::move(terms), relation, rhs, std::move(name)});
  return num_rows() - 1;
}

absl::Status LinearProgram::Validate() const {
  const size_t n = objective.size();
  if (lower.size() != n || upper.size() != n) {
    return absl::InvalidArgumentError("bound vectors do not match objective");
  }
  for (size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j]) || std::isnan(lower[j]) ||
        std::isnan(upper[j]) || lower[j] == kInfinity ||
        upper[j] == -kInfinity) {
      return absl::InvalidArgumentError(
          absl::StrFormat("variable %d has invalid data", j));
    }
  }
  for (int i = 0; i < num_rows(); ++i) {
    const Constraint& row = rows[i];
    if (!std::isfinite(row.rhs)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("row %d has a nonfinite rhs", i));
    }
    for (const LinearTerm& t : row.terms) {
      if (t.var < 0 || t.var >= num_vars() || !std::isfinite(t.coef)) {
        return absl::InvalidArgumentError(
            absl::StrFormat("row %d has an invalid term", i));
      }
    }
  }
  return absl::OkStatus();
}

double LinearProgram::RowActivity(int row, const std::vector<double>& x) const {
  double sum = 0.0;
  for (const LinearTerm& t : rows[row].terms) sum += t.coef * x[t.var];
  return sum;
}

double LinearProgram::ObjectiveValue(const std::vector<double>& x) const {
  double sum = objective_offset;
  for (int j = 0; j < num_vars(); ++j) sum += objective[j] * x[j];
  return sum;
}

absl::Status MixedProgram::Validate() const {
  if (absl::Status s = lp.Validate(); !s.ok()) return s;
  for (size_t p = 0; p < pairs.size(); ++p) {
    const ComplementarityPair& pair = pairs[p];
    if (pair.multiplier_var < 0 || pair.multiplier_var >= lp.num_vars() ||
        pair.row < 0 || pair.row >= lp.num_rows()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("pair %d has an invalid index", p));
    }
    if (lp.lower[pair.multiplier_var] != 0.0) {
      return absl::InvalidArgumentError(
          absl::StrFormat("pair %d multiplier must have lower bound 0", p));
    }
    if (lp.rows[pair.row].relation != Relation::kLessEqual) {
      return absl::InvalidArgumentError(
          absl::StrFormat("pair %d row must be a <= row", p));
    }
  }
  return absl::OkStatus();
}

std::vector<AuditFinding> AuditSolution(const MixedProgram& mp,
                                        const Solution& solution,
                                        const AuditOptions& options) {
  using Kind = AuditFinding::Kind;
  std::vector<AuditFinding> findings;
  const LinearProgram& lp = mp.lp;
  const std::vector<double>& x = solution.primal;
  const double tol = options.tolerance;
  if (static_cast<int>(x.size()) != lp.num_vars()) {
    findings.push_back({Kind::kDimension, -1, 0.0,
                        "primal vector has the wrong dimension"});
    return findings;
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double below = lp.lower[j] - x[j];
    const double above = x[j] - lp.upper[j];
    const double viol = std::max(below, above);
    if (viol > tol * (1.0 + std::abs(x[j]))) {
      findings.push_back(
          {Kind::kBoundViolation, j, viol,
           absl::StrFormat("variable %d (%s) violates its bounds by %g", j,
                           lp.names[j], viol)});
    }
    if (j < static_cast<int>(lp.artificial_bound.size()) &&
        lp.artificial_bound[j]) {
      for (double bound : {lp.lower[j], lp.upper[j]}) {
        if (std::isfinite(bound) &&
            std::abs(x[j] - bound) <= options.bound_active_tol) {
          findings.push_back(
              {Kind::kBoundActive, j, std::abs(x[j] - bound),
               absl::StrFormat("bound-active: variable %d (%s) sits at its "
                               "artificial bound %g",
                               j, lp.names[j], bound)});
        }
      }
    }
  }
  std::vector<double> slack(lp.num_rows());
  for (int i = 0; i < lp.num_rows(); ++i) {
    const Constraint& row = lp.rows[i];
    const double activity = lp.RowActivity(i, x);
    double viol = 0.0;
    switch (row.relation) {
      case Relation::kLessEqual:
        viol = activity - row.rhs;
        slack[i] = row.rhs - activity;
        break;
      case Relation::kGreaterEqual:
        viol = row.rhs - activity;
        slack[i] = activity - row.rhs;
        break;
      case Relation::kEqual:
        viol = std::abs(activity - row.rhs);
        slack[i] = 0.0;
        break;
    }
    if (viol > tol * (1.0 + std::abs(row.rhs))) {
      findings.push_back(
          {Kind::kPrimalInfeasible, i, viol,
           absl::StrFormat("row %d (%s) is violated by %g", i, row.name,
                           viol)});
    }
  }
  for (size_t p = 0; p < mp.pairs.size(); ++p) {
    const ComplementarityPair& pair = mp.pairs[p];
    const double residual =
        std::min(std::abs(x[pair.multiplier_var]), std::abs(slack[pair.row]));
    if (residual > tol) {
      findings.push_back(
          {Kind::kComplementarity, static_cast<int>(p), residual,
           absl::StrFormat("pair %d (row %s) has complementarity residual %g",
                           p, lp.rows[pair.row].name, residual)});
    }
  }

  const bool have_duals =
      static_cast<int>(solution.duals.size()) == lp.num_rows() &&
      static_cast<int>(solution.bound_duals.size()) == lp.num_vars();
  if (options.check_duals && mp.pairs.empty() && have_duals) {
    const double sign = lp.sense == Sense::kMinimize ? 1.0 : -1.0;
    std::vector<double> residual(lp.num_vars());
    double cost_scale = 1.0;
    for (int j = 0; j < lp.num_vars(); ++j) {
      residual[j] = sign * lp.objective[j] - solution.bound_duals[j];
      cost_scale = std::max(cost_scale, std::abs(lp.objective[j]));
    }
    for (int i = 0; i < lp.num_rows(); ++i) {
      const Constraint& row = lp.rows[i];
      const double nu = solution.duals[i];
      const double w = row.relation == Relation::kLessEqual ? -nu : nu;
      if (row.relation != Relation::kEqual && nu < -tol * cost_scale) {
        findings.push_back(
            {Kind::kDualInfeasible, i, -nu,
             absl::StrFormat("row %d dual %g has the wrong sign", i, nu)});
      }
      if (row.relation != Relation::kEqual &&
          std::abs(nu) * std::abs(slack[i]) >
              tol * cost_scale * (1.0 + std::abs(row.rhs))) {
        findings.push_back(
            {Kind::kComplementarity, i, std::abs(nu * slack[i]),
             absl::StrFormat("row %d dual %g with slack %g", i, nu,
                             slack[i])});
      }
      for (const LinearTerm& t : row.terms) residual[t.var] -= w * t.coef;
    }
    for (int j = 0; j < lp.num_vars(); ++j) {
      if (std::abs(residual[j]) > tol * cost_scale) {
        findings.push_back(
            {Kind::kStationarity, j, std::abs(residual[j]),
             absl::StrFormat("stationarity residual %g at variable %d",
                             residual[j], j)});
      }
      const double z = solution.bound_duals[j];
      const bool at_lower = std::abs(x[j] - lp.lower[j]) <= tol * (1 + std::abs(x[j]));
      const bool at_upper = std::abs(x[j] - lp.upper[j]) <= tol * (1 + std::abs(x[j]));
      if ((z > tol * cost_scale && !at_lower) ||
          (z < -tol * cost_scale && !at_upper)) {
        findings.push_back(
            {Kind::kDualInfeasible, j, std::abs(z),
             absl::StrFormat("reduced cost %g at variable %d is not "
                             "supported by an active bound",
                             z, j)});
      }
    }
  }
  return findings;
}

}  // namespace gridsynth
