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

#include "gridsynth/compact_model.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "gridsynth/linear_program.h"
#include "gridsynth/opf.h"

namespace gridsynth {

int CompactModel::FirstRow(RowTag tag) const {
  switch (tag) {
    case RowTag::kGenUpper:
      return 0;
    case RowTag::kGenLower:
      return n_gen;
    case RowTag::kBalanceUpper:
      return 2 * n_gen;
    case RowTag::kBalanceLower:
      return 2 * n_gen + 1;
    case RowTag::kFlowUpper:
      return 2 * n_gen + 2;
    case RowTag::kFlowLower:
      return 2 * n_gen + 2 + n_line;
    case RowTag::kNonNegP:
      return 2 * n_gen + 2 + 2 * n_line;
    case RowTag::kNonNegV:
      return 3 * n_gen + 2 + 2 * n_line;
  }
  return -1;
}

double CompactModel::RowValue(int k, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& d) const {
  const CompactRow& row = rows[k];
  double value = row.a.dot(x) + row.e;
  if (row.depends_on_load) value += row.b.dot(d);
  return value;
}

bool CompactModel::RowIsFinite(int k) const { return std::isfinite(rows[k].e); }

double DefaultPsi(const GridCase& grid) {
  const double max_cost = grid.MaxGeneratorCost();
  return max_cost > 0.0 ? 10.0 * max_cost : 1.0;
}

absl::StatusOr<CompactModel> BuildCompact(const GridCase& grid,
                                          const PtdfMatrix& ptdf,
                                          const PenaltyConfig& penalty) {
  const int n = grid.num_buses();
  const int g = grid.num_generators();
  const int l = grid.num_branches();
  if (ptdf.entries.rows() != l || ptdf.entries.cols() != n) {
    return absl::InvalidArgumentError("PTDF dimensions do not match the case");
  }
  const double max_cost = grid.MaxGeneratorCost();
  std::vector<double> psi(l, penalty.psi > 0.0 ? penalty.psi : DefaultPsi(grid));
  if (!penalty.per_line.empty()) {
    if (static_cast<int>(penalty.per_line.size()) != l) {
      return absl::InvalidArgumentError("per-line penalty has wrong length");
    }
    psi = penalty.per_line;
  }
  for (double value : psi) {
    if (!(value > max_cost)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "penalty %g must exceed the largest generator cost %g", value,
          max_cost));
    }
  }

  CompactModel model;
  model.n_bus = n;
  model.n_gen = g;
  model.n_line = l;
  model.psi = *std::min_element(psi.begin(), psi.end());
  if (l == 0) model.psi = penalty.psi > 0.0 ? penalty.psi : DefaultPsi(grid);
  model.max_gen_cost = max_cost;
  const int nx = g + l;
  model.c = Eigen::VectorXd::Zero(nx);
  for (int i = 0; i < g; ++i) {
    model.c(i) = grid.generators[i].cost;
    model.p_max.push_back(grid.generators[i].p_max);
    model.p_min.push_back(grid.generators[i].p_min);
  }
  for (int j = 0; j < l; ++j) model.c(g + j) = psi[j];

  // Injection map M: bus-by-generator incidence, so net injection is Mp - d.
  Eigen::MatrixXd gen_map = Eigen::MatrixXd::Zero(n, g);
  for (int i = 0; i < g; ++i) {
    gen_map(grid.BusIndex(grid.generators[i].bus), i) = 1.0;
  }
  const Eigen::MatrixXd flow_of_p = ptdf.entries * gen_map;

  auto make_row = [&](RowTag tag, int index) {
    CompactRow row;
    row.a = Eigen::VectorXd::Zero(nx);
    row.b = Eigen::VectorXd::Zero(n);
    row.kind = {tag, index};
    return row;
  };
  for (int i = 0; i < g; ++i) {
    CompactRow row = make_row(RowTag::kGenUpper, i);
    row.a(i) = 1.0;
    row.e = -grid.generators[i].p_max;
    model.rows.push_back(std::move(row));
  }
  for (int i = 0; i < g; ++i) {
    CompactRow row = make_row(RowTag::kGenLower, i);
    row.a(i) = -1.0;
    row.e = grid.generators[i].p_min;
    model.rows.push_back(std::move(row));
  }
  for (double sign : {1.0, -1.0}) {
    CompactRow row = make_row(
        sign > 0 ? RowTag::kBalanceUpper : RowTag::kBalanceLower, 0);
    row.a.head(g).setConstant(sign);
    row.b.setConstant(-sign);
    row.depends_on_load = true;
    model.rows.push_back(std::move(row));
  }
  for (double sign : {1.0, -1.0}) {
    for (int j = 0; j < l; ++j) {
      CompactRow row =
          make_row(sign > 0 ? RowTag::kFlowUpper : RowTag::kFlowLower, j);
      row.a.head(g) = sign * flow_of_p.row(j).transpose();
      row.a(g + j) = -1.0;
      row.b = -sign * ptdf.entries.row(j).transpose();
      row.e = -grid.branches[j].capacity_mw;
      row.depends_on_load = row.b.cwiseAbs().maxCoeff() > 0.0;
      model.rows.push_back(std::move(row));
    }
  }
  for (int i = 0; i < g; ++i) {
    CompactRow row = make_row(RowTag::kNonNegP, i);
    row.a(i) = -1.0;
    model.rows.push_back(std::move(row));
  }
  for (int j = 0; j < l; ++j) {
    CompactRow row = make_row(RowTag::kNonNegV, j);
    row.a(g + j) = -1.0;
    model.rows.push_back(std::move(row));
  }
  return model;
}

absl::StatusOr<CompactModel> BuildCompact(const GridCase& grid) {
  auto ptdf = ComputePtdf(grid);
  if (!ptdf.ok()) return ptdf.status();
  return BuildCompact(grid, *ptdf, PenaltyConfig{});
}

std::vector<int> AttackableRows(const CompactModel& model) {
  std::vector<int> rows;
  for (int k = 0; k < model.num_rows(); ++k) {
    const RowTag tag = model.rows[k].kind.tag;
    const bool load_kind = tag == RowTag::kBalanceUpper ||
                           tag == RowTag::kBalanceLower ||
                           tag == RowTag::kFlowUpper ||
                           tag == RowTag::kFlowLower;
    if (load_kind && model.rows[k].depends_on_load) rows.push_back(k);
  }
  return rows;
}

std::string RowTagName(RowTag tag) {
  switch (tag) {
    case RowTag::kGenUpper:
      return "GenUpper";
    case RowTag::kGenLower:
      return "GenLower";
    case RowTag::kBalanceUpper:
      return "BalanceUpper";
    case RowTag::kBalanceLower:
      return "BalanceLower";
    case RowTag::kFlowUpper:
      return "FlowUpper";
    case RowTag::kFlowLower:
      return "FlowLower";
    case RowTag::kNonNegP:
      return "NonNegP";
    case RowTag::kNonNegV:
      return "NonNegV";
  }
  return "Unknown";
}

std::string RowLabel(const CompactRow& row) {
  return absl::StrCat(RowTagName(row.kind.tag), "_", row.kind.index);
}

std::string ExportCompactLp(const CompactModel& model,
                            const Eigen::VectorXd& d) {
  return WriteLpFile(BuildOpfLp(model, d).lp);
}

}  // namespace gridsynth
