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

#include "gridsynth/attack.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "gridsynth/opf.h"

namespace gridsynth {
namespace {

bool Active(const AttackSet& set, int i) {
  return set.delta_hi[i] - set.delta_lo[i] > 0.0;
}

absl::Status CheckDimensions(const CompactModel& model,
                             const Eigen::VectorXd& d,
                             const AttackSet& delta) {
  if (d.size() != model.n_bus || delta.size() != model.n_bus ||
      delta.delta_hi.size() != model.n_bus) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dimension mismatch: model has %d buses, load %d, attack set %d",
        model.n_bus, d.size(), delta.size()));
  }
  return absl::OkStatus();
}

absl::Status RequireFeasible(const CompactModel& model,
                             const Eigen::VectorXd& d, OpfResult* base) {
  *base = SolveOpf(model, d);
  if (!base->feasible) {
    return absl::FailedPreconditionError(
        absl::StrCat("OPF infeasible at the nominal load: ", base->certificate));
  }
  return absl::OkStatus();
}

}  // namespace

int AttackSet::NumActive() const {
  int count = 0;
  for (int i = 0; i < size(); ++i) count += Active(*this, i) ? 1 : 0;
  return count;
}

bool AttackSet::Contains(const Eigen::VectorXd& delta, double tol) const {
  if (delta.size() != size()) return false;
  for (int i = 0; i < size(); ++i) {
    if (delta[i] < delta_lo[i] - tol || delta[i] > delta_hi[i] + tol) {
      return false;
    }
  }
  return std::abs(delta.sum()) <= tol;
}

absl::StatusOr<AttackSet> MakeAttackSet(const Eigen::VectorXd& d, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta must be a finite nonnegative number, got ", eta));
  }
  for (int i = 0; i < d.size(); ++i) {
    if (!(d[i] >= 0.0)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "negative load %g at bus index %d cannot define attack bounds", d[i],
          i));
    }
  }
  AttackSet set;
  set.delta_hi = eta * d;
  set.delta_lo = -eta * d;
  set.eta = eta;
  return set;
}

AttackSet ZeroAttackSet(int n) {
  AttackSet set;
  set.delta_lo = Eigen::VectorXd::Zero(n);
  set.delta_hi = Eigen::VectorXd::Zero(n);
  set.eta = 0.0;
  return set;
}

WorstShift WorstCaseShift(const Eigen::VectorXd& b, const AttackSet& delta) {
  const int n = delta.size();
  WorstShift out;
  out.delta = delta.delta_lo;
  double budget = -delta.delta_lo.sum();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return b[i] > b[j]; });
  // The marginal coordinate prices the zero-sum constraint.
  int marginal = -1;
  for (int i : order) {
    const double room = delta.delta_hi[i] - delta.delta_lo[i];
    if (room <= 0.0) continue;
    if (budget <= 0.0) {
      if (marginal < 0) marginal = i;
      break;
    }
    const double step = std::min(room, budget);
    out.delta[i] += step;
    budget -= step;
    marginal = i;
  }
  // Rounding in the running budget can leave a tiny imbalance.
  const double residual = out.delta.sum();
  if (residual != 0.0) {
    for (int i : order) {
      const double target = out.delta[i] - residual;
      if (target >= delta.delta_lo[i] && target <= delta.delta_hi[i]) {
        out.delta[i] = target;
        break;
      }
    }
  }
  out.value = b.dot(out.delta);
  out.lambda = marginal >= 0 ? b[marginal] : 0.0;
  out.mu_hi = (b.array() - out.lambda).max(0.0).matrix();
  out.mu_lo = (out.lambda - b.array()).max(0.0).matrix();
  return out;
}

absl::StatusOr<double> RobustRowValue(const Eigen::VectorXd& b,
                                      const AttackSet& delta) {
  const int n = delta.size();
  if (b.size() != n) {
    return absl::InvalidArgumentError("row and attack set dimensions differ");
  }
  LinearProgram lp;
  const int lambda = lp.AddVariable(-kInfinity, kInfinity, 0.0, "lambda");
  for (int i = 0; i < n; ++i) {
    const int hi = lp.AddVariable(0.0, kInfinity, delta.delta_hi[i]);
    const int lo = lp.AddVariable(0.0, kInfinity, -delta.delta_lo[i]);
    lp.AddRow({{hi, -1.0}, {lo, 1.0}, {lambda, -1.0}}, Relation::kEqual, -b[i]);
  }
  const Solution sol = SolveLp(lp);
  if (sol.status != SolveStatus::kOptimal) {
    return absl::InternalError(absl::StrCat("robust row dual LP ended ",
                                            SolveStatusName(sol.status)));
  }
  return sol.objective;
}

BoProgram BuildBoProgram(const CompactModel& model, const Eigen::VectorXd& d,
                         const AttackSet& delta) {
  BoProgram out;
  LinearProgram& lp = out.program.lp;
  lp.sense = Sense::kMaximize;
  const int n = model.n_bus;
  const int nx = model.num_vars();

  out.delta_offset = 0;
  for (int i = 0; i < n; ++i) {
    lp.AddVariable(delta.delta_lo[i], delta.delta_hi[i], 0.0,
                   absl::StrCat("delta_", i));
  }
  out.x_offset = lp.num_vars();
  for (int j = 0; j < nx; ++j) {
    const std::string name =
        j < model.n_gen ? absl::StrCat("p_", j)
                        : absl::StrCat("v_", j - model.n_gen);
    lp.AddVariable(-kInfinity, kInfinity, model.c[j], name);
  }
  out.nu_var.assign(model.num_rows(), -1);
  out.w_var.assign(model.num_rows(), -1);
  for (int k = 0; k < model.num_rows(); ++k) {
    if (!model.RowIsFinite(k)) continue;
    const CompactRow& row = model.rows[k];
    double upper = kInfinity;
    if (row.kind.tag == RowTag::kFlowUpper ||
        row.kind.tag == RowTag::kFlowLower) {
      // Implied by stationarity in v: nu_up + nu_lo + nu_nonneg = psi_l.
      upper = model.c[model.n_gen + row.kind.index];
    }
    out.nu_var[k] =
        lp.AddVariable(0.0, upper, 0.0, absl::StrCat("nu_", RowLabel(row)));
  }

  std::vector<LinearTerm> zero_sum;
  for (int i = 0; i < n; ++i) {
    if (Active(delta, i)) zero_sum.push_back({i, 1.0});
  }
  lp.AddRow(std::move(zero_sum), Relation::kEqual, 0.0, "zero_sum");

  for (int k = 0; k < model.num_rows(); ++k) {
    if (out.nu_var[k] < 0) continue;
    const CompactRow& row = model.rows[k];
    std::vector<LinearTerm> terms;
    for (int j = 0; j < nx; ++j) {
      if (row.a[j] != 0.0) terms.push_back({out.x_offset + j, row.a[j]});
    }
    for (int i = 0; i < n; ++i) {
      if (row.b[i] != 0.0 && Active(delta, i)) terms.push_back({i, row.b[i]});
    }
    const int r = lp.AddRow(std::move(terms), Relation::kLessEqual,
                            -row.b.dot(d) - row.e, RowLabel(row));
    out.program.pairs.push_back({out.nu_var[k], r});
  }

  for (int j = 0; j < nx; ++j) {
    std::vector<LinearTerm> terms;
    for (int k = 0; k < model.num_rows(); ++k) {
      if (out.nu_var[k] >= 0 && model.rows[k].a[j] != 0.0) {
        terms.push_back({out.nu_var[k], model.rows[k].a[j]});
      }
    }
    lp.AddRow(std::move(terms), Relation::kEqual, -model.c[j],
              absl::StrCat("stationarity_", j));
  }

  // Strong-duality cut c'x <= sum_k nu_k (b_k'd + e_k) + sum_k w_k with
  // w_k = nu_k * b_k'delta bounded above by McCormick envelopes.
  std::vector<LinearTerm> cut;
  for (int j = 0; j < nx; ++j) {
    if (model.c[j] != 0.0) cut.push_back({out.x_offset + j, model.c[j]});
  }
  for (int k = 0; k < model.num_rows(); ++k) {
    if (out.nu_var[k] < 0) continue;
    const CompactRow& row = model.rows[k];
    const double constant = row.b.dot(d) + row.e;
    if (constant != 0.0) cut.push_back({out.nu_var[k], -constant});
    const bool flow = row.kind.tag == RowTag::kFlowUpper ||
                      row.kind.tag == RowTag::kFlowLower;
    if (!flow || !row.depends_on_load) continue;
    const double g_hi = WorstCaseShift(row.b, delta).value;
    const double g_lo = -WorstCaseShift(-row.b, delta).value;
    if (g_hi == 0.0 && g_lo == 0.0) continue;
    const double u = lp.upper[out.nu_var[k]];
    const int w = lp.AddVariable(-kInfinity, kInfinity, 0.0,
                                 absl::StrCat("w_", RowLabel(row)));
    out.w_var[k] = w;
    std::vector<LinearTerm> envelope = {{w, 1.0}, {out.nu_var[k], -g_lo}};
    for (int i = 0; i < n; ++i) {
      if (row.b[i] != 0.0 && Active(delta, i)) {
        envelope.push_back({i, -u * row.b[i]});
      }
    }
    lp.AddRow(std::move(envelope), Relation::kLessEqual, -u * g_lo,
              absl::StrCat("mccormick_a_", k));
    lp.AddRow({{w, 1.0}, {out.nu_var[k], -g_hi}}, Relation::kLessEqual, 0.0,
              absl::StrCat("mccormick_b_", k));
    cut.push_back({w, -1.0});
  }
  lp.AddRow(std::move(cut), Relation::kLessEqual, 0.0, "strong_duality");
  return out;
}

namespace {

// Full program point from a load shift, using the OPF solution at d + shift.
std::optional<std::vector<double>> KktPoint(const CompactModel& model,
                                            const Eigen::VectorXd& d,
                                            const BoProgram& bo,
                                            const Eigen::VectorXd& shift) {
  const OpfResult opf = SolveOpf(model, d + shift);
  if (!opf.feasible) return std::nullopt;
  std::vector<double> point(bo.program.lp.num_vars(), 0.0);
  for (int i = 0; i < shift.size(); ++i) point[bo.delta_offset + i] = shift[i];
  for (int j = 0; j < model.num_vars(); ++j) point[bo.x_offset + j] = opf.x[j];
  for (int k = 0; k < model.num_rows(); ++k) {
    if (bo.nu_var[k] < 0) continue;
    point[bo.nu_var[k]] = opf.duals[k];
    if (bo.w_var[k] >= 0) {
      point[bo.w_var[k]] = opf.duals[k] * model.rows[k].b.dot(shift);
    }
  }
  return point;
}

Eigen::VectorXd Project(const Eigen::VectorXd& raw, const AttackSet& delta) {
  Eigen::VectorXd shift = raw.cwiseMax(delta.delta_lo).cwiseMin(delta.delta_hi);
  for (int i = 0; i < shift.size(); ++i) {
    if (!Active(delta, i)) shift[i] = 0.0;
  }
  // Spread any imbalance over coordinates with room left.
  for (int pass = 0; pass < 4; ++pass) {
    const double excess = shift.sum();
    if (std::abs(excess) <= 1e-12) break;
    double room = 0.0;
    for (int i = 0; i < shift.size(); ++i) {
      room += excess > 0 ? shift[i] - delta.delta_lo[i]
                         : delta.delta_hi[i] - shift[i];
    }
    if (room <= 0.0) break;
    const double ratio = std::min(1.0, std::abs(excess) / room);
    for (int i = 0; i < shift.size(); ++i) {
      shift[i] += excess > 0 ? -ratio * (shift[i] - delta.delta_lo[i])
                             : ratio * (delta.delta_hi[i] - shift[i]);
    }
  }
  return shift;
}

}  // namespace

absl::StatusOr<AttackResult> BoAttack(const CompactModel& model,
                                      const Eigen::VectorXd& d,
                                      const AttackSet& delta,
                                      const BoAttackOptions& options) {
  if (absl::Status s = CheckDimensions(model, d, delta); !s.ok()) return s;
  OpfResult base;
  if (absl::Status s = RequireFeasible(model, d, &base); !s.ok()) return s;
  const int n = model.n_bus;
  if (delta.NumActive() <= 1) {
    AttackResult out;
    out.cost = base.cost;
    out.delta.push_back(Eigen::VectorXd::Zero(n));
    out.node_count = 1;
    return out;
  }

  const BoProgram bo = BuildBoProgram(model, d, delta);
  std::vector<std::vector<double>> starts;
  if (auto p = KktPoint(model, d, bo, Eigen::VectorXd::Zero(n))) {
    starts.push_back(std::move(*p));
  }
  for (int k : AttackableRows(model)) {
    if (!model.rows[k].depends_on_load || !model.RowIsFinite(k)) continue;
    const RowTag tag = model.rows[k].kind.tag;
    if (tag != RowTag::kFlowUpper && tag != RowTag::kFlowLower) continue;
    const WorstShift w = WorstCaseShift(model.rows[k].b, delta);
    if (auto p = KktPoint(model, d, bo, w.delta)) starts.push_back(std::move(*p));
  }
  const PrimalHeuristic heuristic =
      [&](const std::vector<double>& relaxed)
      -> std::optional<std::vector<double>> {
    Eigen::VectorXd raw(n);
    for (int i = 0; i < n; ++i) raw[i] = relaxed[bo.delta_offset + i];
    return KktPoint(model, d, bo, Project(raw, delta));
  };

  const Solution sol =
      SolveComplementarity(bo.program, options.branch, heuristic, starts);
  if (sol.status == SolveStatus::kInfeasible ||
      sol.status == SolveStatus::kUnbounded || sol.primal.empty()) {
    return absl::InternalError(absl::StrCat(
        "bilevel attack program ended ", SolveStatusName(sol.status)));
  }
  AttackResult out;
  Eigen::VectorXd shift(n);
  for (int i = 0; i < n; ++i) shift[i] = sol.primal[bo.delta_offset + i];
  shift = Project(shift, delta);
  const OpfResult attacked = SolveOpf(model, d + shift);
  if (!attacked.feasible) {
    return absl::InternalError("OPF infeasible at the returned attack");
  }
  out.cost = attacked.cost;
  out.delta.push_back(shift);
  out.node_count = sol.node_count;
  out.status = sol.status;
  out.proven_optimal = sol.proven_optimal;
  if (std::abs(attacked.cost - sol.objective) >
      1e-6 * std::max(1.0, std::abs(attacked.cost))) {
    return absl::InternalError(absl::StrFormat(
        "bilevel attack objective %.9g disagrees with the OPF at its shift "
        "%.9g",
        sol.objective, attacked.cost));
  }
  return out;
}

namespace {

// Finite attackable rows among `rows`.
absl::StatusOr<std::set<int>> RobustRowSet(const CompactModel& model,
                                           const std::vector<int>& rows) {
  const std::vector<int> attackable = AttackableRows(model);
  const std::set<int> allowed(attackable.begin(), attackable.end());
  std::set<int> robust;
  for (int k : rows) {
    if (!allowed.contains(k)) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", k, " is not an attackable row"));
    }
    if (model.RowIsFinite(k)) robust.insert(k);
  }
  return robust;
}

}  // namespace

absl::StatusOr<RoLp> BuildRoLp(const CompactModel& model,
                               const Eigen::VectorXd& d,
                               const AttackSet& delta,
                               const std::vector<int>& rows) {
  if (absl::Status s = CheckDimensions(model, d, delta); !s.ok()) return s;
  absl::StatusOr<std::set<int>> robust_or = RobustRowSet(model, rows);
  if (!robust_or.ok()) return robust_or.status();
  const std::set<int>& robust = *robust_or;
  RoLp out;
  out.robust_rows.assign(robust.begin(), robust.end());
  LinearProgram& lp = out.lp;
  const int nx = model.num_vars();
  for (int j = 0; j < nx; ++j) {
    lp.AddVariable(-kInfinity, kInfinity, model.c[j],
                   j < model.n_gen ? absl::StrCat("p_", j)
                                   : absl::StrCat("v_", j - model.n_gen));
  }
  std::vector<int> active;
  for (int i = 0; i < delta.size(); ++i) {
    if (Active(delta, i)) active.push_back(i);
  }
  for (int k = 0; k < model.num_rows(); ++k) {
    if (!model.RowIsFinite(k)) continue;
    const CompactRow& row = model.rows[k];
    std::vector<LinearTerm> terms;
    for (int j = 0; j < nx; ++j) {
      if (row.a[j] != 0.0) terms.push_back({j, row.a[j]});
    }
    const std::string label = RowLabel(row);
    if (robust.contains(k) && !active.empty()) {
      const int lambda = lp.AddVariable(-kInfinity, kInfinity, 0.0,
                                        absl::StrCat("lambda_", label));
      // Coordinates with zero range drop out: their dual equation is always
      // satisfiable and they carry no cost.
      for (int i : active) {
        const int hi = lp.AddVariable(0.0, kInfinity, 0.0,
                                      absl::StrCat("muhi_", label, "_", i));
        const int lo = lp.AddVariable(0.0, kInfinity, 0.0,
                                      absl::StrCat("mulo_", label, "_", i));
        terms.push_back({hi, delta.delta_hi[i]});
        terms.push_back({lo, -delta.delta_lo[i]});
        lp.AddRow({{hi, -1.0}, {lo, 1.0}, {lambda, -1.0}}, Relation::kEqual,
                  -row.b[i], absl::StrCat("dual_", label, "_", i));
      }
    }
    lp.AddRow(std::move(terms), Relation::kLessEqual, -row.b.dot(d) - row.e,
              label);
  }
  return out;
}

absl::StatusOr<AttackResult> RoAttackReduced(const CompactModel& model,
                                             const Eigen::VectorXd& d,
                                             const AttackSet& delta,
                                             const std::vector<int>& rows) {
  if (absl::Status s = CheckDimensions(model, d, delta); !s.ok()) return s;
  absl::StatusOr<std::set<int>> robust = RobustRowSet(model, rows);
  if (!robust.ok()) return robust.status();
  OpfResult base;
  if (absl::Status s = RequireFeasible(model, d, &base); !s.ok()) return s;
  // With d fixed each robust row decouples: its inner maximum is the closed
  // form shift, so the robust LP is the OPF over shifted rows.
  CompactModel shifted = model;
  AttackResult out;
  for (int k : *robust) {
    WorstShift shift = WorstCaseShift(model.rows[k].b, delta);
    shifted.rows[k].e += shift.value;
    out.rows.push_back(k);
    out.delta.push_back(std::move(shift.delta));
  }
  const OpfResult opf = SolveOpf(shifted, d);
  if (!opf.feasible) {
    return absl::InternalError(
        absl::StrCat("robust attack LP infeasible: ", opf.certificate));
  }
  out.cost = opf.cost;
  out.node_count = 1;
  return out;
}

absl::StatusOr<AttackResult> RoAttack(const CompactModel& model,
                                      const Eigen::VectorXd& d,
                                      const AttackSet& delta) {
  return RoAttackReduced(model, d, delta, AttackableRows(model));
}

std::vector<Eigen::VectorXd> EnumerateVertices(const AttackSet& delta) {
  const int n = delta.size();
  std::vector<int> active;
  for (int i = 0; i < n; ++i) {
    if (Active(delta, i)) active.push_back(i);
  }
  std::vector<Eigen::VectorXd> out;
  if (active.empty()) {
    out.push_back(Eigen::VectorXd::Zero(n));
    return out;
  }
  const int m = static_cast<int>(active.size());
  std::set<std::vector<int64_t>> seen;
  for (int free_pos = 0; free_pos < m; ++free_pos) {
    const int f = active[free_pos];
    for (int64_t mask = 0; mask < (int64_t{1} << (m - 1)); ++mask) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      int bit = 0;
      double sum = 0.0;
      for (int pos = 0; pos < m; ++pos) {
        if (pos == free_pos) continue;
        const int i = active[pos];
        v[i] = (mask >> bit++) & 1 ? delta.delta_hi[i] : delta.delta_lo[i];
        sum += v[i];
      }
      v[f] = -sum;
      const double tol = 1e-9 * std::max(1.0, std::abs(sum));
      if (v[f] < delta.delta_lo[f] - tol || v[f] > delta.delta_hi[f] + tol) {
        continue;
      }
      v[f] = std::clamp(v[f], delta.delta_lo[f], delta.delta_hi[f]);
      std::vector<int64_t> key(n);
      for (int i = 0; i < n; ++i) key[i] = std::llround(v[i] * 1e9);
      if (seen.insert(key).second) out.push_back(v);
    }
  }
  return out;
}

absl::StatusOr<AttackResult> OracleAttack(const CompactModel& model,
                                          const Eigen::VectorXd& d,
                                          const AttackSet& delta) {
  if (absl::Status s = CheckDimensions(model, d, delta); !s.ok()) return s;
  if (delta.NumActive() > kOracleMaxActive) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "vertex enumeration is limited to %d buses with a nonzero attack "
        "range, got %d",
        kOracleMaxActive, delta.NumActive()));
  }
  OpfResult base;
  if (absl::Status s = RequireFeasible(model, d, &base); !s.ok()) return s;
  AttackResult out;
  out.cost = -kInfinity;
  for (const Eigen::VectorXd& v : EnumerateVertices(delta)) {
    const OpfResult opf = SolveOpf(model, d + v);
    ++out.node_count;
    if (!opf.feasible) continue;
    if (opf.cost > out.cost) {
      out.cost = opf.cost;
      out.delta = {v};
    }
  }
  if (out.delta.empty()) {
    return absl::InternalError("OPF infeasible at every vertex");
  }
  return out;
}

absl::StatusOr<double> DamagePercent(const CompactModel& model,
                                     const Eigen::VectorXd& d_release,
                                     const AttackSet& delta,
                                     const BoAttackOptions& options) {
  const OpfResult base = SolveOpf(model, d_release);
  if (!base.feasible) {
    return absl::FailedPreconditionError(
        absl::StrCat("OPF infeasible at the release: ", base.certificate));
  }
  if (base.cost == 0.0) {
    return absl::FailedPreconditionError(
        "damage is undefined when the OPF cost is zero");
  }
  absl::StatusOr<AttackResult> attack =
      BoAttack(model, d_release, delta, options);
  if (!attack.ok()) return attack.status();
  return 100.0 * (attack->cost - base.cost) / base.cost;
}

}  // namespace gridsynth
