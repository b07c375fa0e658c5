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

#include "gridsynth/synth.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "gridsynth/opf.h"

namespace gridsynth {
namespace {

std::string VarName(const CompactModel& model, int j, absl::string_view tag) {
  return j < model.n_gen ? absl::StrCat("p", tag, "_", j)
                         : absl::StrCat("v", tag, "_", j - model.n_gen);
}

bool IsFlow(const CompactRow& row) {
  return row.kind.tag == RowTag::kFlowUpper ||
         row.kind.tag == RowTag::kFlowLower;
}

// Adds |activity - target| as a split pair and returns the index of the
// positive part; the negative part follows it.
int AddAbsSplit(LinearProgram& lp, std::vector<LinearTerm> terms,
                double target, double weight, const std::string& name) {
  const int plus = lp.AddVariable(0.0, kInfinity, weight, name + "_plus");
  lp.AddVariable(0.0, kInfinity, weight, name + "_minus");
  terms.push_back({plus, -1.0});
  terms.push_back({plus + 1, 1.0});
  lp.AddRow(std::move(terms), Relation::kEqual, target, name);
  return plus;
}

std::vector<LinearTerm> CostTerms(const CompactModel& model, int x_offset) {
  std::vector<LinearTerm> terms;
  for (int j = 0; j < model.num_vars(); ++j) {
    if (model.c[j] != 0.0) terms.push_back({x_offset + j, model.c[j]});
  }
  return terms;
}

// Adds the KKT block of min c'x s.t. a_k'x + b_k'd + e_k + shift_k <= 0.
// Returns the x offset and fills the multiplier per row.
int AddKktBlock(const CompactModel& model, int d_offset,
                const std::vector<double>& shift, absl::string_view tag,
                MixedProgram& mp, std::vector<int>& mult) {
  LinearProgram& lp = mp.lp;
  const int nx = model.num_vars();
  const int x_offset = lp.num_vars();
  for (int j = 0; j < nx; ++j) {
    lp.AddVariable(-kInfinity, kInfinity, 0.0, VarName(model, j, tag));
  }
  mult.assign(model.num_rows(), -1);
  for (int k = 0; k < model.num_rows(); ++k) {
    if (!model.RowIsFinite(k)) continue;
    const CompactRow& row = model.rows[k];
    const double upper =
        IsFlow(row) ? model.c[model.n_gen + row.kind.index] : kInfinity;
    mult[k] = lp.AddVariable(0.0, upper, 0.0,
                             absl::StrCat("mult", tag, "_", RowLabel(row)));
    std::vector<LinearTerm> terms;
    for (int j = 0; j < nx; ++j) {
      if (row.a[j] != 0.0) terms.push_back({x_offset + j, row.a[j]});
    }
    for (int i = 0; i < model.n_bus; ++i) {
      if (row.b[i] != 0.0) terms.push_back({d_offset + i, row.b[i]});
    }
    const int r = lp.AddRow(std::move(terms), Relation::kLessEqual,
                            -row.e - shift[k],
                            absl::StrCat(RowLabel(row), tag));
    mp.pairs.push_back({mult[k], r});
  }
  for (int j = 0; j < nx; ++j) {
    std::vector<LinearTerm> terms;
    for (int k = 0; k < model.num_rows(); ++k) {
      if (mult[k] >= 0 && model.rows[k].a[j] != 0.0) {
        terms.push_back({mult[k], model.rows[k].a[j]});
      }
    }
    lp.AddRow(std::move(terms), Relation::kEqual, -model.c[j],
              absl::StrCat("stationarity", tag, "_", j));
  }
  return x_offset;
}

// The robust block with its inner dual variables listed explicitly.
int AddFullRobustBlock(const CompactModel& model, int d_offset,
                       const AttackSet& delta, const std::set<int>& robust,
                       MixedProgram& mp, std::vector<int>& theta,
                       std::vector<PostProcessProgram::RobustBlock>& blocks) {
  LinearProgram& lp = mp.lp;
  const int nx = model.num_vars();
  const int n = model.n_bus;
  const int x_offset = lp.num_vars();
  for (int j = 0; j < nx; ++j) {
    lp.AddVariable(-kInfinity, kInfinity, 0.0, VarName(model, j, "1"));
  }
  theta.assign(model.num_rows(), -1);
  for (int k = 0; k < model.num_rows(); ++k) {
    if (!model.RowIsFinite(k)) continue;
    const CompactRow& row = model.rows[k];
    const std::string label = RowLabel(row);
    const double upper =
        IsFlow(row) ? model.c[model.n_gen + row.kind.index] : kInfinity;
    theta[k] = lp.AddVariable(0.0, upper, 0.0, absl::StrCat("theta_", label));
    std::vector<LinearTerm> terms;
    for (int j = 0; j < nx; ++j) {
      if (row.a[j] != 0.0) terms.push_back({x_offset + j, row.a[j]});
    }
    for (int i = 0; i < n; ++i) {
      if (row.b[i] != 0.0) terms.push_back({d_offset + i, row.b[i]});
    }
    if (robust.contains(k)) {
      PostProcessProgram::RobustBlock block;
      block.row = k;
      block.lambda = lp.AddVariable(-kInfinity, kInfinity, 0.0,
                                    absl::StrCat("lambda_", label));
      auto add_block = [&](double lo, double hi, const char* name) {
        const int first = lp.num_vars();
        for (int i = 0; i < n; ++i) {
          lp.AddVariable(lo, hi, 0.0, absl::StrCat(name, "_", label, "_", i));
        }
        return first;
      };
      block.mu_hi = add_block(-kInfinity, kInfinity, "muhi");
      block.mu_lo = add_block(-kInfinity, kInfinity, "mulo");
      block.zeta = add_block(-kInfinity, kInfinity, "zeta");
      block.pi_hi = add_block(0.0, kInfinity, "pihi");
      block.pi_lo = add_block(0.0, kInfinity, "pilo");
      for (int i = 0; i < n; ++i) {
        if (delta.delta_hi[i] != 0.0) {
          terms.push_back({block.mu_hi + i, delta.delta_hi[i]});
        }
        if (delta.delta_lo[i] != 0.0) {
          terms.push_back({block.mu_lo + i, -delta.delta_lo[i]});
        }
        lp.AddRow({{block.mu_hi + i, -1.0},
                   {block.mu_lo + i, 1.0},
                   {block.lambda, -1.0}},
                  Relation::kEqual, -row.b[i],
                  absl::StrCat("dualfeas_", label, "_", i));
        const int r_hi = lp.AddRow({{block.mu_hi + i, -1.0}},
                                   Relation::kLessEqual, 0.0,
                                   absl::StrCat("muhi_sign_", label, "_", i));
        mp.pairs.push_back({block.pi_hi + i, r_hi});
        const int r_lo = lp.AddRow({{block.mu_lo + i, -1.0}},
                                   Relation::kLessEqual, 0.0,
                                   absl::StrCat("mulo_sign_", label, "_", i));
        mp.pairs.push_back({block.pi_lo + i, r_lo});
        std::vector<LinearTerm> st_hi = {{block.zeta + i, -1.0},
                                         {block.pi_hi + i, -1.0}};
        if (delta.delta_hi[i] != 0.0) {
          st_hi.push_back({theta[k], delta.delta_hi[i]});
        }
        lp.AddRow(std::move(st_hi), Relation::kEqual, 0.0,
                  absl::StrCat("stat_muhi_", label, "_", i));
        std::vector<LinearTerm> st_lo = {{block.zeta + i, 1.0},
                                         {block.pi_lo + i, -1.0}};
        if (delta.delta_lo[i] != 0.0) {
          st_lo.push_back({theta[k], -delta.delta_lo[i]});
        }
        lp.AddRow(std::move(st_lo), Relation::kEqual, 0.0,
                  absl::StrCat("stat_mulo_", label, "_", i));
      }
      std::vector<LinearTerm> st_lambda;
      for (int i = 0; i < n; ++i) st_lambda.push_back({block.zeta + i, -1.0});
      lp.AddRow(std::move(st_lambda), Relation::kEqual, 0.0,
                absl::StrCat("stat_lambda_", label));
      blocks.push_back(block);
    }
    const int r = lp.AddRow(std::move(terms), Relation::kLessEqual, -row.e,
                            absl::StrCat(label, "1"));
    mp.pairs.push_back({theta[k], r});
  }
  for (int j = 0; j < nx; ++j) {
    std::vector<LinearTerm> terms;
    for (int k = 0; k < model.num_rows(); ++k) {
      if (theta[k] >= 0 && model.rows[k].a[j] != 0.0) {
        terms.push_back({theta[k], model.rows[k].a[j]});
      }
    }
    lp.AddRow(std::move(terms), Relation::kEqual, -model.c[j],
              absl::StrCat("stationarity1_", j));
  }
  return x_offset;
}

absl::StatusOr<std::set<int>> RobustSet(const CompactModel& model,
                                        const PostProcessSpec& spec) {
  const std::vector<int> attackable = AttackableRows(model);
  const std::set<int> allowed(attackable.begin(), attackable.end());
  std::set<int> robust;
  if (!spec.attack_block) return robust;
  for (int k : spec.robust_rows) {
    if (!allowed.contains(k)) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", k, " is not an attackable row"));
    }
    if (model.RowIsFinite(k)) robust.insert(k);
  }
  return robust;
}

std::vector<double> RobustShift(const CompactModel& model,
                                const AttackSet& delta,
                                const std::set<int>& robust) {
  std::vector<double> shift(model.num_rows(), 0.0);
  for (int k : robust) shift[k] = WorstCaseShift(model.rows[k].b, delta).value;
  return shift;
}

CompactModel ShiftedModel(const CompactModel& model,
                          const std::vector<double>& shift) {
  CompactModel out = model;
  for (int k = 0; k < out.num_rows(); ++k) out.rows[k].e += shift[k];
  return out;
}

// Moves a load vector into the balance-feasible range.
Eigen::VectorXd RepairBalance(const CompactModel& model, Eigen::VectorXd d,
                              bool nonneg) {
  if (nonneg) d = d.cwiseMax(0.0);
  double cap = 0.0;
  double floor = 0.0;
  for (int g = 0; g < model.n_gen; ++g) {
    cap += model.p_max[g];
    floor += std::max(0.0, model.p_min[g]);
  }
  const double margin = 1e-7 * std::max(1.0, cap);
  const double total = d.sum();
  const double target = std::clamp(total, floor + margin, cap - margin);
  if (target == total || d.size() == 0) return d;
  if (target < total && nonneg && total > 0.0) {
    d *= target / total;
  } else {
    d.array() += (target - total) / static_cast<double>(d.size());
  }
  return d;
}

class PostProcessor {
 public:
  PostProcessor(const CompactModel& model, const ObfuscatedLoads& d0,
                double c_tilde, const PostProcessSpec& spec,
                const PostProcessProgram& pp)
      : model_(model),
        d0_(d0.values()),
        c_tilde_(c_tilde),
        spec_(spec),
        pp_(pp),
        shifted_(ShiftedModel(model, pp.robust_shift)) {
    for (const PostProcessProgram::RobustBlock& block : pp.blocks) {
      shifts_.push_back(WorstCaseShift(model.rows[block.row].b, spec.delta));
    }
  }

  // Objective value at d~ by direct solves.
  double Evaluate(const Eigen::VectorXd& d) const {
    const OpfResult normal = SolveOpf(model_, d);
    if (!normal.feasible) return kInfinity;
    double value = std::abs(normal.cost - c_tilde_) +
                   spec_.gamma * (d - d0_).lpNorm<1>();
    if (spec_.attack_block) {
      const OpfResult attacked = SolveOpf(shifted_, d);
      if (!attacked.feasible) return kInfinity;
      value += spec_.beta * std::abs(attacked.cost - c_tilde_);
    }
    return value;
  }

  std::optional<std::vector<double>> Point(const Eigen::VectorXd& d) const;
  std::vector<Eigen::VectorXd> LineSearch() const;

  const CompactModel& shifted() const { return shifted_; }

 private:
  // Points along d0 + t*sign*e_i where the cost of `m` crosses C~.
  std::optional<double> Crossing(const CompactModel& m,
                                 const Eigen::VectorXd& base, int i,
                                 double sign, double t_max) const;

  const CompactModel& model_;
  const Eigen::VectorXd& d0_;
  double c_tilde_;
  const PostProcessSpec& spec_;
  const PostProcessProgram& pp_;
  CompactModel shifted_;
  std::vector<WorstShift> shifts_;
};

std::optional<std::vector<double>> PostProcessor::Point(
    const Eigen::VectorXd& d) const {
  const OpfResult normal = SolveOpf(model_, d);
  if (!normal.feasible) return std::nullopt;
  const LinearProgram& lp = pp_.program.lp;
  std::vector<double> x(lp.num_vars(), 0.0);
  const int n = model_.n_bus;
  for (int i = 0; i < n; ++i) {
    x[pp_.d_offset + i] = d[i];
    x[pp_.load_pos + 2 * i] = std::max(0.0, d[i] - d0_[i]);
    x[pp_.load_pos + 2 * i + 1] = std::max(0.0, d0_[i] - d[i]);
  }
  for (int j = 0; j < model_.num_vars(); ++j) {
    x[pp_.x2_offset + j] = normal.x[j];
  }
  for (int k = 0; k < model_.num_rows(); ++k) {
    if (pp_.nu_var[k] >= 0) x[pp_.nu_var[k]] = normal.duals[k];
  }
  x[pp_.fidelity_pos] = std::max(0.0, normal.cost - c_tilde_);
  x[pp_.fidelity_pos + 1] = std::max(0.0, c_tilde_ - normal.cost);
  if (!spec_.attack_block) return x;

  const OpfResult attacked = SolveOpf(shifted_, d);
  if (!attacked.feasible) return std::nullopt;
  for (int j = 0; j < model_.num_vars(); ++j) {
    x[pp_.x1_offset + j] = attacked.x[j];
  }
  for (int k = 0; k < model_.num_rows(); ++k) {
    if (pp_.theta_var[k] >= 0) x[pp_.theta_var[k]] = attacked.duals[k];
  }
  x[pp_.attack_pos] = std::max(0.0, attacked.cost - c_tilde_);
  x[pp_.attack_pos + 1] = std::max(0.0, c_tilde_ - attacked.cost);
  for (size_t b = 0; b < pp_.blocks.size(); ++b) {
    const PostProcessProgram::RobustBlock& block = pp_.blocks[b];
    const WorstShift& w = shifts_[b];
    const double theta = attacked.duals[block.row];
    x[block.lambda] = w.lambda;
    for (int i = 0; i < n; ++i) {
      x[block.mu_hi + i] = w.mu_hi[i];
      x[block.mu_lo + i] = w.mu_lo[i];
      x[block.zeta + i] = theta * w.delta[i];
      x[block.pi_hi + i] = theta * (spec_.delta.delta_hi[i] - w.delta[i]);
      x[block.pi_lo + i] = theta * (w.delta[i] - spec_.delta.delta_lo[i]);
    }
  }
  return x;
}

std::optional<double> PostProcessor::Crossing(const CompactModel& m,
                                              const Eigen::VectorXd& base,
                                              int i, double sign,
                                              double t_max) const {
  auto eval = [&](double t, double* slope) -> std::optional<double> {
    Eigen::VectorXd d = base;
    d[i] += sign * t;
    const OpfResult r = SolveOpf(m, d);
    if (!r.feasible) return std::nullopt;
    double s = 0.0;
    for (int k = 0; k < m.num_rows(); ++k) s += r.duals[k] * m.rows[k].b[i];
    *slope = sign * s;
    return r.cost - c_tilde_;
  };
  const double tol = 1e-9 * std::max(1.0, std::abs(c_tilde_));
  double slope = 0.0;
  std::optional<double> h = eval(0.0, &slope);
  if (!h) return std::nullopt;
  double t = 0.0;
  // By convexity, Newton steps from a point above C~ approach the crossing
  // monotonically: from the far end when starting below C~, otherwise from
  // the origin along a descending slope.
  const bool from_origin = *h >= 0.0;
  if (!from_origin) {
    t = t_max;
    h = eval(t, &slope);
    if (!h || *h < 0.0) return std::nullopt;
  }
  for (int iter = 0; iter < 60; ++iter) {
    if (std::abs(*h) <= tol) return t;
    if (from_origin ? slope >= 0.0 : slope <= 0.0) return std::nullopt;
    const double next = std::clamp(t - *h / slope, 0.0, t_max);
    if (next == t) return t;
    t = next;
    h = eval(t, &slope);
    if (!h) return std::nullopt;
  }
  return t;
}

std::vector<Eigen::VectorXd> PostProcessor::LineSearch() const {
  const Eigen::VectorXd base =
      RepairBalance(model_, d0_, spec_.enforce_nonneg_loads);
  double cap = 0.0;
  double floor = 0.0;
  for (int g = 0; g < model_.n_gen; ++g) {
    cap += model_.p_max[g];
    floor += std::max(0.0, model_.p_min[g]);
  }
  const double margin = 1e-7 * std::max(1.0, cap);
  std::vector<Eigen::VectorXd> out;
  out.push_back(base);
  const double total = base.sum();
  for (int i = 0; i < model_.n_bus; ++i) {
    for (double sign : {1.0, -1.0}) {
      double t_max = sign > 0 ? cap - margin - total : total - floor - margin;
      if (sign < 0 && spec_.enforce_nonneg_loads) {
        t_max = std::min(t_max, base[i]);
      }
      if (t_max <= 0.0) continue;
      std::vector<const CompactModel*> models = {&model_};
      if (spec_.attack_block && spec_.beta > 0.0) models.push_back(&shifted_);
      for (const CompactModel* m : models) {
        if (std::optional<double> t = Crossing(*m, base, i, sign, t_max)) {
          Eigen::VectorXd d = base;
          d[i] += sign * *t;
          out.push_back(d);
        }
      }
    }
  }
  return out;
}

}  // namespace

std::string ReleaseAlgorithmName(ReleaseAlgorithm algo) {
  switch (algo) {
    case ReleaseAlgorithm::kPp:
      return "pp";
    case ReleaseAlgorithm::kCro:
      return "cro";
    case ReleaseAlgorithm::kCroExp:
      return "cro-exp";
  }
  return "unknown";
}

absl::StatusOr<ReleaseAlgorithm> ParseReleaseAlgorithm(absl::string_view name) {
  if (name == "pp") return ReleaseAlgorithm::kPp;
  if (name == "cro") return ReleaseAlgorithm::kCro;
  if (name == "cro-exp" || name == "croexp") return ReleaseAlgorithm::kCroExp;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown algorithm '", name, "'; expected pp, cro or cro-exp"));
}

SizeReport SizeOf(const MixedProgram& program, std::string label) {
  SizeReport report;
  report.label = std::move(label);
  report.n_variables = program.lp.num_vars();
  report.n_complementarities = static_cast<int64_t>(program.pairs.size());
  return report;
}

absl::StatusOr<PostProcessProgram> BuildPostProcess(
    const CompactModel& model, const ObfuscatedLoads& d0, double c_tilde,
    const PostProcessSpec& spec) {
  const int n = model.n_bus;
  if (d0.values().size() != n) {
    return absl::InvalidArgumentError(
        absl::StrFormat("initial loads have %d entries, model has %d buses",
                        d0.values().size(), n));
  }
  if (!(spec.gamma > 0.0) || !std::isfinite(spec.gamma)) {
    return absl::InvalidArgumentError("gamma must be positive and finite");
  }
  if (!(spec.beta >= 0.0) || !std::isfinite(spec.beta)) {
    return absl::InvalidArgumentError("beta must be nonnegative and finite");
  }
  if (!std::isfinite(c_tilde)) {
    return absl::InvalidArgumentError("target cost must be finite");
  }
  if (spec.attack_block && spec.delta.size() != n) {
    return absl::InvalidArgumentError("attack set dimension mismatch");
  }
  absl::StatusOr<std::set<int>> robust = RobustSet(model, spec);
  if (!robust.ok()) return robust.status();

  PostProcessProgram out;
  MixedProgram& mp = out.program;
  LinearProgram& lp = mp.lp;
  lp.sense = Sense::kMinimize;
  out.d_offset = 0;
  for (int i = 0; i < n; ++i) {
    lp.AddVariable(spec.enforce_nonneg_loads ? 0.0 : -kInfinity, kInfinity,
                   0.0, absl::StrCat("d_", i));
  }
  out.load_pos = lp.num_vars();
  for (int i = 0; i < n; ++i) {
    AddAbsSplit(lp, {{out.d_offset + i, 1.0}}, d0.values()[i], spec.gamma,
                absl::StrCat("dev_", i));
  }
  out.robust_shift.assign(model.num_rows(), 0.0);
  out.x2_offset = AddKktBlock(model, out.d_offset, out.robust_shift, "2", mp,
                              out.nu_var);
  out.fidelity_pos = AddAbsSplit(lp, CostTerms(model, out.x2_offset), c_tilde,
                                 1.0, "fidelity");
  out.theta_var.assign(model.num_rows(), -1);
  if (spec.attack_block) {
    if (spec.form == ProgramForm::kReduced) {
      out.robust_shift = RobustShift(model, spec.delta, *robust);
      out.x1_offset = AddKktBlock(model, out.d_offset, out.robust_shift, "1",
                                  mp, out.theta_var);
    } else {
      out.robust_shift = RobustShift(model, spec.delta, *robust);
      out.x1_offset = AddFullRobustBlock(model, out.d_offset, spec.delta,
                                         *robust, mp, out.theta_var,
                                         out.blocks);
    }
    out.attack_pos = AddAbsSplit(lp, CostTerms(model, out.x1_offset), c_tilde,
                                 spec.beta, "attack");
  }
  return out;
}

double PostProcessObjective(const CompactModel& model,
                            const ObfuscatedLoads& d0, double c_tilde,
                            const PostProcessSpec& spec,
                            const Eigen::VectorXd& d_tilde) {
  absl::StatusOr<std::set<int>> robust = RobustSet(model, spec);
  if (!robust.ok()) return kInfinity;
  PostProcessProgram pp;
  pp.robust_shift = spec.attack_block
                        ? RobustShift(model, spec.delta, *robust)
                        : std::vector<double>(model.num_rows(), 0.0);
  const PostProcessor processor(model, d0, c_tilde, spec, pp);
  return processor.Evaluate(d_tilde);
}

absl::StatusOr<PostProcessResult> SolvePostProcess(
    const CompactModel& model, const ObfuscatedLoads& d0, double c_tilde,
    const PostProcessSpec& spec, const PostProcessOptions& options) {
  absl::StatusOr<PostProcessProgram> pp =
      BuildPostProcess(model, d0, c_tilde, spec);
  if (!pp.ok()) return pp.status();
  const PostProcessor processor(model, d0, c_tilde, spec, *pp);
  const int n = model.n_bus;

  std::vector<std::vector<double>> starts;
  std::vector<Eigen::VectorXd> seeds;
  if (options.line_search) {
    seeds = processor.LineSearch();
  } else {
    seeds.push_back(RepairBalance(model, d0.values(),
                                  spec.enforce_nonneg_loads));
  }
  for (const Eigen::VectorXd& warm : options.warm_loads) {
    if (warm.size() == n) seeds.push_back(warm);
  }
  std::vector<std::pair<double, int>> ranked;
  for (size_t s = 0; s < seeds.size(); ++s) {
    ranked.push_back({processor.Evaluate(seeds[s]), static_cast<int>(s)});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [value, s] : ranked) {
    if (static_cast<int>(starts.size()) >= std::max(1, options.max_starts)) {
      break;
    }
    if (!std::isfinite(value)) continue;
    if (auto point = processor.Point(seeds[s])) {
      starts.push_back(std::move(*point));
    }
  }

  const PrimalHeuristic heuristic =
      [&](const std::vector<double>& relaxed)
      -> std::optional<std::vector<double>> {
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d[i] = relaxed[pp->d_offset + i];
    if (spec.enforce_nonneg_loads) d = d.cwiseMax(0.0);
    return processor.Point(d);
  };
  BranchOptions branch;
  branch.node_limit = options.node_limit;
  branch.relative_gap = 1e-9;
  const Solution sol =
      SolveComplementarity(pp->program, branch, heuristic, starts);
  if (sol.primal.empty() || sol.status == SolveStatus::kInfeasible ||
      sol.status == SolveStatus::kUnbounded) {
    return absl::InternalError(absl::StrCat(
        "post-processing program ended ", SolveStatusName(sol.status)));
  }
  PostProcessResult out;
  out.d_tilde.resize(n);
  for (int i = 0; i < n; ++i) {
    double v = sol.primal[pp->d_offset + i];
    if (spec.enforce_nonneg_loads && v < 0.0) v = 0.0;
    out.d_tilde[i] = v;
  }
  out.objective = sol.objective;
  auto cost_at = [&](int offset) {
    double c = 0.0;
    for (int j = 0; j < model.num_vars(); ++j) {
      c += model.c[j] * sol.primal[offset + j];
    }
    return c;
  };
  out.embedded_normal_cost = cost_at(pp->x2_offset);
  out.embedded_attack_cost =
      pp->x1_offset >= 0 ? cost_at(pp->x1_offset) : out.embedded_normal_cost;
  out.node_count = sol.node_count;
  out.lp_solves = sol.iterations;
  out.proven_optimal = sol.proven_optimal;
  out.status = sol.status;
  out.best_bound = sol.best_bound;
  out.solved_size = SizeOf(pp->program, "solved");
  return out;
}

absl::StatusOr<PostProcessResult> PostProcessPp(
    const CompactModel& model, const ObfuscatedLoads& d0, double c_tilde,
    double gamma, const PostProcessOptions& options) {
  PostProcessSpec spec;
  spec.gamma = gamma;
  return SolvePostProcess(model, d0, c_tilde, spec, options);
}

absl::StatusOr<PostProcessResult> PostProcessCro(
    const CompactModel& model, const ObfuscatedLoads& d0, double c_tilde,
    const AttackSet& delta, double beta, double gamma,
    const PostProcessOptions& options) {
  return PostProcessCroExp(model, d0, c_tilde, delta, AttackableRows(model),
                           beta, gamma, options);
}

absl::StatusOr<PostProcessResult> PostProcessCroExp(
    const CompactModel& model, const ObfuscatedLoads& d0, double c_tilde,
    const AttackSet& delta, const std::vector<int>& rows, double beta,
    double gamma, const PostProcessOptions& options) {
  PostProcessSpec spec;
  spec.attack_block = true;
  spec.delta = delta;
  spec.robust_rows = rows;
  spec.beta = beta;
  spec.gamma = gamma;
  return SolvePostProcess(model, d0, c_tilde, spec, options);
}

absl::StatusOr<SizeReport> ReportSize(const CompactModel& model,
                                      ReleaseAlgorithm algo,
                                      const std::vector<int>& rows) {
  PostProcessSpec spec;
  spec.form = ProgramForm::kFull;
  spec.delta = ZeroAttackSet(model.n_bus);
  spec.attack_block = algo != ReleaseAlgorithm::kPp;
  if (algo == ReleaseAlgorithm::kCro) {
    spec.robust_rows = AttackableRows(model);
  } else if (algo == ReleaseAlgorithm::kCroExp) {
    spec.robust_rows = rows;
  }
  const ObfuscatedLoads zero =
      ObfuscatedLoads::AssumeObfuscated(Eigen::VectorXd::Zero(model.n_bus));
  absl::StatusOr<PostProcessProgram> pp =
      BuildPostProcess(model, zero, 0.0, spec);
  if (!pp.ok()) return pp.status();
  std::string label = ReleaseAlgorithmName(algo);
  if (algo == ReleaseAlgorithm::kCroExp) {
    absl::StrAppend(&label, "(", rows.size(), ")");
  }
  return SizeOf(pp->program, label);
}

AttackSet FrozenAttackSet(const ObfuscatedLoads& d0, double eta) {
  AttackSet set;
  const Eigen::VectorXd base = d0.values().cwiseMax(0.0);
  set.delta_hi = eta * base;
  set.delta_lo = -eta * base;
  set.eta = eta;
  return set;
}

absl::StatusOr<SyntheticRelease> RunRelease(const CompactModel& model,
                                            const Eigen::VectorXd& d,
                                            ReleaseAlgorithm algo,
                                            const SynthConfig& config,
                                            uint64_t seed) {
  if (d.size() != model.n_bus) {
    return absl::InvalidArgumentError("load vector dimension mismatch");
  }
  if (config.tau < 0) return absl::InvalidArgumentError("tau must be >= 0");
  if (!(config.eta >= 0.0)) {
    return absl::InvalidArgumentError("eta must be nonnegative");
  }
  const bool selects = algo == ReleaseAlgorithm::kCroExp && config.tau > 0;
  absl::StatusOr<PrivacyParams> params =
      selects ? MakeCroExpParams(config.alpha, config.epsilon, config.tau)
              : MakeCroParams(config.alpha, config.epsilon);
  if (!params.ok()) return params.status();

  SyntheticRelease release;
  release.algorithm = algo;
  release.seed = seed;
  release.privacy = *params;

  RngStream load_rng = RngStream::ForQuery(seed, "load_obfuscation");
  absl::StatusOr<ObfuscatedLoadResult> loads =
      ObfuscateLoads(d, config.alpha, params->eps1, load_rng);
  if (!loads.ok()) return loads.status();
  release.ledger.Add(loads->entry);
  release.d_initial = loads->loads.values();

  const double c_bar =
      CostSensitivity(model, config.cost_sensitivity_includes_penalty);
  RngStream cost_rng = RngStream::ForQuery(seed, "cost_obfuscation");
  absl::StatusOr<ObfuscatedCost> cost = ObfuscateCost(
      model, d, config.alpha, c_bar, params->eps2, cost_rng);
  if (!cost.ok()) return cost.status();
  release.ledger.Add(cost->entry);
  release.c_target = cost->value;

  release.delta = FrozenAttackSet(loads->loads, config.eta);
  if (algo == ReleaseAlgorithm::kCro) {
    release.rows = SelectionCandidates(model);
  } else if (selects) {
    absl::StatusOr<NoisyMaxResult> chosen =
        NoisyMaxRows(model, d, release.delta, config.tau, config.alpha, c_bar,
                     params->eps3, seed);
    if (!chosen.ok()) return chosen.status();
    release.rows = chosen->rows;
    for (LedgerEntry& e : chosen->entries) release.ledger.Add(std::move(e));
  }

  const AccountVerdict verdict = Account(*params, release.ledger);
  if (!verdict.ok) {
    return absl::InternalError(absl::StrCat(
        "privacy ledger rejected: ",
        verdict.messages.empty() ? "" : verdict.messages.front()));
  }

  PostProcessSpec spec;
  spec.attack_block = algo != ReleaseAlgorithm::kPp;
  spec.delta = release.delta;
  spec.robust_rows = release.rows;
  spec.beta = config.beta;
  spec.gamma = config.gamma;
  spec.enforce_nonneg_loads = config.enforce_nonneg_loads;
  PostProcessOptions options = config.solve;
  const int max_rounds = spec.attack_block ? std::max(1, config.attack_set_rounds)
                                           : 1;
  int64_t total_nodes = 0;
  int64_t total_lps = 0;
  for (int round = 1; round <= max_rounds; ++round) {
    absl::StatusOr<PostProcessResult> result = SolvePostProcess(
        model, loads->loads, release.c_target, spec, options);
    if (!result.ok()) return result.status();
    total_nodes += result->node_count;
    total_lps += result->lp_solves;
    release.stats = *result;
    release.d_tilde = result->d_tilde;
    release.delta = spec.delta;
    release.rounds = round;
    const Eigen::VectorXd reach = config.eta * release.d_tilde.cwiseMax(0.0);
    const double tol = 1e-9 * std::max(1.0, reach.lpNorm<Eigen::Infinity>());
    if ((reach - spec.delta.delta_hi).maxCoeff() <= tol) break;
    spec.delta.delta_hi = spec.delta.delta_hi.cwiseMax(reach);
    spec.delta.delta_lo = -spec.delta.delta_hi;
    options.warm_loads = {release.d_tilde};
  }
  release.stats.node_count = total_nodes;
  release.stats.lp_solves = total_lps;

  const OpfResult normal = SolveOpf(model, release.d_tilde);
  if (!normal.feasible) {
    return absl::InternalError(
        absl::StrCat("release admits no feasible OPF: ", normal.certificate));
  }
  release.c_opf = normal.cost;
  if (spec.attack_block) {
    absl::StatusOr<AttackResult> ro =
        RoAttackReduced(model, release.d_tilde, release.delta, release.rows);
    if (!ro.ok()) return ro.status();
    release.c_att_ro = ro->cost;
  } else {
    release.c_att_ro = release.c_opf;
  }
  absl::StatusOr<SizeReport> size = ReportSize(model, algo, release.rows);
  if (!size.ok()) return size.status();
  release.size = *size;
  return release;
}

}  // namespace gridsynth
