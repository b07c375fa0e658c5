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

// Dense-tableau bounded-variable primal simplex.
//
// Column layout: structural variables, then one logical column per row
// (coefficient +1 for <= rows, -1 for >= rows, fixed at zero for equality
// rows), then phase-one artificials for the rows whose logical could not
// start basic. The logical columns of the tableau hold B^-1 up to sign, which
// is where the duals and the Farkas certificate are read from.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <utility>
#include <vector>

#include "Eigen/Dense"
#include "gridsynth/linear_program.h"

namespace gridsynth {
namespace {

enum class State : uint8_t { kBasic, kAtLower, kAtUpper, kFreeZero };

enum class PhaseResult { kOptimal, kUnbounded, kIterLimit };

class DenseSimplex {
 public:
  DenseSimplex(const LinearProgram& lp, const SimplexOptions& options)
      : lp_(lp), options_(options) {}

  Solution Run();

 private:
  double& T(int r, int j) { return tab_[static_cast<size_t>(r) * ncols_ + j]; }
  double& A(int r, int j) { return full_[static_cast<size_t>(r) * ncols_ + j]; }

  void Setup();
  void ComputeReducedCosts(const std::vector<double>& cost);
  PhaseResult Iterate(const std::vector<double>& cost, bool phase_one);
  void Pivot(int r, int q);
  void RecomputeBasics();
  bool Refactor();
  double MaxRowResidual();
  void DriveOutArtificials();
  std::vector<double> RowMultipliers(const std::vector<double>& cost);
  bool Eligible(int j, double* gain, int* direction) const;

  const LinearProgram& lp_;
  SimplexOptions options_;
  int m_ = 0;
  int n_ = 0;
  int first_art_ = 0;
  int ncols_ = 0;
  std::vector<double> tab_;
  std::vector<double> full_;
  std::vector<double> rhs_;
  std::vector<double> lo_, hi_, x_, dj_;
  std::vector<double> sigma_;
  std::vector<int> basis_;
  std::vector<int> row_of_;
  std::vector<State> state_;
  std::vector<bool> blocked_;
  std::vector<int> art_row_;
  std::vector<double> ray_;
  int64_t iterations_ = 0;
  double tol_scale_ = 1.0;
  double cost_scale_ = 1.0;
};

void DenseSimplex::Setup() {
  m_ = lp_.num_rows();
  n_ = lp_.num_vars();
  lo_.assign(lp_.lower.begin(), lp_.lower.end());
  hi_.assign(lp_.upper.begin(), lp_.upper.end());
  rhs_.resize(m_);
  sigma_.resize(m_);
  double rhs_max = 0.0;
  for (int i = 0; i < m_; ++i) {
    rhs_[i] = lp_.rows[i].rhs;
    rhs_max = std::max(rhs_max, std::abs(rhs_[i]));
    sigma_[i] = lp_.rows[i].relation == Relation::kGreaterEqual ? -1.0 : 1.0;
    lo_.push_back(0.0);
    hi_.push_back(lp_.rows[i].relation == Relation::kEqual ? 0.0 : kInfinity);
  }
  tol_scale_ = 1.0 + rhs_max;

  // Initial nonbasic values for structural variables.
  x_.assign(n_ + m_, 0.0);
  state_.assign(n_ + m_, State::kAtLower);
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
      state_[j] = State::kAtLower;
    } else if (std::isfinite(hi_[j])) {
      x_[j] = hi_[j];
      state_[j] = State::kAtUpper;
    } else {
      x_[j] = 0.0;
      state_[j] = State::kFreeZero;
    }
  }
  std::vector<double> residual(m_);
  for (int i = 0; i < m_; ++i) residual[i] = rhs_[i] - lp_.RowActivity(i, x_);

  // Rows that need an artificial.
  std::vector<double> art_sign;
  for (int i = 0; i < m_; ++i) {
    const double s = residual[i] / sigma_[i];
    const bool logical_ok = s >= 0.0 && s <= hi_[n_ + i];
    if (!logical_ok) {
      art_row_.push_back(i);
      art_sign.push_back(residual[i] >= 0.0 ? 1.0 : -1.0);
    }
  }
  first_art_ = n_ + m_;
  ncols_ = first_art_ + static_cast<int>(art_row_.size());
  for (size_t a = 0; a < art_row_.size(); ++a) {
    lo_.push_back(0.0);
    hi_.push_back(kInfinity);
    x_.push_back(0.0);
    state_.push_back(State::kAtLower);
  }

  full_.assign(static_cast<size_t>(m_) * ncols_, 0.0);
  for (int i = 0; i < m_; ++i) {
    for (const LinearTerm& t : lp_.rows[i].terms) A(i, t.var) += t.coef;
    A(i, n_ + i) = sigma_[i];
  }
  for (size_t a = 0; a < art_row_.size(); ++a) {
    A(art_row_[a], first_art_ + static_cast<int>(a)) = art_sign[a];
  }

  basis_.assign(m_, -1);
  row_of_.assign(ncols_, -1);
  std::vector<double> pivot_coef(m_);
  for (int i = 0; i < m_; ++i) {
    basis_[i] = n_ + i;
    pivot_coef[i] = sigma_[i];
  }
  for (size_t a = 0; a < art_row_.size(); ++a) {
    const int i = art_row_[a];
    basis_[i] = first_art_ + static_cast<int>(a);
    pivot_coef[i] = art_sign[a];
  }
  for (int i = 0; i < m_; ++i) {
    const int col = basis_[i];
    row_of_[col] = i;
    state_[col] = State::kBasic;
    x_[col] = residual[i] / pivot_coef[i];
  }
  tab_ = full_;
  for (int i = 0; i < m_; ++i) {
    const double inv = 1.0 / pivot_coef[i];
    double* row = &tab_[static_cast<size_t>(i) * ncols_];
    for (int j = 0; j < ncols_; ++j) row[j] *= inv;
  }
  blocked_.assign(ncols_, false);
  cost_scale_ = 1.0;
  for (int j = 0; j < n_; ++j) {
    cost_scale_ = std::max(cost_scale_, std::abs(lp_.objective[j]));
  }
}

void DenseSimplex::ComputeReducedCosts(const std::vector<double>& cost) {
  dj_.assign(cost.begin(), cost.end());
  for (int r = 0; r < m_; ++r) {
    const double cb = cost[basis_[r]];
    if (cb == 0.0) continue;
    const double* row = &tab_[static_cast<size_t>(r) * ncols_];
    for (int j = 0; j < ncols_; ++j) dj_[j] -= cb * row[j];
  }
  for (int r = 0; r < m_; ++r) dj_[basis_[r]] = 0.0;
}

bool DenseSimplex::Eligible(int j, double* gain, int* direction) const {
  if (state_[j] == State::kBasic || blocked_[j]) return false;
  if (lo_[j] == hi_[j]) return false;
  const double tol = options_.optimality_tol * cost_scale_;
  const double d = dj_[j];
  switch (state_[j]) {
    case State::kAtLower:
      if (d < -tol) {
        *gain = -d;
        *direction = 1;
        return true;
      }
      return false;
    case State::kAtUpper:
      if (d > tol) {
        *gain = d;
        *direction = -1;
        return true;
      }
      return false;
    case State::kFreeZero:
      if (std::abs(d) > tol) {
        *gain = std::abs(d);
        *direction = d < 0 ? 1 : -1;
        return true;
      }
      return false;
    case State::kBasic:
      return false;
  }
  return false;
}

void DenseSimplex::Pivot(int r, int q) {
  double* prow = &tab_[static_cast<size_t>(r) * ncols_];
  const double inv = 1.0 / prow[q];
  for (int j = 0; j < ncols_; ++j) prow[j] *= inv;
  prow[q] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* row = &tab_[static_cast<size_t>(i) * ncols_];
    const double f = row[q];
    if (f == 0.0) continue;
    for (int j = 0; j < ncols_; ++j) row[j] -= f * prow[j];
    row[q] = 0.0;
  }
  const double f = dj_[q];
  if (f != 0.0) {
    for (int j = 0; j < ncols_; ++j) dj_[j] -= f * prow[j];
  }
  dj_[q] = 0.0;
  const int leaving = basis_[r];
  row_of_[leaving] = -1;
  basis_[r] = q;
  row_of_[q] = r;
  state_[q] = State::kBasic;
}

PhaseResult DenseSimplex::Iterate(const std::vector<double>& cost,
                                  bool phase_one) {
  ComputeReducedCosts(cost);
  int degenerate_run = 0;
  bool bland = false;
  const double feas = options_.feasibility_tol * tol_scale_;
  const double piv = options_.pivot_tol;
  while (true) {
    if (iterations_ >= options_.max_iterations) return PhaseResult::kIterLimit;

    // Pricing.
    int q = -1;
    int dir = 0;
    double best_gain = 0.0;
    for (int j = 0; j < ncols_; ++j) {
      double gain;
      int d;
      if (!Eligible(j, &gain, &d)) continue;
      if (bland) {
        q = j;
        dir = d;
        break;
      }
      if (gain > best_gain) {
        best_gain = gain;
        q = j;
        dir = d;
      }
    }
    if (q < 0) return PhaseResult::kOptimal;
    ++iterations_;

    // Ratio test.
    const double range = hi_[q] - lo_[q];
    int leave = -1;
    double step = kInfinity;
    if (bland) {
      for (int i = 0; i < m_; ++i) {
        const double alpha = dir * T(i, q);
        const int b = basis_[i];
        double ratio;
        if (alpha > piv && std::isfinite(lo_[b])) {
          ratio = (x_[b] - lo_[b]) / alpha;
        } else if (alpha < -piv && std::isfinite(hi_[b])) {
          ratio = (hi_[b] - x_[b]) / -alpha;
        } else {
          continue;
        }
        ratio = std::max(ratio, 0.0);
        if (ratio < step || (ratio == step && leave >= 0 && b < basis_[leave])) {
          step = ratio;
          leave = i;
        }
      }
    } else {
      double limit = kInfinity;
      for (int i = 0; i < m_; ++i) {
        const double alpha = dir * T(i, q);
        const int b = basis_[i];
        if (alpha > piv && std::isfinite(lo_[b])) {
          limit = std::min(limit, (x_[b] - lo_[b] + feas) / alpha);
        } else if (alpha < -piv && std::isfinite(hi_[b])) {
          limit = std::min(limit, (hi_[b] - x_[b] + feas) / -alpha);
        }
      }
      double best_alpha = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double alpha = dir * T(i, q);
        const int b = basis_[i];
        double ratio;
        if (alpha > piv && std::isfinite(lo_[b])) {
          ratio = (x_[b] - lo_[b]) / alpha;
        } else if (alpha < -piv && std::isfinite(hi_[b])) {
          ratio = (hi_[b] - x_[b]) / -alpha;
        } else {
          continue;
        }
        if (ratio <= limit && std::abs(alpha) > best_alpha) {
          best_alpha = std::abs(alpha);
          leave = i;
          step = std::max(ratio, 0.0);
        }
      }
    }

    if (std::isfinite(range) && range <= step) {
      // Bound flip; the basis is unchanged.
      for (int i = 0; i < m_; ++i) {
        const double alpha = T(i, q);
        if (alpha != 0.0) x_[basis_[i]] -= dir * range * alpha;
      }
      if (dir > 0) {
        x_[q] = hi_[q];
        state_[q] = State::kAtUpper;
      } else {
        x_[q] = lo_[q];
        state_[q] = State::kAtLower;
      }
      degenerate_run = 0;
      continue;
    }
    if (leave < 0) {
      ray_.assign(ncols_, 0.0);
      ray_[q] = dir;
      for (int i = 0; i < m_; ++i) ray_[basis_[i]] = -dir * T(i, q);
      return phase_one ? PhaseResult::kOptimal : PhaseResult::kUnbounded;
    }

    for (int i = 0; i < m_; ++i) {
      const double alpha = T(i, q);
      if (alpha != 0.0) x_[basis_[i]] -= dir * step * alpha;
    }
    x_[q] += dir * step;
    const int out = basis_[leave];
    const double alpha_out = dir * T(leave, q);
    if (alpha_out > 0) {
      x_[out] = lo_[out];
      state_[out] = State::kAtLower;
    } else {
      x_[out] = hi_[out];
      state_[out] = State::kAtUpper;
    }
    if (!std::isfinite(x_[out])) {
      x_[out] = 0.0;
      state_[out] = State::kFreeZero;
    }
    Pivot(leave, q);

    if (step <= 1e-12) {
      if (++degenerate_run >= options_.bland_after_degenerate &&
          !options_.never_bland) {
        bland = true;
      }
    } else {
      degenerate_run = 0;
    }
  }
}

void DenseSimplex::RecomputeBasics() {
  // rhs minus nonbasic contributions, then x_B = B^-1 * that.
  std::vector<double> r(rhs_);
  for (int i = 0; i < m_; ++i) {
    const double* arow = &full_[static_cast<size_t>(i) * ncols_];
    for (int j = 0; j < ncols_; ++j) {
      if (state_[j] != State::kBasic && arow[j] != 0.0 && x_[j] != 0.0) {
        r[i] -= arow[j] * x_[j];
      }
    }
  }
  for (int b = 0; b < m_; ++b) {
    double value = 0.0;
    const double* trow = &tab_[static_cast<size_t>(b) * ncols_];
    for (int i = 0; i < m_; ++i) {
      value += trow[n_ + i] / sigma_[i] * r[i];
    }
    x_[basis_[b]] = value;
  }
}

bool DenseSimplex::Refactor() {
  Eigen::MatrixXd basis(m_, m_);
  for (int r = 0; r < m_; ++r) {
    for (int i = 0; i < m_; ++i) basis(i, r) = A(i, basis_[r]);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>
      full(full_.data(), m_, ncols_);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      solved = lu.solve(Eigen::MatrixXd(full));
  if (!solved.allFinite()) return false;
  std::copy(solved.data(), solved.data() + solved.size(), tab_.begin());
  RecomputeBasics();
  return true;
}

double DenseSimplex::MaxRowResidual() {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    double sum = 0.0;
    const double* arow = &full_[static_cast<size_t>(i) * ncols_];
    for (int j = 0; j < ncols_; ++j) {
      if (arow[j] != 0.0) sum += arow[j] * x_[j];
    }
    worst = std::max(worst, std::abs(sum - rhs_[i]));
  }
  return worst;
}

void DenseSimplex::DriveOutArtificials() {
  for (int r = 0; r < m_; ++r) {
    if (basis_[r] < first_art_) continue;
    int best = -1;
    double best_abs = 1e-7;
    for (int j = 0; j < first_art_; ++j) {
      if (state_[j] == State::kBasic) continue;
      const double a = std::abs(T(r, j));
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best < 0) continue;  // redundant row
    const int out = basis_[r];
    x_[out] = 0.0;
    state_[out] = State::kAtLower;
    Pivot(r, best);
  }
  for (int j = first_art_; j < ncols_; ++j) {
    hi_[j] = 0.0;
    blocked_[j] = true;
    if (state_[j] != State::kBasic) x_[j] = 0.0;
  }
  RecomputeBasics();
}

std::vector<double> DenseSimplex::RowMultipliers(
    const std::vector<double>& cost) {
  ComputeReducedCosts(cost);
  // d_logical(i) = cost - sigma_i * w_i with zero logical cost.
  std::vector<double> w(m_);
  for (int i = 0; i < m_; ++i) w[i] = (cost[n_ + i] - dj_[n_ + i]) / sigma_[i];
  return w;
}

Solution DenseSimplex::Run() {
  Solution sol;
  if (absl::Status s = lp_.Validate(); !s.ok()) {
    sol.status = SolveStatus::kInfeasible;
    return sol;
  }
  for (int j = 0; j < lp_.num_vars(); ++j) {
    if (lp_.lower[j] > lp_.upper[j]) {
      sol.status = SolveStatus::kInfeasible;
      sol.primal.assign(lp_.num_vars(), 0.0);
      return sol;
    }
  }
  Setup();
  const double sign = lp_.sense == Sense::kMinimize ? 1.0 : -1.0;

  if (!art_row_.empty()) {
    std::vector<double> phase_one_cost(ncols_, 0.0);
    for (int j = first_art_; j < ncols_; ++j) phase_one_cost[j] = 1.0;
    PhaseResult result = Iterate(phase_one_cost, true);
    if (result == PhaseResult::kIterLimit) {
      sol.status = SolveStatus::kIterLimit;
      sol.primal.assign(x_.begin(), x_.begin() + n_);
      sol.iterations = iterations_;
      return sol;
    }
    RecomputeBasics();
    double infeasibility = 0.0;
    for (int j = first_art_; j < ncols_; ++j) infeasibility += std::abs(x_[j]);
    if (infeasibility > 1e-7 * tol_scale_) {
      sol.status = SolveStatus::kInfeasible;
      sol.iterations = iterations_;
      sol.primal.assign(x_.begin(), x_.begin() + n_);
      sol.has_certificate = true;
      sol.certificate = RowMultipliers(phase_one_cost);
      return sol;
    }
    DriveOutArtificials();
  }

  std::vector<double> cost(ncols_, 0.0);
  for (int j = 0; j < n_; ++j) cost[j] = sign * lp_.objective[j];
  PhaseResult result = Iterate(cost, false);
  for (int attempt = 0; attempt < 2 && result == PhaseResult::kOptimal;
       ++attempt) {
    if (MaxRowResidual() <= 1e-10 * tol_scale_) break;
    if (!Refactor()) break;
    result = Iterate(cost, false);
  }
  sol.iterations = iterations_;
  sol.primal.assign(x_.begin(), x_.begin() + n_);
  if (result == PhaseResult::kIterLimit) {
    sol.status = SolveStatus::kIterLimit;
    return sol;
  }
  if (result == PhaseResult::kUnbounded) {
    sol.status = SolveStatus::kUnbounded;
    sol.has_certificate = true;
    sol.certificate.assign(ray_.begin(), ray_.begin() + n_);
    return sol;
  }
  sol.status = SolveStatus::kOptimal;
  // Snap to bounds where the tableau drifted by rounding.
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == State::kAtLower) sol.primal[j] = lo_[j];
    if (state_[j] == State::kAtUpper) sol.primal[j] = hi_[j];
  }
  const std::vector<double> w = RowMultipliers(cost);
  sol.duals.resize(m_);
  for (int i = 0; i < m_; ++i) {
    sol.duals[i] = lp_.rows[i].relation == Relation::kLessEqual ? -w[i] : w[i];
  }
  sol.bound_duals.assign(dj_.begin(), dj_.begin() + n_);
  sol.objective = lp_.ObjectiveValue(sol.primal);
  sol.best_bound = sol.objective;
  sol.proven_optimal = true;
  return sol;
}

std::atomic<bool> g_observer_active{false};
std::mutex g_observer_mu;
LpSolveObserver* g_observer = nullptr;

}  // namespace

void SetLpSolveObserver(LpSolveObserver observer) {
  std::lock_guard<std::mutex> lock(g_observer_mu);
  delete g_observer;
  g_observer = observer ? new LpSolveObserver(std::move(observer)) : nullptr;
  g_observer_active.store(g_observer != nullptr);
}

Solution SolveLp(const LinearProgram& lp, const SimplexOptions& options) {
  DenseSimplex simplex(lp, options);
  Solution sol = simplex.Run();
  if (g_observer_active.load(std::memory_order_relaxed)) {
    std::lock_guard<std::mutex> lock(g_observer_mu);
    if (g_observer != nullptr) (*g_observer)(lp, sol);
  }
  return sol;
}

double DualityGap(const LinearProgram& lp, const Solution& solution) {
  const double sign = lp.sense == Sense::kMinimize ? 1.0 : -1.0;
  double primal = 0.0;
  double dual = 0.0;
  for (int i = 0; i < lp.num_rows(); ++i) {
    const Constraint& row = lp.rows[i];
    const double y = solution.duals[i];
    const double lambda = row.relation == Relation::kLessEqual ? -y : y;
    dual += lambda * row.rhs;
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double x = solution.primal[j];
    primal += sign * lp.objective[j] * x;
    const double r = solution.bound_duals[j];
    double bound = x;
    if (r > 0.0 && std::isfinite(lp.lower[j])) bound = lp.lower[j];
    if (r < 0.0 && std::isfinite(lp.upper[j])) bound = lp.upper[j];
    dual += r * bound;
  }
  return primal - dual;
}

}  // namespace gridsynth
