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

// Depth-first branch-and-bound over complementarity disjunctions.
//
// Each pair (mu, g) with g = rhs - a'x >= 0 is resolved by branching on
// mu = 0 versus g = 0. Nodes are LPs with the fixings applied as a zero upper
// bound on the multiplier or an equality on the row.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "gridsynth/linear_program.h"

namespace gridsynth {
namespace {

enum Fix : int8_t { kFree = 0, kMultiplierZero = 1, kRowTight = 2 };

struct Node {
  std::vector<int8_t> fix;
  double bound;
};

class BranchAndBound {
 public:
  BranchAndBound(const MixedProgram& mp, const BranchOptions& options,
                 const PrimalHeuristic& heuristic)
      : mp_(mp), options_(options), heuristic_(heuristic) {
    sign_ = mp.lp.sense == Sense::kMinimize ? 1.0 : -1.0;
  }

  Solution Run(const std::vector<std::vector<double>>& starts);

 private:
  LinearProgram NodeLp(const std::vector<int8_t>& fix) const;
  Solution SolveNode(const std::vector<int8_t>& fix) {
    ++lp_solves_;
    return SolveLp(NodeLp(fix), options_.lp);
  }
  double Slack(int pair, const std::vector<double>& x) const {
    const ComplementarityPair& p = mp_.pairs[pair];
    return mp_.lp.rows[p.row].rhs - mp_.lp.RowActivity(p.row, x);
  }
  double Violation(int pair, const std::vector<double>& x) const {
    return std::min(x[mp_.pairs[pair].multiplier_var], Slack(pair, x));
  }
  // Fixings that put every pair on the side of its smaller member.
  std::vector<int8_t> SidesOf(const std::vector<double>& x) const;
  bool RoughlyFeasible(const std::vector<double>& x) const;
  // Minimization-form value of a primal point.
  double Value(const Solution& s) const { return sign_ * s.objective; }
  double Gap() const {
    return std::max(options_.absolute_gap,
                    options_.relative_gap * std::abs(incumbent_value_));
  }
  bool Improves(double value) const {
    return !has_incumbent_ || value < incumbent_value_ - Gap();
  }
  void Offer(const Solution& leaf, const std::vector<int8_t>& fix);
  void TryCandidate(const std::vector<double>& x);
  double Residual(const std::vector<double>& x) const;

  const MixedProgram& mp_;
  BranchOptions options_;
  const PrimalHeuristic& heuristic_;
  double sign_ = 1.0;
  bool has_incumbent_ = false;
  double incumbent_value_ = kInfinity;
  Solution incumbent_;
  int64_t lp_solves_ = 0;
  int64_t nodes_ = 0;
  bool unbounded_ = false;
  // Leaf fixings already polished.
  std::set<std::vector<int8_t>> tried_;
};

LinearProgram BranchAndBound::NodeLp(const std::vector<int8_t>& fix) const {
  LinearProgram lp = mp_.lp;
  for (size_t p = 0; p < fix.size(); ++p) {
    const ComplementarityPair& pair = mp_.pairs[p];
    if (fix[p] == kMultiplierZero) {
      lp.upper[pair.multiplier_var] = 0.0;
    } else if (fix[p] == kRowTight) {
      lp.rows[pair.row].relation = Relation::kEqual;
    }
  }
  return lp;
}

std::vector<int8_t> BranchAndBound::SidesOf(const std::vector<double>& x) const {
  std::vector<int8_t> fix(mp_.pairs.size());
  for (size_t p = 0; p < fix.size(); ++p) {
    const double mult = x[mp_.pairs[p].multiplier_var];
    fix[p] = mult <= Slack(static_cast<int>(p), x) ? kMultiplierZero : kRowTight;
  }
  return fix;
}

bool BranchAndBound::RoughlyFeasible(const std::vector<double>& x) const {
  const LinearProgram& lp = mp_.lp;
  if (static_cast<int>(x.size()) != lp.num_vars()) return false;
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double tol = 1e-6 * (1.0 + std::abs(x[j]));
    if (x[j] < lp.lower[j] - tol || x[j] > lp.upper[j] + tol) return false;
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    const Constraint& row = lp.rows[i];
    const double activity = lp.RowActivity(i, x);
    const double tol = 1e-6 * (1.0 + std::abs(row.rhs));
    if (row.relation != Relation::kGreaterEqual && activity > row.rhs + tol) {
      return false;
    }
    if (row.relation != Relation::kLessEqual && activity < row.rhs - tol) {
      return false;
    }
  }
  return true;
}

double BranchAndBound::Residual(const std::vector<double>& x) const {
  double worst = 0.0;
  for (size_t p = 0; p < mp_.pairs.size(); ++p) {
    const double mult = std::abs(x[mp_.pairs[p].multiplier_var]);
    const double slack = std::abs(Slack(static_cast<int>(p), x));
    worst = std::max(worst, std::min(mult, slack));
  }
  return worst;
}

void BranchAndBound::Offer(const Solution& leaf,
                           const std::vector<int8_t>& fix) {
  (void)fix;
  const double value = Value(leaf);
  if (!Improves(value)) return;
  has_incumbent_ = true;
  incumbent_value_ = value;
  incumbent_ = leaf;
}

void BranchAndBound::TryCandidate(const std::vector<double>& x) {
  if (!RoughlyFeasible(x)) return;
  std::vector<int8_t> fix = SidesOf(x);
  if (!tried_.insert(fix).second) return;
  Solution leaf = SolveNode(fix);
  if (leaf.status != SolveStatus::kOptimal) return;
  // Local search over leaves that share the current point.
  if (options_.leaf_descent) {
    for (int round = 0; round < 50; ++round) {
      bool moved = false;
      for (size_t p = 0; p < fix.size() && !moved; ++p) {
        const double mult = leaf.primal[mp_.pairs[p].multiplier_var];
        const double slack = Slack(static_cast<int>(p), leaf.primal);
        if (mult > options_.complementarity_tol ||
            slack > options_.complementarity_tol) {
          continue;
        }
        std::vector<int8_t> flipped = fix;
        flipped[p] = fix[p] == kMultiplierZero ? kRowTight : kMultiplierZero;
        if (!tried_.insert(flipped).second) continue;
        Solution next = SolveNode(flipped);
        if (next.status == SolveStatus::kOptimal &&
            Value(next) < Value(leaf) - Gap()) {
          leaf = std::move(next);
          fix = std::move(flipped);
          moved = true;
        }
      }
      if (!moved) break;
    }
  }
  Offer(leaf, fix);
}

Solution BranchAndBound::Run(const std::vector<std::vector<double>>& starts) {
  const int num_pairs = static_cast<int>(mp_.pairs.size());
  for (const std::vector<double>& x : starts) TryCandidate(x);

  std::vector<Node> stack;
  stack.push_back({std::vector<int8_t>(num_pairs, kFree), -kInfinity});
  bool truncated = false;
  double open_bound = kInfinity;
  while (!stack.empty()) {
    if (nodes_ >= options_.node_limit) {
      truncated = true;
      for (const Node& n : stack) open_bound = std::min(open_bound, n.bound);
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    if (has_incumbent_ && node.bound >= incumbent_value_ - Gap()) continue;
    ++nodes_;
    Solution relaxed = SolveNode(node.fix);
    if (relaxed.status == SolveStatus::kInfeasible) continue;
    if (relaxed.status == SolveStatus::kUnbounded) {
      unbounded_ = true;
      break;
    }
    if (relaxed.status != SolveStatus::kOptimal) continue;
    const double value = Value(relaxed);
    if (has_incumbent_ && value >= incumbent_value_ - Gap()) continue;

    int branch = -1;
    double worst = options_.complementarity_tol;
    for (int p = 0; p < num_pairs; ++p) {
      if (node.fix[p] != kFree) continue;
      const double v = Violation(p, relaxed.primal);
      if (v > worst) {
        worst = v;
        branch = p;
      }
    }
    if (branch < 0) {
      TryCandidate(relaxed.primal);
      // The relaxation is complementary, so it is optimal for this subtree.
      if (Improves(value)) Offer(relaxed, node.fix);
      continue;
    }
    if (heuristic_ && options_.heuristic_frequency > 0 &&
        (nodes_ - 1) % options_.heuristic_frequency == 0) {
      if (auto candidate = heuristic_(relaxed.primal)) {
        TryCandidate(*candidate);
      }
      if (has_incumbent_ && value >= incumbent_value_ - Gap()) continue;
    }

    const double mult = relaxed.primal[mp_.pairs[branch].multiplier_var];
    const double slack = Slack(branch, relaxed.primal);
    Node zero_mult{node.fix, value};
    zero_mult.fix[branch] = kMultiplierZero;
    Node tight_row{node.fix, value};
    tight_row.fix[branch] = kRowTight;
    // The child nearer to the relaxed point is explored first.
    if (mult <= slack) {
      stack.push_back(std::move(tight_row));
      stack.push_back(std::move(zero_mult));
    } else {
      stack.push_back(std::move(zero_mult));
      stack.push_back(std::move(tight_row));
    }
  }

  Solution out;
  if (unbounded_) {
    out.status = SolveStatus::kUnbounded;
  } else if (has_incumbent_) {
    out = incumbent_;
    out.status = truncated ? SolveStatus::kIterLimit : SolveStatus::kOptimal;
    out.proven_optimal = !truncated;
    out.max_complementarity_residual = Residual(out.primal);
  } else {
    out.status = truncated ? SolveStatus::kIterLimit : SolveStatus::kInfeasible;
  }
  out.node_count = nodes_;
  out.iterations = lp_solves_;
  const double bound = truncated ? std::min(open_bound, incumbent_value_)
                                 : incumbent_value_;
  out.best_bound = sign_ * bound;
  return out;
}

}  // namespace

Solution SolveComplementarity(const MixedProgram& mp,
                              const BranchOptions& options,
                              const PrimalHeuristic& heuristic,
                              const std::vector<std::vector<double>>& starts) {
  if (!mp.Validate().ok()) {
    Solution bad;
    bad.status = SolveStatus::kInfeasible;
    return bad;
  }
  if (mp.pairs.empty()) {
    Solution sol = SolveLp(mp.lp, options.lp);
    sol.node_count = 1;
    return sol;
  }
  BranchAndBound solver(mp, options, heuristic);
  return solver.Run(starts);
}

}  // namespace gridsynth
