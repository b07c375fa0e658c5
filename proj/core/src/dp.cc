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

#include "gridsynth/dp.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "gridsynth/opf.h"

namespace gridsynth {

uint64_t Fnv1a(absl::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

absl::Status CheckEpsilon(double eps, absl::string_view what) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, " must be positive and finite, got ", eps));
  }
  return absl::OkStatus();
}

}  // namespace

Rational ExactRational(double value) { return Rational(value); }

uint64_t SplitMix64(uint64_t* state) {
  uint64_t z = (*state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(uint64_t seed) {
  uint64_t state = seed;
  std::array<uint32_t, 8> words;
  for (size_t i = 0; i < words.size(); i += 2) {
    const uint64_t v = SplitMix64(&state);
    words[i] = static_cast<uint32_t>(v);
    words[i + 1] = static_cast<uint32_t>(v >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

RngStream RngStream::ForQuery(uint64_t seed, absl::string_view query,
                              uint64_t index) {
  uint64_t state = seed ^ Fnv1a(query);
  const uint64_t a = SplitMix64(&state);
  state = a ^ (index * 0xd1b54a32d192ed03ULL);
  return RngStream(SplitMix64(&state));
}

double RngStream::UniformOpen() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

absl::StatusOr<Eigen::VectorXd> Laplace(double scale, int n, RngStream& rng) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive and finite, got ", scale));
  }
  if (n < 0) return absl::InvalidArgumentError("negative sample count");
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.UniformOpen() - 0.5;
    out[i] = -scale * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
  }
  return out;
}

double LaplaceCdf(double x, double scale) {
  if (x < 0.0) return 0.5 * std::exp(x / scale);
  return 1.0 - 0.5 * std::exp(-x / scale);
}

std::string QueryKindName(QueryKind kind) {
  switch (kind) {
    case QueryKind::kLoadObfuscation:
      return "load_obfuscation";
    case QueryKind::kCostObfuscation:
      return "cost_obfuscation";
    case QueryKind::kNoisyMax:
      return "noisy_max";
  }
  return "unknown";
}

Rational Ledger::TotalExact() const {
  Rational total = 0;
  for (const LedgerEntry& e : entries) total += e.epsilon;
  return total;
}

std::string AlgorithmName(Algorithm algo) {
  return algo == Algorithm::kCro ? "cro" : "cro-exp";
}

absl::StatusOr<PrivacyParams> MakeCroParams(double alpha, double epsilon) {
  if (absl::Status s = CheckEpsilon(alpha, "alpha"); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(epsilon, "epsilon"); !s.ok()) return s;
  PrivacyParams p;
  p.alpha = alpha;
  p.epsilon = ExactRational(epsilon);
  p.algorithm = Algorithm::kCro;
  p.eps1 = p.epsilon / 2;
  p.eps2 = p.epsilon / 2;
  p.eps3 = 0;
  p.tau = 0;
  return p;
}

absl::StatusOr<PrivacyParams> MakeCroExpParams(double alpha, double epsilon,
                                               int tau) {
  if (absl::Status s = CheckEpsilon(alpha, "alpha"); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(epsilon, "epsilon"); !s.ok()) return s;
  if (tau < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("tau must be at least 1, got ", tau));
  }
  PrivacyParams p;
  p.alpha = alpha;
  p.epsilon = ExactRational(epsilon);
  p.algorithm = Algorithm::kCroExp;
  p.eps1 = p.epsilon / 3;
  p.eps2 = p.epsilon / 3;
  p.eps3 = p.epsilon / (Rational(3) * tau);
  p.tau = tau;
  return p;
}

Rational SplitTotal(const PrivacyParams& params) {
  return params.eps1 + params.eps2 + Rational(params.tau) * params.eps3;
}

AccountVerdict Account(const PrivacyParams& params, const Ledger& ledger) {
  AccountVerdict verdict;
  const std::map<QueryKind, std::pair<int, Rational>> budget = {
      {QueryKind::kLoadObfuscation, {1, params.eps1}},
      {QueryKind::kCostObfuscation, {1, params.eps2}},
      {QueryKind::kNoisyMax,
       {params.algorithm == Algorithm::kCroExp ? params.tau : 0,
        params.eps3}},
  };
  std::map<QueryKind, int> used;
  for (size_t i = 0; i < ledger.entries.size(); ++i) {
    const LedgerEntry& e = ledger.entries[i];
    verdict.total += e.epsilon;
    const auto& [slots, charge] = budget.at(e.kind);
    if (++used[e.kind] > slots) {
      verdict.offending.push_back(static_cast<int>(i));
      verdict.messages.push_back(absl::StrCat(
          "entry ", i, " (", e.query, ") has no budget: ", slots, " ",
          QueryKindName(e.kind), " queries declared"));
    } else if (e.epsilon > charge) {
      verdict.offending.push_back(static_cast<int>(i));
      verdict.messages.push_back(absl::StrCat("entry ", i, " (", e.query,
                                              ") charges ", e.epsilon.str(),
                                              " above its budget ",
                                              charge.str()));
    }
  }
  if (SplitTotal(params) != params.epsilon) {
    verdict.messages.push_back(absl::StrCat("declared split sums to ",
                                            SplitTotal(params).str(),
                                            " instead of ",
                                            params.epsilon.str()));
  }
  if (verdict.total > params.epsilon) {
    verdict.messages.push_back(absl::StrCat("ledger total ",
                                            verdict.total.str(),
                                            " exceeds the budget ",
                                            params.epsilon.str()));
  } else if (verdict.total < params.epsilon) {
    verdict.messages.push_back(absl::StrCat("ledger total ",
                                            verdict.total.str(),
                                            " is below the declared budget ",
                                            params.epsilon.str()));
  }
  verdict.ok = verdict.messages.empty();
  return verdict;
}

absl::StatusOr<ObfuscatedLoadResult> ObfuscateLoads(const Eigen::VectorXd& d,
                                                    double alpha,
                                                    const Rational& eps1_exact,
                                                    RngStream& rng) {
  const double eps1 = static_cast<double>(eps1_exact);
  if (absl::Status s = CheckEpsilon(eps1, "eps1"); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(alpha, "alpha"); !s.ok()) return s;
  const double scale = alpha / eps1;
  absl::StatusOr<Eigen::VectorXd> noise =
      Laplace(scale, static_cast<int>(d.size()), rng);
  if (!noise.ok()) return noise.status();
  return ObfuscatedLoadResult{
      ObfuscatedLoads::AssumeObfuscated(d + *noise),
      LedgerEntry{"load_obfuscation", QueryKind::kLoadObfuscation, alpha,
                  scale, eps1_exact}};
}

absl::StatusOr<ObfuscatedCost> ObfuscateCost(const CompactModel& model,
                                             const Eigen::VectorXd& d,
                                             double alpha, double c_bar,
                                             const Rational& eps2_exact,
                                             RngStream& rng) {
  const double eps2 = static_cast<double>(eps2_exact);
  if (absl::Status s = CheckEpsilon(eps2, "eps2"); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(alpha, "alpha"); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(c_bar, "c_bar"); !s.ok()) return s;
  const OpfResult opf = SolveOpf(model, d);
  if (!opf.feasible) {
    return absl::FailedPreconditionError(
        absl::StrCat("OPF infeasible at the private load: ", opf.certificate));
  }
  const double sensitivity = alpha * c_bar;
  const double scale = sensitivity / eps2;
  absl::StatusOr<Eigen::VectorXd> noise = Laplace(scale, 1, rng);
  if (!noise.ok()) return noise.status();
  return ObfuscatedCost{
      opf.cost + (*noise)[0],
      LedgerEntry{"cost_obfuscation", QueryKind::kCostObfuscation,
                  sensitivity, scale, eps2_exact}};
}

double CostSensitivity(const CompactModel& model, bool include_penalty) {
  return include_penalty ? std::max(model.max_gen_cost, model.psi)
                         : model.max_gen_cost;
}

absl::StatusOr<NoisyMaxResult> NoisyMaxSelect(
    const std::vector<int>& candidates, int tau, double sensitivity,
    const Rational& eps3_exact, const RowSetScore& score, uint64_t seed) {
  const double eps3 = static_cast<double>(eps3_exact);
  if (tau < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("tau must be at least 1, got ", tau));
  }
  if (absl::Status s = CheckEpsilon(eps3, "eps3"); !s.ok()) return s;
  if (absl::Status s = CheckEpsilon(sensitivity, "sensitivity"); !s.ok()) {
    return s;
  }
  const double scale = sensitivity / eps3;
  std::set<int> remaining(candidates.begin(), candidates.end());
  NoisyMaxResult out;
  for (int t = 0; t < tau; ++t) {
    if (!remaining.empty()) {
      int best = -1;
      double best_value = -kInfinity;
      for (int k : remaining) {
        std::vector<int> rows = out.rows;
        rows.push_back(k);
        std::sort(rows.begin(), rows.end());
        absl::StatusOr<double> value = score(rows);
        if (!value.ok()) return value.status();
        RngStream rng = RngStream::ForQuery(
            seed, absl::StrCat("noisy_max_", t), static_cast<uint64_t>(k));
        absl::StatusOr<Eigen::VectorXd> noise = Laplace(scale, 1, rng);
        if (!noise.ok()) return noise.status();
        const double noisy = *value + (*noise)[0];
        if (noisy > best_value) {
          best_value = noisy;
          best = k;
        }
      }
      out.rows.push_back(best);
      remaining.erase(best);
    }
    out.entries.push_back(LedgerEntry{absl::StrCat("noisy_max_", t + 1),
                                      QueryKind::kNoisyMax, sensitivity,
                                      scale, eps3_exact});
  }
  return out;
}

std::vector<int> SelectionCandidates(const CompactModel& model) {
  std::vector<int> out;
  for (int k : AttackableRows(model)) {
    if (model.RowIsFinite(k)) out.push_back(k);
  }
  return out;
}

absl::StatusOr<NoisyMaxResult> NoisyMaxRows(const CompactModel& model,
                                            const Eigen::VectorXd& d,
                                            const AttackSet& delta, int tau,
                                            double alpha, double c_bar,
                                            const Rational& eps3,
                                            uint64_t seed) {
  const RowSetScore score =
      [&](const std::vector<int>& rows) -> absl::StatusOr<double> {
    absl::StatusOr<AttackResult> ro = RoAttackReduced(model, d, delta, rows);
    if (!ro.ok()) return ro.status();
    return ro->cost;
  };
  return NoisyMaxSelect(SelectionCandidates(model), tau, alpha * c_bar, eps3,
                        score, seed);
}

}  // namespace gridsynth
