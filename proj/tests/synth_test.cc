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
#include <random>
#include <vector>

#include "Eigen/Dense"
#include "gridsynth/attack.h"
#include "gridsynth/compact_model.h"
#include "gridsynth/dp.h"
#include "gridsynth/opf.h"
#include "gridsynth/synth.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace gridsynth {
namespace {

ObfuscatedLoads Noisy(const testing::Fixture& f, double spread, uint64_t seed) {
  std::mt19937_64 rng(seed);
  return ObfuscatedLoads::AssumeObfuscated(
      testing::PerturbLoads(f, spread, rng));
}

int LoadDependentRows(const CompactModel& model) {
  int count = 0;
  for (const CompactRow& row : model.rows) {
    if (row.b.cwiseAbs().maxCoeff() > 0.0) ++count;
  }
  return count;
}

TEST(ReportSize, MatchesClosedForm) {
  for (const char* name : {testing::kCase3, testing::kCase5, testing::kCase14}) {
    testing::Fixture f = testing::LoadFixture(name);
    const int64_t n = f.model.n_bus;
    const int64_t x = f.model.num_vars();
    const int64_t k = f.model.num_rows();
    const int64_t r = LoadDependentRows(f.model);
    absl::StatusOr<SizeReport> pp = ReportSize(f.model, ReleaseAlgorithm::kPp);
    absl::StatusOr<SizeReport> cro =
        ReportSize(f.model, ReleaseAlgorithm::kCro);
    const std::vector<int> some = {AttackableRows(f.model).front()};
    absl::StatusOr<SizeReport> exp =
        ReportSize(f.model, ReleaseAlgorithm::kCroExp, some);
    ASSERT_TRUE(pp.ok() && cro.ok() && exp.ok());
    // d~, x2, theta2, and |.| splits for the cost and every load.
    const int64_t pp_vars = n + x + k + 2 + 2 * n;
    EXPECT_EQ(pp->n_variables, pp_vars) << name;
    EXPECT_EQ(pp->n_complementarities, k) << name;
    // x1, theta1, the attack split, and per robust row lambda plus five
    // n-blocks.
    const int64_t block = x + k + 2;
    EXPECT_EQ(cro->n_variables, pp_vars + block + r * (5 * n + 1)) << name;
    EXPECT_EQ(cro->n_complementarities, 2 * k + r * 2 * n) << name;
    EXPECT_EQ(exp->n_variables, pp_vars + block + (5 * n + 1)) << name;
    EXPECT_EQ(exp->n_complementarities, 2 * k + 2 * n) << name;
  }
}

TEST(BuildPostProcess, ReportedSizeIsTheFullForm) {
  testing::Fixture f = testing::LoadFixture(testing::kCase5);
  PostProcessSpec spec;
  spec.attack_block = true;
  spec.delta = FrozenAttackSet(Noisy(f, 0.0, 1), 0.05);
  spec.robust_rows = AttackableRows(f.model);
  spec.form = ProgramForm::kFull;
  absl::StatusOr<PostProcessProgram> full =
      BuildPostProcess(f.model, Noisy(f, 0.0, 1), 1.0, spec);
  spec.form = ProgramForm::kReduced;
  absl::StatusOr<PostProcessProgram> reduced =
      BuildPostProcess(f.model, Noisy(f, 0.0, 1), 1.0, spec);
  ASSERT_TRUE(full.ok() && reduced.ok());
  absl::StatusOr<SizeReport> size = ReportSize(f.model, ReleaseAlgorithm::kCro);
  ASSERT_TRUE(size.ok());
  EXPECT_EQ(SizeOf(full->program, "").n_variables, size->n_variables);
  EXPECT_LT(SizeOf(reduced->program, "").n_variables, size->n_variables);
  EXPECT_TRUE(full->program.Validate().ok());
  EXPECT_TRUE(reduced->program.Validate().ok());
  EXPECT_EQ(full->blocks.size(), AttackableRows(f.model).size());
}

TEST(PostProcess, FullAndReducedFormsAgree) {
  for (const char* name : {testing::kCase2, testing::kCase3}) {
    testing::Fixture f = testing::LoadFixture(name);
    const ObfuscatedLoads d0 = Noisy(f, 0.1, 11);
    const double c_tilde = 1.05 * SolveOpf(f.model, f.d).cost;
    PostProcessSpec spec;
    spec.attack_block = true;
    spec.delta = FrozenAttackSet(d0, 0.1);
    spec.robust_rows = AttackableRows(f.model);
    absl::StatusOr<PostProcessResult> reduced =
        SolvePostProcess(f.model, d0, c_tilde, spec);
    spec.form = ProgramForm::kFull;
    absl::StatusOr<PostProcessResult> full =
        SolvePostProcess(f.model, d0, c_tilde, spec);
    ASSERT_TRUE(reduced.ok()) << reduced.status();
    ASSERT_TRUE(full.ok()) << full.status();
    EXPECT_TRUE(reduced->proven_optimal);
    EXPECT_TRUE(full->proven_optimal) << name;
    EXPECT_NEAR(full->objective, reduced->objective,
                1e-6 * std::max(1.0, std::abs(reduced->objective)))
        << name;
  }
}

TEST(PostProcess, EmbeddedCostsMatchDirectSolves) {
  for (const char* name : {testing::kCase3, testing::kCase4, testing::kCase5}) {
    testing::Fixture f = testing::LoadFixture(name);
    for (uint64_t seed : {1, 2, 3}) {
      const ObfuscatedLoads d0 = Noisy(f, 0.15, seed);
      const double c_tilde = SolveOpf(f.model, f.d).cost * (1.0 + 0.02 * seed);
      PostProcessSpec spec;
      spec.attack_block = true;
      spec.delta = FrozenAttackSet(d0, 0.05);
      spec.robust_rows = SelectionCandidates(f.model);
      absl::StatusOr<PostProcessResult> r =
          SolvePostProcess(f.model, d0, c_tilde, spec);
      ASSERT_TRUE(r.ok()) << r.status();
      const OpfResult opf = SolveOpf(f.model, r->d_tilde);
      ASSERT_TRUE(opf.feasible);
      const double tol = 1e-6 * std::max(1.0, opf.cost);
      EXPECT_NEAR(r->embedded_normal_cost, opf.cost, tol) << name;
      absl::StatusOr<AttackResult> ro =
          RoAttackReduced(f.model, r->d_tilde, spec.delta, spec.robust_rows);
      ASSERT_TRUE(ro.ok());
      EXPECT_NEAR(r->embedded_attack_cost, ro->cost, tol) << name;
      EXPECT_NEAR(PostProcessObjective(f.model, d0, c_tilde, spec, r->d_tilde),
                  r->objective, tol)
          << name;
    }
  }
}

TEST(PostProcess, NeverWorseThanTheObfuscatedStart) {
  testing::Fixture f = testing::LoadFixture(testing::kCase5);
  for (uint64_t seed : {4, 5, 6}) {
    const ObfuscatedLoads d0 = Noisy(f, 0.1, seed);
    const double c_tilde = 0.97 * SolveOpf(f.model, f.d).cost;
    PostProcessSpec spec;
    spec.gamma = 1e-3;
    absl::StatusOr<PostProcessResult> r =
        SolvePostProcess(f.model, d0, c_tilde, spec);
    ASSERT_TRUE(r.ok());
    const double at_start =
        PostProcessObjective(f.model, d0, c_tilde, spec, d0.values());
    EXPECT_LE(r->objective, at_start + 1e-6);
    EXPECT_GE(r->d_tilde.minCoeff(), 0.0);
  }
}

TEST(PostProcess, ExactTargetIsMatchedWhenReachable) {
  // With C~ equal to the OPF cost at d~0 and d~0 feasible, the optimum is d~0.
  testing::Fixture f = testing::LoadFixture(testing::kCase14);
  const ObfuscatedLoads d0 = Noisy(f, 0.05, 8);
  const double c_tilde = SolveOpf(f.model, d0.values()).cost;
  absl::StatusOr<PostProcessResult> r =
      PostProcessPp(f.model, d0, c_tilde, 1e-3);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->objective, 0.0, 1e-6);
  EXPECT_LT((r->d_tilde - d0.values()).lpNorm<Eigen::Infinity>(), 1e-6);
}

SynthConfig SmallConfig() {
  SynthConfig config;
  config.alpha = 20.0;
  config.epsilon = 1.0;
  config.eta = 0.05;
  config.tau = 3;
  return config;
}

TEST(RunRelease, PpReleaseIsFeasibleAndAccounted) {
  testing::Fixture f = testing::LoadFixture(testing::kCase5);
  absl::StatusOr<SyntheticRelease> r =
      RunRelease(f.model, f.d, ReleaseAlgorithm::kPp, SmallConfig(), 17);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_GE(r->d_tilde.minCoeff(), 0.0);
  EXPECT_TRUE(SolveOpf(f.model, r->d_tilde).feasible);
  EXPECT_EQ(r->ledger.entries.size(), 2u);
  EXPECT_TRUE(Account(r->privacy, r->ledger).ok);
  EXPECT_DOUBLE_EQ(r->c_att_ro, r->c_opf);
  EXPECT_EQ(r->rounds, 1);
  EXPECT_EQ(r->size.n_variables,
            ReportSize(f.model, ReleaseAlgorithm::kPp)->n_variables);
}

TEST(RunRelease, IsReproducible) {
  testing::Fixture f = testing::LoadFixture(testing::kCase5);
  for (ReleaseAlgorithm algo :
       {ReleaseAlgorithm::kPp, ReleaseAlgorithm::kCro,
        ReleaseAlgorithm::kCroExp}) {
    absl::StatusOr<SyntheticRelease> a =
        RunRelease(f.model, f.d, algo, SmallConfig(), 3);
    absl::StatusOr<SyntheticRelease> b =
        RunRelease(f.model, f.d, algo, SmallConfig(), 3);
    absl::StatusOr<SyntheticRelease> c =
        RunRelease(f.model, f.d, algo, SmallConfig(), 4);
    ASSERT_TRUE(a.ok() && b.ok() && c.ok());
    EXPECT_EQ(a->d_tilde, b->d_tilde);
    EXPECT_EQ(a->rows, b->rows);
    EXPECT_NE(a->d_initial, c->d_initial);
  }
}

TEST(RunRelease, CroExpChargesEveryRound) {
  testing::Fixture f = testing::LoadFixture(testing::kCase14);
  SynthConfig config = SmallConfig();
  config.eta = 0.15;
  absl::StatusOr<SyntheticRelease> r =
      RunRelease(f.model, f.d, ReleaseAlgorithm::kCroExp, config, 9);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->ledger.entries.size(), 2u + config.tau);
  EXPECT_EQ(r->ledger.TotalExact(), ExactRational(config.epsilon));
  EXPECT_EQ(static_cast<int>(r->rows.size()), config.tau);
  EXPECT_TRUE(Account(r->privacy, r->ledger).ok);

  config.tau = 0;
  absl::StatusOr<SyntheticRelease> none =
      RunRelease(f.model, f.d, ReleaseAlgorithm::kCroExp, config, 9);
  ASSERT_TRUE(none.ok());
  EXPECT_EQ(none->ledger.entries.size(), 2u);
  EXPECT_TRUE(none->rows.empty());
  EXPECT_EQ(none->privacy.eps1, ExactRational(config.epsilon) / 2);
}

TEST(RunRelease, CroAttackSetCoversTheRelease) {
  testing::Fixture f = testing::LoadFixture(testing::kCase5);
  SynthConfig config = SmallConfig();
  for (uint64_t seed = 0; seed < 5; ++seed) {
    absl::StatusOr<SyntheticRelease> r =
        RunRelease(f.model, f.d, ReleaseAlgorithm::kCro, config, seed);
    ASSERT_TRUE(r.ok()) << r.status();
    EXPECT_LE(r->rounds, config.attack_set_rounds);
    if (r->rounds < config.attack_set_rounds) {
      const Eigen::VectorXd reach = config.eta * r->d_tilde.cwiseMax(0.0);
      EXPECT_LE((reach - r->delta.delta_hi).maxCoeff(), 1e-6);
    }
    // The embedded attack cost matches the robust value at the release.
    absl::StatusOr<AttackResult> ro =
        RoAttackReduced(f.model, r->d_tilde, r->delta, r->rows);
    ASSERT_TRUE(ro.ok());
    EXPECT_NEAR(r->stats.embedded_attack_cost, ro->cost, 1e-6 * ro->cost);
    EXPECT_NEAR(r->stats.embedded_normal_cost, r->c_opf, 1e-6 * r->c_opf);
  }
}

TEST(RunRelease, RejectsBadInputs) {
  testing::Fixture f = testing::LoadFixture(testing::kCase3);
  SynthConfig config = SmallConfig();
  EXPECT_FALSE(RunRelease(f.model, Eigen::VectorXd::Zero(2),
                          ReleaseAlgorithm::kPp, config, 0)
                   .ok());
  config.epsilon = 0.0;
  EXPECT_FALSE(RunRelease(f.model, f.d, ReleaseAlgorithm::kPp, config, 0).ok());
  config = SmallConfig();
  config.eta = -0.1;
  EXPECT_FALSE(RunRelease(f.model, f.d, ReleaseAlgorithm::kCro, config, 0).ok());
  EXPECT_FALSE(ParseReleaseAlgorithm("nope").ok());
  EXPECT_EQ(*ParseReleaseAlgorithm("cro-exp"), ReleaseAlgorithm::kCroExp);
}

}  // namespace
}  // namespace gridsynth
