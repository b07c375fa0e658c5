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


#include <cmath>
#include <random>

#include "Eigen/Dense"
#include "gridsynth/compact_model.h"
#include "gridsynth/opf.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace gridsynth {
namespace {

TEST(Opf, RadialPairServesTheLoadAtGeneratorCost) {
  testing::Fixture f = testing::LoadFixture(testing::kCase2);
  const OpfResult r = SolveOpf(f.model, f.d);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.cost, 1000.0, 1e-9);
  EXPECT_NEAR(r.p[0], 100.0, 1e-9);
  EXPECT_NEAR(r.v[0], 0.0, 1e-12);
}

TEST(Opf, OverloadedLineIsPricedAtThePenalty) {
  testing::Fixture f = testing::LoadFixture(testing::kCase2);
  Eigen::Vector2d d(0.0, 250.0);
  const OpfResult r = SolveOpf(f.model, d);
  ASSERT_TRUE(r.feasible);
  // 250 MW at $10 plus 50 MW over the 200 MW rating at psi = $100.
  EXPECT_NEAR(r.v[0], 50.0, 1e-9);
  EXPECT_NEAR(r.cost, 2500.0 + 100.0 * 50.0, 1e-7);
}

TEST(Opf, TriangleCongestionByHand) {
  // Flow on 1-2 is (p1 + 100) / 3 <= 90, so the cheap unit stops at 170 MW.
  testing::Fixture f = testing::LoadFixture(testing::kCase3);
  const OpfResult r = SolveOpf(f.model, f.d);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.p[0], 170.0, 1e-9);
  EXPECT_NEAR(r.p[1], 130.0, 1e-9);
  EXPECT_NEAR(r.cost, 7950.0, 1e-7);
  // One more MW on 1-2 moves 3 MW from the $35 unit to the $20 unit.
  const int row = f.model.FirstRow(RowTag::kFlowUpper);
  EXPECT_NEAR(r.duals[row], 45.0, 1e-7);
}

TEST(Opf, InfeasibleBalanceReportsWhy) {
  testing::Fixture f = testing::LoadFixture(testing::kCase2);
  Eigen::Vector2d d(0.0, 600.0);
  std::string why;
  EXPECT_FALSE(BalanceFeasible(f.model, d, &why));
  EXPECT_FALSE(why.empty());
  const OpfResult r = SolveOpf(f.model, d);
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.certificate.empty());
}

// KKT of the compact program: c + sum theta_k a_k = 0, theta >= 0,
// complementary slackness, and the dual objective equals the cost.
TEST(Opf, DualsCertifyOptimality) {
  std::mt19937_64 rng(31);
  for (const char* name :
       {testing::kCase3, testing::kCase4, testing::kCase5, testing::kCase14}) {
    testing::Fixture f = testing::LoadFixture(name);
    for (int trial = 0; trial < 8; ++trial) {
      const Eigen::VectorXd d = testing::PerturbLoads(f, 0.25, rng);
      const OpfResult r = SolveOpf(f.model, d);
      ASSERT_TRUE(r.feasible) << name;
      Eigen::VectorXd station = f.model.c;
      double dual_objective = 0.0;
      for (int k = 0; k < f.model.num_rows(); ++k) {
        const double theta = r.duals[k];
        EXPECT_GE(theta, -1e-9);
        if (!f.model.RowIsFinite(k)) {
          EXPECT_EQ(theta, 0.0);
          continue;
        }
        const CompactRow& row = f.model.rows[k];
        station += theta * row.a;
        const double value = f.model.RowValue(k, r.x, d);
        EXPECT_LE(value, 1e-7 * std::max(1.0, d.lpNorm<Eigen::Infinity>()));
        EXPECT_LE(std::abs(theta * value),
                  1e-6 * std::max(1.0, std::abs(r.cost)));
        dual_objective += theta * (row.b.dot(d) + row.e);
      }
      EXPECT_LT(station.lpNorm<Eigen::Infinity>(), 1e-7) << name;
      EXPECT_NEAR(dual_objective, r.cost,
                  1e-7 * std::max(1.0, std::abs(r.cost)))
          << name;
    }
  }
}

TEST(Opf, CostIsNondecreasingInUniformLoadScaling) {
  testing::Fixture f = testing::LoadFixture(testing::kCase5);
  double previous = -1.0;
  for (double scale : {0.6, 0.7, 0.8, 0.9, 1.0}) {
    const OpfResult r = SolveOpf(f.model, scale * f.d);
    ASSERT_TRUE(r.feasible);
    EXPECT_GE(r.cost, previous - 1e-9);
    previous = r.cost;
  }
}

TEST(Opf, LpRowsMapBackToCompactRows) {
  testing::Fixture f = testing::LoadFixture(testing::kCase14);
  const OpfLp lp = BuildOpfLp(f.model, f.d);
  ASSERT_EQ(lp.lp.num_rows(), static_cast<int>(lp.compact_row.size()));
  for (int i = 0; i < lp.lp.num_rows(); ++i) {
    EXPECT_TRUE(f.model.RowIsFinite(lp.compact_row[i]));
  }
}

}  // namespace
}  // namespace gridsynth
