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


#include <string>
#include <vector>

#include "gridsynth/dp.h"
#include "gridsynth/release_json.h"
#include "gridsynth/synth.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "test_util.h"

namespace gridsynth {
namespace {

TEST(RationalJson, RoundTrips) {
  for (const Rational& r : {Rational(0), Rational(1, 3), Rational(-7, 2),
                            ExactRational(0.1) / 3}) {
    const nlohmann::json j = RationalToJson(r);
    absl::StatusOr<Rational> back = RationalFromJson(j);
    ASSERT_TRUE(back.ok());
    EXPECT_EQ(*back, r);
  }
  EXPECT_FALSE(RationalFromJson("1/0").ok());
  EXPECT_FALSE(RationalFromJson("x").ok());
  EXPECT_FALSE(RationalFromJson(0.5).ok());
}

TEST(PrivacyJson, RoundTripsBothSplits) {
  for (const absl::StatusOr<PrivacyParams>& p :
       {MakeCroParams(20.0, 1.0), MakeCroExpParams(5.0, 0.3, 7)}) {
    ASSERT_TRUE(p.ok());
    absl::StatusOr<PrivacyParams> back = PrivacyFromJson(PrivacyToJson(*p));
    ASSERT_TRUE(back.ok());
    EXPECT_EQ(back->algorithm, p->algorithm);
    EXPECT_EQ(back->epsilon, p->epsilon);
    EXPECT_EQ(back->eps1, p->eps1);
    EXPECT_EQ(back->eps2, p->eps2);
    EXPECT_EQ(back->eps3, p->eps3);
    EXPECT_EQ(back->tau, p->tau);
    EXPECT_DOUBLE_EQ(back->alpha, p->alpha);
  }
}

TEST(SynthConfigJson, MissingKeysKeepDefaults) {
  absl::StatusOr<SynthConfig> c = SynthConfigFromJson(
      nlohmann::json{{"alpha", 7.5}, {"tau", 2}});
  ASSERT_TRUE(c.ok());
  EXPECT_DOUBLE_EQ(c->alpha, 7.5);
  EXPECT_EQ(c->tau, 2);
  EXPECT_DOUBLE_EQ(c->gamma, SynthConfig{}.gamma);
  absl::StatusOr<SynthConfig> back = SynthConfigFromJson(SynthConfigToJson(*c));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(SynthConfigToJson(*back), SynthConfigToJson(*c));
}

TEST(ReleaseJson, RoundTripsAndIsStable) {
  testing::Fixture f = testing::LoadFixture(testing::kCase14);
  SynthConfig config;
  config.tau = 2;
  config.eta = 0.1;
  absl::StatusOr<SyntheticRelease> r =
      RunRelease(f.model, f.d, ReleaseAlgorithm::kCroExp, config, 21);
  ASSERT_TRUE(r.ok()) << r.status();
  const nlohmann::json j = ReleaseToJson(*r, f.grid, config);
  EXPECT_EQ(j.at("format_version"), kReleaseFormatVersion);
  const std::string text = j.dump(2);
  EXPECT_EQ(ReleaseToJson(*r, f.grid, config).dump(2), text);

  absl::StatusOr<ReleaseRecord> back =
      ReleaseFromJson(nlohmann::json::parse(text));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->case_name, f.grid.name);
  EXPECT_EQ(back->algorithm, ReleaseAlgorithm::kCroExp);
  EXPECT_EQ(back->seed, 21u);
  EXPECT_EQ(back->d_tilde, r->d_tilde);
  EXPECT_EQ(back->rows, r->rows);
  ASSERT_EQ(back->bus_ids.size(), f.grid.buses.size());
  for (size_t i = 0; i < f.grid.buses.size(); ++i) {
    EXPECT_EQ(back->bus_ids[i], f.grid.buses[i].id);
  }
  ASSERT_EQ(back->ledger.entries.size(), r->ledger.entries.size());
  EXPECT_EQ(back->ledger.TotalExact(), r->ledger.TotalExact());
  EXPECT_TRUE(Account(back->privacy, back->ledger).ok);
  EXPECT_EQ(back->config.tau, 2);
}

TEST(ReleaseJson, RejectsOtherVersions) {
  testing::Fixture f = testing::LoadFixture(testing::kCase3);
  SynthConfig config;
  absl::StatusOr<SyntheticRelease> r =
      RunRelease(f.model, f.d, ReleaseAlgorithm::kPp, config, 1);
  ASSERT_TRUE(r.ok());
  nlohmann::json j = ReleaseToJson(*r, f.grid, config);
  j["format_version"] = kReleaseFormatVersion + 1;
  EXPECT_FALSE(ReleaseFromJson(j).ok());
  j.erase("format_version");
  EXPECT_FALSE(ReleaseFromJson(j).ok());
  EXPECT_FALSE(ReleaseFromJson(nlohmann::json::array()).ok());
}

}  // namespace
}  // namespace gridsynth
