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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "commands.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "test_util.h"

namespace gridsynth {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gridsynth");
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Case(const char* name) { return testing::FixturePath(name); }

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("gridsynth_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Cli, OpfPrintsCost) {
  const CliRun r = Cli({"opf", "--case", Case(testing::kCase3)});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(absl::StrContains(r.out, "cost 7950.000000")) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "violations 0"));
}

TEST(Cli, BadPathExitsTwo) {
  const CliRun r = Cli({"opf", "--case", "/nonexistent/case.m"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UnknownSubcommandOrFlagIsUsageError) {
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli({"opf", "--case", Case(testing::kCase3), "--bogus"}).code, 2);
  EXPECT_EQ(Cli({}).code, 2);
}

TEST(Cli, DumpCaseEmitsJson) {
  const CliRun r =
      Cli({"opf", "--case", Case(testing::kCase3), "--dump-case", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto start = r.out.find('{');
  ASSERT_NE(start, std::string::npos);
  const nlohmann::json j =
      nlohmann::json::parse(r.out.substr(start), nullptr, false);
  ASSERT_FALSE(j.is_discarded());
  EXPECT_EQ(j.at("buses").size(), 3u);
}

TEST(Cli, OpfJsonReport) {
  const fs::path dir = FreshDir("opf_json");
  const CliRun r = Cli({"opf", "--case", Case(testing::kCase4), "--json",
                     (dir / "opf.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const nlohmann::json j = nlohmann::json::parse(Slurp(dir / "opf.json"));
  EXPECT_NEAR(j.at("cost").get<double>(), 6500.0, 1e-6);
}

TEST(Cli, AttackModes) {
  const CliRun r = Cli({"attack", "--case", Case(testing::kCase3), "--eta",
                     "0.05", "--mode", "all"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(absl::StrContains(r.out, "c_att_bo 8100.000000")) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "c_att_oracle 8100.000000"));
  EXPECT_EQ(Cli({"attack", "--case", Case(testing::kCase14), "--mode",
                 "oracle"})
                .code,
            2);
}

nlohmann::json ReadJson(const fs::path& path) {
  return nlohmann::json::parse(Slurp(path));
}

TEST(Cli, PpLedgerHasTwoEntries) {
  const fs::path dir = FreshDir("synth_pp");
  const CliRun r = Cli({"synthesize", "--case", Case(testing::kCase5), "--algo",
                     "pp", "--samples", "2", "--seed", "7", "-o",
                     dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(dir / "release_7.json"));
  ASSERT_TRUE(fs::exists(dir / "release_8.json"));
  ASSERT_TRUE(fs::exists(dir / "summary.csv"));
  const nlohmann::json j = ReadJson(dir / "release_7.json");
  const nlohmann::json& entries = j.at("ledger").at("entries");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].at("epsilon"), "1/2");
  EXPECT_EQ(entries[1].at("epsilon"), "1/2");
  EXPECT_EQ(j.at("ledger").at("total"), "1");

  const CliRun v = Cli({"validate", "--case", Case(testing::kCase5),
                     "--release", dir.string()});
  EXPECT_EQ(v.code, 0) << v.out << v.err;
}

TEST(Cli, CroExpLedgerHasTwoPlusTauEntries) {
  const fs::path dir = FreshDir("synth_exp");
  const CliRun r = Cli({"synthesize", "--case", Case(testing::kCase5), "--algo",
                     "cro-exp", "--tau", "3", "--samples", "1", "--seed", "2",
                     "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const nlohmann::json j = ReadJson(dir / "release_2.json");
  EXPECT_EQ(j.at("ledger").at("entries").size(), 5u);
  EXPECT_EQ(j.at("ledger").at("total"), "1");
}

TEST(Cli, ValidateFlagsTamperedLedger) {
  const fs::path dir = FreshDir("tamper");
  ASSERT_EQ(Cli({"synthesize", "--case", Case(testing::kCase3), "--algo",
                 "pp", "--samples", "1", "--seed", "1", "-o", dir.string()})
                .code,
            0);
  nlohmann::json j = ReadJson(dir / "release_1.json");
  nlohmann::json extra = j["ledger"]["entries"][1];
  extra["query"] = "cost_obfuscation_again";
  j["ledger"]["entries"].push_back(extra);
  std::ofstream(dir / "release_1.json") << j.dump(2);
  const CliRun v = Cli({"validate", "--case", Case(testing::kCase3), "--release",
                     (dir / "release_1.json").string()});
  EXPECT_EQ(v.code, 1);
}

TEST(Cli, EvaluateWritesCsv) {
  const fs::path dir = FreshDir("evaluate");
  ASSERT_EQ(Cli({"synthesize", "--case", Case(testing::kCase4), "--algo",
                 "pp", "--samples", "2", "--seed", "0", "-o", dir.string()})
                .code,
            0);
  const CliRun r = Cli({"evaluate", "--case", Case(testing::kCase4), "--release",
                     dir.string(), "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = Slurp(dir / "evaluate.csv");
  EXPECT_TRUE(absl::StartsWith(csv, "# gridsynth ")) << csv;
  EXPECT_TRUE(absl::StrContains(csv, "damage_percent"));
}

TEST(Cli, Fig3CountsNeedNoSolves) {
  const fs::path dir = FreshDir("fig3");
  const CliRun r = Cli({"experiment", "fig3", "--case", Case(testing::kCase5),
                     "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = Slurp(dir / "fig3.csv");
  EXPECT_TRUE(absl::StrContains(csv, "cro-exp(5)")) << csv;
  EXPECT_TRUE(absl::StrContains(csv, ",63,35")) << csv;
  EXPECT_TRUE(absl::StrContains(csv, ",475,210")) << csv;
}

TEST(Cli, UnknownExperimentIsRejected) {
  const CliRun r = Cli({"experiment", "table9"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(absl::StrContains(r.err, "table9"));
}

TEST(Cli, RerunsAreByteIdenticalAcrossJobCounts) {
  const fs::path a = FreshDir("rerun_a");
  const fs::path b = FreshDir("rerun_b");
  const std::vector<std::string> common = {
      "experiment", "table1", "--case", Case(testing::kCase4), "--samples",
      "3", "--seed", "5"};
  std::vector<std::string> first = common;
  first.insert(first.end(), {"-o", a.string(), "--jobs", "1"});
  std::vector<std::string> second = common;
  second.insert(second.end(), {"-o", b.string(), "--jobs", "2"});
  ASSERT_EQ(Cli(first).code, 0);
  ASSERT_EQ(Cli(second).code, 0);
  for (const char* file : {"table1.csv", "table1_samples.csv"}) {
    const std::string x = Slurp(a / file);
    EXPECT_FALSE(x.empty());
    EXPECT_EQ(x, Slurp(b / file)) << file;
  }
}

TEST(Cli, ConfigFileMatchesFlags) {
  const fs::path dir = FreshDir("config");
  const fs::path cfg = dir / "run.json";
  std::ofstream(cfg) << nlohmann::json{{"case", Case(testing::kCase3)},
                                       {"algorithm", "pp"},
                                       {"samples", 1},
                                       {"seed", 4}}
                            .dump();
  ASSERT_EQ(Cli({"synthesize", "--config", cfg.string(), "-o",
                 (dir / "from_file").string()})
                .code,
            0);
  ASSERT_EQ(Cli({"synthesize", "--case", Case(testing::kCase3), "--algo",
                 "pp", "--samples", "1", "--seed", "4", "-o",
                 (dir / "from_flags").string()})
                .code,
            0);
  EXPECT_EQ(Slurp(dir / "from_file" / "release_4.json"),
            Slurp(dir / "from_flags" / "release_4.json"));

  std::ofstream(cfg) << R"({"case": "x.m", "colour": 1})";
  EXPECT_EQ(Cli({"synthesize", "--config", cfg.string()}).code, 2);
}

}  // namespace
}  // namespace gridsynth
