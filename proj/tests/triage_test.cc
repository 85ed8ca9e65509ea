// Copyright 2026 The Debugholes Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "debugholes/triage.h"
#include "test_support.h"

namespace debugholes {
namespace {

std::vector<std::string> Catalog(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("-fno-pass-" + std::to_string(i));
  return out;
}

bool Has(const BuildConfig& c, const std::string& flag) {
  return std::find(c.extra_flags.begin(), c.extra_flags.end(), flag) != c.extra_flags.end();
}

TEST(FlagRanking, InliningFlagsGoLast) {
  FlagRanking r = FlagRanking::FromCatalog(
      {"-fno-inline-small-functions", "-fno-tree-ccp", "-fno-ipa-icf", "-fno-gcse",
       "-fno-tree-ccp"});
  EXPECT_EQ(r.Ordered(), (std::vector<std::string>{"-fno-tree-ccp", "-fno-gcse",
                                                   "-fno-inline-small-functions",
                                                   "-fno-ipa-icf"}));
  EXPECT_EQ(r.RankOf("-fno-gcse"), 1);
  EXPECT_EQ(r.RankOf("-fno-absent"), -1);
}

TEST(TriageFlags, RecoversEveryPlantedFlag) {
  auto catalog = Catalog(40);
  for (const auto& planted : catalog) {
    auto probe = [&](const BuildConfig& c) -> std::optional<bool> { return !Has(c, planted); };
    CulpritAttribution a = TriageFlags(probe, OptLevel::kO2, catalog);
    ASSERT_EQ(a.kind, CulpritAttribution::Kind::kGccFlagSet);
    EXPECT_EQ(a.gcc_flags, std::set<std::string>{planted});
    EXPECT_EQ(a.confirm_absent, true);
    EXPECT_EQ(a.builds, 42);  // baseline, one per flag, confirmation
    EXPECT_EQ(a.Label(), planted.substr(5));
  }
}

TEST(TriageFlags, SeveralSufficientFlagsAreRanked) {
  auto catalog = Catalog(10);
  auto probe = [&](const BuildConfig& c) -> std::optional<bool> {
    return !(Has(c, "-fno-pass-7") || Has(c, "-fno-pass-2"));
  };
  CulpritAttribution a = TriageFlags(probe, OptLevel::kO1, catalog);
  EXPECT_EQ(a.ranked_flags, (std::vector<std::string>{"-fno-pass-2", "-fno-pass-7"}));
  EXPECT_EQ(a.Label(), "pass-2+pass-7");
}

TEST(TriageFlags, PairSearchIsOptIn) {
  auto catalog = Catalog(6);
  auto probe = [&](const BuildConfig& c) -> std::optional<bool> {
    return !(Has(c, "-fno-pass-1") && Has(c, "-fno-pass-4"));
  };
  CulpritAttribution off = TriageFlags(probe, OptLevel::kO1, catalog);
  EXPECT_EQ(off.kind, CulpritAttribution::Kind::kUnattributed);
  EXPECT_EQ(off.reason, "uncontrollable-by-flags");
  FlagBudget budget;
  budget.pair_budget = 100;
  CulpritAttribution on = TriageFlags(probe, OptLevel::kO1, catalog, budget);
  EXPECT_EQ(on.gcc_flags, (std::set<std::string>{"-fno-pass-1", "-fno-pass-4"}));
}

TEST(TriageFlags, UnattributedReasons) {
  auto absent = [](const BuildConfig&) -> std::optional<bool> { return false; };
  EXPECT_EQ(TriageFlags(absent, OptLevel::kO1, Catalog(3)).reason, "flaky");
  auto always = [](const BuildConfig&) -> std::optional<bool> { return true; };
  EXPECT_EQ(TriageFlags(always, OptLevel::kO1, {}).reason, "empty-catalog");
  FlagBudget tight;
  tight.max_flags = 2;
  EXPECT_EQ(TriageFlags(always, OptLevel::kO1, Catalog(5), tight).reason, "budget-exhausted");
}

TEST(TriageFlags, ParallelMatchesSerial) {
  auto catalog = Catalog(25);
  auto probe = [&](const BuildConfig& c) -> std::optional<bool> {
    return !(Has(c, "-fno-pass-11") || Has(c, "-fno-pass-19"));
  };
  FlagBudget par;
  par.jobs = 4;
  EXPECT_EQ(TriageFlags(probe, OptLevel::kO2, catalog).ranked_flags,
            TriageFlags(probe, OptLevel::kO2, catalog, par).ranked_flags);
}

std::vector<BisectEntry> Pipeline(int n) {
  std::vector<BisectEntry> out;
  for (int i = 1; i <= n; ++i) out.push_back({i, true, "Pass" + std::to_string(i), "main"});
  return out;
}

TEST(TriageBisect, FindsMinimalIndexLikeLinearScan) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 200; ++round) {
    int length = std::uniform_int_distribution<int>(1, 300)(rng);
    int k = std::uniform_int_distribution<int>(1, length)(rng);
    LimitProbe probe = [&](int n) -> std::optional<bool> { return n < 0 || n >= k; };
    CulpritAttribution a = TriageBisect(probe, Pipeline(length));
    ASSERT_EQ(a.kind, CulpritAttribution::Kind::kClangPass);
    EXPECT_EQ(a.clang_pass->index, k);
    EXPECT_EQ(a.clang_pass->index, LinearScanLimit(probe, 0, length));
    EXPECT_EQ(a.clang_pass->pass_name, "Pass" + std::to_string(k));
    EXPECT_EQ(a.confirm_absent, true);
    EXPECT_LE(a.builds, 4 + static_cast<int>(std::ceil(std::log2(length + 1))));
  }
}

TEST(TriageBisect, NonMonotoneFallsBackToScan) {
  // Present only in the window [5, 9]: bisection sees absent at the end.
  LimitProbe window = [](int n) -> std::optional<bool> { return n < 0 || (n >= 5 && n <= 9); };
  CulpritAttribution a = TriageBisect(window, Pipeline(20));
  ASSERT_EQ(a.kind, CulpritAttribution::Kind::kClangPass);
  EXPECT_EQ(a.clang_pass->index, 5);
}

TEST(TriageBisect, UnattributedReasons) {
  LimitProbe never = [](int) -> std::optional<bool> { return false; };
  EXPECT_EQ(TriageBisect(never, Pipeline(5)).reason, "flaky");
  LimitProbe always = [](int) -> std::optional<bool> { return true; };
  EXPECT_EQ(TriageBisect(always, Pipeline(5)).reason, "pre-pipeline");
  EXPECT_EQ(TriageBisect(always, {}).reason, "no-bisect-log");
  // Present without a limit but under no limit value.
  LimitProbe unlimited_only = [](int n) -> std::optional<bool> { return n < 0; };
  EXPECT_EQ(TriageBisect(unlimited_only, Pipeline(6)).reason, "nonmonotonic");
}

TEST(BisectLog, Parses) {
  auto log = ParseBisectLog(
      "BISECT: running pass (1) SROAPass on main\n"
      "noise\n"
      "BISECT: NOT running pass (2) LoopStrengthReducePass on loop %for.body in function main\n"
      "BISECT: running pass (3) GlobalOptPass on module ([module])\n");
  ASSERT_EQ(log.size(), 3u);
  EXPECT_TRUE(log[0].ran);
  EXPECT_FALSE(log[1].ran);
  EXPECT_EQ(log[1].pass_name, "LoopStrengthReducePass");
  EXPECT_EQ(log[2].target, "[module]");
}

TEST(GroupByCulprit, CountsUniqueKeysPerLabel) {
  auto flag = [](const std::string& f) {
    CulpritAttribution a;
    a.kind = CulpritAttribution::Kind::kGccFlagSet;
    a.ranked_flags = {f};
    return a;
  };
  std::vector<std::pair<ViolationKey, CulpritAttribution>> items = {
      {{"p", ConjectureId::kC2, 3, "x"}, flag("-fno-tree-ccp")},
      {{"p", ConjectureId::kC2, 4, "x"}, flag("-fno-tree-ccp")},
      {{"q", ConjectureId::kC2, 3, "x"}, flag("-fno-gcse")},
      {{"q", ConjectureId::kC1, 3, "x"}, flag("-fno-gcse")}};
  auto t = GroupByCulprit(items);
  ASSERT_EQ(t[ConjectureId::kC2].size(), 2u);
  EXPECT_EQ(t[ConjectureId::kC2][0].culprit, "tree-ccp");
  EXPECT_EQ(t[ConjectureId::kC2][0].count, 2);
  EXPECT_EQ(GroupTableCsv(t[ConjectureId::kC1]), "culprit,count\n\"gcse\",1\n");
  EXPECT_NE(RenderGroupTables(t, "gcc").find("C2 (gcc)"), std::string::npos);
}

TEST(Attribution, JsonRoundTrip) {
  CulpritAttribution a;
  a.kind = CulpritAttribution::Kind::kClangPass;
  a.clang_pass = ClangPass{7, "LICMPass", "main"};
  a.baseline_present = true;
  a.confirm_absent = true;
  a.builds = 9;
  Json j = a;
  EXPECT_EQ(Json(j.get<CulpritAttribution>()), j);
}

// Live probes through the fake toolchains.

class FakeToolchainTriage : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  }
  PipelineProbe MakeProbe(const std::string& marker, const ToolchainSpec& tc) {
    TestProgram p = testing::WriteProgram(dir_.path() / "p.c", testing::PlantedSource(marker));
    PipelineProbe::Settings s;
    s.work_dir = dir_.path() / "work";
    return PipelineProbe(p, tc, {p.id, ConjectureId::kC2, testing::kPlantedLine, "j"}, s);
  }
  ScopedTempDir dir_;
};

TEST_F(FakeToolchainTriage, GccFlagFromCatalog) {
  fs::path cat = dir_.path() / "cat.json";
  testing::WriteCatalog(cat, {"-fgcse", "-ftree-ccp", "-finline-small-functions", "-fdce"});
  ToolchainSpec tc = testing::FakeGcc(cat);
  PipelineProbe probe = MakeProbe("dh-culprit: tree-ccp", tc);
  CulpritAttribution a = TriageViolation(probe, tc, OptLevel::kO1, {});
  ASSERT_EQ(a.kind, CulpritAttribution::Kind::kGccFlagSet) << a.reason;
  EXPECT_EQ(a.gcc_flags, std::set<std::string>{"-fno-tree-ccp"});
}

TEST_F(FakeToolchainTriage, ClangBisectIndex) {
  ToolchainSpec tc = testing::FakeClang();
  PipelineProbe probe = MakeProbe("dh-bisect: 6", tc);
  CulpritAttribution a = TriageViolation(probe, tc, OptLevel::kO2, {});
  ASSERT_EQ(a.kind, CulpritAttribution::Kind::kClangPass) << a.reason;
  EXPECT_EQ(a.clang_pass->index, 6);
  EXPECT_EQ(a.clang_pass->pass_name, "LICMPass");
}

TEST_F(FakeToolchainTriage, AbsentViolationIsFlaky) {
  fs::path cat = dir_.path() / "cat.json";
  testing::WriteCatalog(cat, {"-ftree-ccp"});
  ToolchainSpec tc = testing::FakeGcc(cat);
  PipelineProbe probe = MakeProbe("dh-culprit: none", tc);
  CulpritAttribution a = TriageViolation(probe, tc, OptLevel::kO1, {});
  EXPECT_EQ(a.reason, "flaky");
}

}  // namespace
}  // namespace debugholes
