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

#include "debugholes/conjectures.h"
#include "test_support.h"

namespace debugholes {
namespace {

using testing::ViolationTriple;

std::string Show(const std::set<ViolationTriple>& s) {
  std::string out;
  for (const auto& [c, l, v] : s) out += c + ":" + std::to_string(l) + ":" + v + " ";
  return out.empty() ? "(none)" : out;
}

class CheckerFixtureTest : public ::testing::TestWithParam<fs::path> {};

TEST_P(CheckerFixtureTest, ExactViolationSet) {
  auto f = testing::LoadCheckerFixture(GetParam());
  auto got = testing::RunCheckers(f);
  EXPECT_EQ(got, f.expected) << f.about << "\n got: " << Show(got)
                             << "\n want: " << Show(f.expected);
}

INSTANTIATE_TEST_SUITE_P(
    Fixtures, CheckerFixtureTest, ::testing::ValuesIn(testing::CheckerFixturePaths()),
    [](const ::testing::TestParamInfo<fs::path>& info) {
      return info.param.stem().string();
    });

TEST(CheckerFixtures, SuiteIsLargeEnough) {
  EXPECT_GE(testing::CheckerFixturePaths().size(), 30u);
}

TEST(SourceFacts, ArraySubscriptListing) {
  TestProgram p = MakeProgram(testing::PlantedSource("dh-culprit: none"), "/tmp/a.c");
  SourceFacts f = AnalyzeSource(p);
  const GlobalAssign* ga = f.FindAssign(testing::kPlantedLine);
  ASSERT_NE(ga, nullptr);
  EXPECT_EQ(ga->lhs_storage, StorageKind::kVolatileGlobal);
  std::map<std::string, ConstituentClass> k;
  for (const auto& c : ga->constituents) k[c.name] = c.klass;
  EXPECT_EQ(k["j"], ConstituentClass::kConstantValued);
  EXPECT_EQ(k["i"], ConstituentClass::kUnalterable);
}

TEST(SourceFacts, LiteralFoldingMarksSimplifiable) {
  TestProgram p = MakeProgram(
      "int g;\n"
      "int main(void) {\n"
      "  int x = g;\n"
      "  g = x * 0;\n"
      "  g = x & 0;\n"
      "  g = x + 0;\n"
      "  return 0;\n"
      "}\n",
      "/tmp/s.c");
  SourceFacts f = AnalyzeSource(p);
  EXPECT_EQ(f.simplifiable_lines, (std::vector<int>{4, 5}));
  EXPECT_NE(f.FindAssign(6), nullptr);
}

TEST(SurvivingIdentifiers, AbsorbingOperators) {
  auto ids = [](const std::string& expr) {
    c::TranslationUnit tu = c::Parse("int a, b, g; void f(void) { g = " + expr + "; }");
    std::set<std::string> out;
    c::VisitStmts(tu.functions[0].body, [&](const c::Stmt& s) {
      if (s.kind == c::Stmt::Kind::kExpr) out = SurvivingIdentifiers(s.expr->kids[1]);
    });
    return out;
  };
  EXPECT_EQ(ids("a * 0"), std::set<std::string>{});
  EXPECT_EQ(ids("(a + b) && 0"), std::set<std::string>{});
  EXPECT_EQ(ids("a | ~0"), std::set<std::string>{});
  EXPECT_EQ(ids("1 ? a : b"), std::set<std::string>{"a"});
  EXPECT_EQ(ids("a * 1 + b"), (std::set<std::string>{"a", "b"}));
}

TEST(CheckC3, MatchesBruteForceOracle) {
  std::mt19937_64 rng(20260101);
  for (int i = 0; i < 300; ++i) {
    auto c = testing::RandomC3Case(rng);
    auto got = testing::Triples(CheckC3(c.trace, c.facts));
    auto want = testing::BruteForceC3(c.trace, c.facts);
    ASSERT_EQ(got, want) << "case " << i << " got " << Show(got) << " want " << Show(want);
  }
}

TEST(CheckC3, ExpectedTextNamesEarlierRecord) {
  DebugTrace t;
  auto rec = [](int line, const char* v) {
    LineRecord r;
    r.file = "x.c";
    r.line = line;
    r.frame_function = "main";
    if (v) r.observations["x"] = NormalizeValue(v);
    return r;
  };
  t.records = {rec(3, "1"), rec(4, nullptr), rec(5, "<optimized out>"), rec(6, "2")};
  SourceFacts f;
  f.var_instances.push_back({"main", "x", {{2, 9}}});
  auto vs = CheckC3(t, f);
  // Line 5 (optimized out) already outranks line 4 (not visible).
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].line, 5);
  EXPECT_EQ(vs[0].expected, "rank <= 0 (seen at line 4, assigned at line 2)");
}

Violation MakeViolation(const std::string& pid, int line, const std::string& var,
                        const std::string& level) {
  Violation v;
  v.program_id = pid;
  v.conjecture = ConjectureId::kC1;
  v.line = line;
  v.variable = var;
  v.configs = {{"clang", level}};
  return v;
}

TEST(Dedupe, UniqueEqualsSetUnion) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> levels = {"Og", "O1", "O2", "O3", "Os"};
  for (int round = 0; round < 200; ++round) {
    std::vector<Violation> all;
    std::set<std::tuple<std::string, int, std::string>> uni;
    std::map<std::tuple<std::string, int, std::string>, std::set<std::string>> where;
    for (const auto& l : levels) {
      int n = std::uniform_int_distribution<int>(0, 25)(rng);
      for (int i = 0; i < n; ++i) {
        std::string pid = "p" + std::to_string(rng() % 4);
        int line = static_cast<int>(rng() % 10);
        std::string var = "v" + std::to_string(rng() % 3);
        all.push_back(MakeViolation(pid, line, var, l));
        uni.insert({pid, line, var});
        where[{pid, line, var}].insert(l);
      }
    }
    std::shuffle(all.begin(), all.end(), rng);
    DedupeResult r = Dedupe(all);
    ASSERT_EQ(r.unique.size(), uni.size());
    std::map<std::string, int> per_level;
    for (const auto& [k, ls] : where) {
      for (const auto& l : ls) ++per_level[l];
    }
    EXPECT_EQ(PerLevelCounts(r.level_matrix), per_level);
    int regions = 0;
    for (const auto& [set, n] : VennRegions(r.level_matrix)) regions += n;
    EXPECT_EQ(regions, static_cast<int>(uni.size()));
  }
}

TEST(Dedupe, IsOrderIndependent) {
  std::vector<Violation> vs = {MakeViolation("a", 3, "x", "O2"),
                               MakeViolation("a", 3, "x", "O1"),
                               MakeViolation("b", 1, "y", "O3")};
  vs[0].stop_pc = 2;
  vs[1].stop_pc = 1;
  DedupeResult r1 = Dedupe(vs);
  std::reverse(vs.begin(), vs.end());
  DedupeResult r2 = Dedupe(vs);
  ASSERT_EQ(r1.unique.size(), 2u);
  EXPECT_EQ(r1.unique[0].stop_pc, 1u);
  EXPECT_EQ(r2.unique[0].stop_pc, 1u);
  EXPECT_EQ(r1.level_matrix, r2.level_matrix);
}

TEST(Violation, JsonRoundTrip) {
  Violation v = MakeViolation("abc", 12, "l_3", "O2");
  v.file = "p.c";
  v.function = "func_1";
  v.observed = NormalizeValue("<optimized out>");
  v.expected = "AvailableWithValue";
  v.die_verdict = DieVerdict{DieTag::kHollow, "note"};
  v.stop_pc = 0x401000;
  Json j = v;
  Violation back = j.get<Violation>();
  EXPECT_EQ(back.Key(), v.Key());
  EXPECT_EQ(back.configs, v.configs);
  EXPECT_EQ(back.observed, v.observed);
  ASSERT_TRUE(back.die_verdict);
  EXPECT_EQ(back.die_verdict->tag, DieTag::kHollow);
  EXPECT_EQ(Json(back), j);
}

}  // namespace
}  // namespace debugholes
