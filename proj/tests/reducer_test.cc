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

#include "debugholes/reducer.h"
#include "test_support.h"

namespace debugholes {
namespace {

TEST(Reducer, ConstructIsWhitespaceNormalized) {
  std::string src = "int a;\n  a  =\tb[i][ (j)*k ];  \n";
  EXPECT_EQ(ConstructAt(src, 2), "a = b[i][ (j)*k ];");
  EXPECT_EQ(ConstructAt(src, 9), "");
}

TEST(Reducer, SpecValidationAndDisabledConfig) {
  InterestingnessSpec s;
  EXPECT_THROW(s.Validate(), Error);
  s.culprit.kind = CulpritAttribution::Kind::kGccFlagSet;
  EXPECT_THROW(s.Validate(), Error);
  s.culprit.gcc_flags = {"-fno-tree-ccp"};
  s.opt_level = OptLevel::kO2;
  EXPECT_NO_THROW(s.Validate());
  EXPECT_EQ(s.DisabledConfig().Describe(), "-O2 -fno-tree-ccp");
  s.culprit.kind = CulpritAttribution::Kind::kClangPass;
  s.culprit.clang_pass = ClangPass{12, "LoopStrengthReducePass", "main"};
  EXPECT_EQ(s.DisabledConfig().extra_flags,
            (std::vector<std::string>{"-mllvm", "-opt-bisect-limit=11"}));
}

TEST(Reducer, SpecJsonRoundTrip) {
  InterestingnessSpec s;
  s.key = {"abc", ConjectureId::kC1, 14, "l_2"};
  s.construct = "x = 1;";
  s.toolchain.compiler_path = "/usr/bin/clang";
  s.toolchain.family = CompilerFamily::kClang;
  s.culprit.kind = CulpritAttribution::Kind::kClangPass;
  s.culprit.clang_pass = ClangPass{3, "GVNPass", "main"};
  s.stub_object = "/tmp/stub.o";
  s.cli_path = "/usr/bin/debugholes";
  Json j = s;
  EXPECT_EQ(Json(j.get<InterestingnessSpec>()), j);
}

TEST(Reducer, FindOpaqueCallSkipsCasts) {
  auto site = FindOpaqueCall(
      c::Parse("void sink(int, int, int);\nint f(void) {\n  int a = 1; long b = 2;\n"
               "  sink(a, (int)b, 7);\n  return 0;\n}\n"),
      "sink");
  ASSERT_TRUE(site);
  EXPECT_EQ(site->line, 4);
  EXPECT_EQ(site->function, "f");
  EXPECT_EQ(site->argument_vars, (std::vector<std::string>{"a", "b"}));
  EXPECT_FALSE(FindOpaqueCall(c::Parse("int main(void) { return 0; }"), "sink"));
}

// Spec for the recorded triple, built against the fake gcc.
InterestingnessSpec TripleSpec(const fs::path& dir) {
  Json t = ReadJson(testing::FixturePath("reduction/triple.json"));
  fs::path cat = dir / "catalog.json";
  testing::WriteCatalog(cat, t["catalog"].get<std::vector<std::string>>());
  InterestingnessSpec s;
  s.key.conjecture = RequireConjecture(t["violation"]["conjecture"].get<std::string>());
  s.key.line = t["violation"]["line"];
  s.key.variable = t["violation"]["variable"];
  std::string original = ReadFile(testing::FixturePath("reduction") / t["program"].get<std::string>());
  s.construct = ConstructAt(original, s.key.line);
  s.toolchain = testing::FakeGcc(cat);
  s.opt_level = RequireOptLevel(t["opt_level"].get<std::string>());
  s.culprit = t["culprit"].get<CulpritAttribution>();
  s.cli_path = testing::BuiltTool("debugholes");
  s.compile_timeout = std::chrono::seconds(30);
  s.trace_timeout = std::chrono::seconds(30);
  return s;
}

class RecordedTriple : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  }
  ScopedTempDir dir_;
};

TEST_F(RecordedTriple, PredicateMatchesRecordedBooleans) {
  InterestingnessSpec spec = TripleSpec(dir_.path());
  Json t = ReadJson(testing::FixturePath("reduction/triple.json"));
  for (const auto& c : t["candidates"]) {
    fs::path file = testing::FixturePath("reduction") / c["file"].get<std::string>();
    InterestingVerdict v = EvaluateCandidate(spec, file);
    EXPECT_EQ(v.interesting, c["interesting"].get<bool>()) << file << ": " << v.reason;
  }
}

TEST_F(RecordedTriple, ScriptExitCodesFollowReducerConvention) {
  InterestingnessSpec spec = TripleSpec(dir_.path());
  fs::path work = dir_.path() / "w";
  fs::path script = MakeInterestingnessTest(spec, work, "cand.c");
  fs::copy_file(testing::FixturePath("reduction/original.c"), work / "cand.c");
  RunOptions o;
  o.cwd = work;
  o.timeout = std::chrono::seconds(120);
  EXPECT_EQ(RunProcess({script.string()}, o).exit_status, 0);
  fs::copy_file(testing::FixturePath("reduction/other_culprit.c"), work / "cand.c",
                fs::copy_options::overwrite_existing);
  EXPECT_EQ(RunProcess({script.string()}, o).exit_status, 1);
  WriteFileAtomic(work / "cand.c", "int main( {\n");
  EXPECT_EQ(RunProcess({script.string()}, o).exit_status, 1);
}

TEST_F(RecordedTriple, ReductionShrinksAndKeepsTheViolation) {
  InterestingnessSpec spec = TripleSpec(dir_.path());
  std::string padded = ReadFile(testing::FixturePath("reduction/original.c"));
  padded += "int unused_1;\nstatic int unused_2(void) { return 4; }\nint unused_3[3];\n";
  TestProgram p = testing::WriteProgram(dir_.path() / "src" / "r.c", padded);
  ReductionSettings rs;
  rs.reducer_path = testing::FixturePath("bin/fake-reduce");
  rs.wall_budget = std::chrono::seconds(600);
  ReductionResult r = RunReduction(p, spec, rs, dir_.path() / "red");
  EXPECT_TRUE(r.final_verification);
  EXPECT_LT(r.reduced_source.size(), padded.size());
  EXPECT_EQ(r.reduced_source.find("unused_2"), std::string::npos);
  EXPECT_GT(r.iterations, 0);
  ASSERT_TRUE(r.retriage);
  EXPECT_FALSE(r.verification_regressed) << r.retriage->Label();

  fs::path bundle = EmitReportBundle(r, spec, CollectBundleInputs(spec, r), dir_.path() / "out");
  for (const char* f : {"r.c", "spec.json", "versions.txt", "commands.txt", "trace.txt",
                        "die.txt", "replay.sh", "README", "attribution.json"}) {
    EXPECT_TRUE(fs::exists(bundle / f)) << f;
  }
  EXPECT_NE(ReadFile(bundle / "die.txt").find("verdict:"), std::string::npos);
  RunOptions o;
  o.timeout = std::chrono::seconds(120);
  EXPECT_EQ(RunProcess({(bundle / "replay.sh").string()}, o).exit_status, 0);
}

TEST_F(RecordedTriple, UninterestingOriginalIsRejected) {
  InterestingnessSpec spec = TripleSpec(dir_.path());
  TestProgram p = testing::WriteProgram(
      dir_.path() / "n.c", ReadFile(testing::FixturePath("reduction/culprit_disabled.c")));
  ReductionSettings rs;
  rs.reducer_path = testing::FixturePath("bin/fake-reduce");
  try {
    RunReduction(p, spec, rs, dir_.path() / "red");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPreconditionFlaky);
  }
}

}  // namespace
}  // namespace debugholes
