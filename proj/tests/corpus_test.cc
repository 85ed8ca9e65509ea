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

#include "debugholes/buildmatrix.h"
#include "debugholes/corpus.h"
#include "debugholes/reducer.h"
#include "test_support.h"

namespace debugholes {
namespace {

GeneratorSettings Settings(const fs::path& out) {
  GeneratorSettings s;
  s.generator_path = testing::BuiltTool("minigen");
  s.out_dir = out;
  return s;
}

TEST(Corpus, GenerationIsDeterministic) {
  ScopedTempDir dir;
  GenerationRecipe r;
  r.seed = 17;
  r.generator_options = {"--max-funcs", "3"};
  TestProgram a = GenerateProgram(r, Settings(dir.path() / "a"));
  TestProgram b = GenerateProgram(r, Settings(dir.path() / "b"));
  EXPECT_EQ(a.id, b.id);
  EXPECT_EQ(a.id, Sha256Hex(ReadFile(a.source_path)));
  ASSERT_TRUE(a.recipe);
  EXPECT_EQ(a.recipe->effective_seed, 17u);
  EXPECT_NE(a.FindFunction("main"), nullptr);
  r.seed = 18;
  EXPECT_NE(GenerateProgram(r, Settings(dir.path() / "a")).id, a.id);
}

TEST(Corpus, LengthLimitRetriesWithNextSeed) {
  ScopedTempDir dir;
  GenerationRecipe r;
  r.seed = 5;
  r.max_source_lines = 1;
  GeneratorSettings s = Settings(dir.path());
  s.retry_budget = 2;
  try {
    GenerateProgram(r, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRetriesExhausted);
  }
}

TEST(Corpus, MissingGeneratorFails) {
  GeneratorSettings s;
  s.generator_path = "/nonexistent/csmith";
  try {
    GenerateProgram({}, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeneratorFailed);
  }
}

TEST(Corpus, AssortmentsLoad) {
  auto sets = LoadAssortments();
  EXPECT_GE(sets.size(), 10u);
}

TEST(Corpus, ScreenFlagsBlockingWarningsAndAnalyzer) {
  if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  ScopedTempDir dir;
  ScreenSettings s;
  s.toolchains = {testing::HostGcc()};
  TestProgram clean = testing::WriteProgram(
      dir.path() / "clean.c", "int g;\nint main(void) { g = 3; return g - 3; }\n");
  EXPECT_TRUE(ScreenUndefinedBehavior(clean, s).clean);

  TestProgram uninit = testing::WriteProgram(
      dir.path() / "uninit.c", "int main(void) { int x; return x; }\n");
  ScreenVerdict v = ScreenUndefinedBehavior(uninit, s);
  EXPECT_FALSE(v.clean);

  TestProgram marked = testing::WriteProgram(
      dir.path() / "marked.c", "/* DH_UB */\nint main(void) { return 0; }\n");
  s.analyzer_path = testing::FixturePath("bin/fake-analyzer");
  EXPECT_FALSE(ScreenUndefinedBehavior(marked, s).clean);
  EXPECT_TRUE(ScreenUndefinedBehavior(clean, s).clean);

  s.analyzer_path = "/nonexistent/frama-c";
  ScreenVerdict skipped = ScreenUndefinedBehavior(clean, s);
  EXPECT_TRUE(skipped.clean);
  EXPECT_TRUE(skipped.analyzer_skipped);
}

TEST(Corpus, GeneratedProgramsPassTheScreen) {
  if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  ScopedTempDir dir;
  ScreenSettings s;
  s.toolchains = {testing::HostGcc()};
  GeneratorSettings g = Settings(dir.path());
  g.check_toolchain = testing::HostGcc();
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    GenerationRecipe r;
    r.seed = seed * 1000;
    TestProgram p = GenerateProgram(r, g);
    ScreenVerdict v = ScreenUndefinedBehavior(p, s);
    EXPECT_TRUE(v.clean) << p.source_path << ": "
                         << (v.findings.empty() ? "" : v.findings[0].text);
  }
}

constexpr const char* kInjectable =
    "int g;\n"
    "static int f(int a) {\n"
    "  int b = a + 1;\n"
    "  int c = b * 2;\n"
    "  g = c;\n"
    "  return c;\n"
    "}\n"
    "int main(void) {\n"
    "  int m = 4;\n"
    "  g = f(m);\n"
    "  return 0;\n"
    "}\n";

TEST(Corpus, InjectionKeepsLinesAndRecordsMapping) {
  ScopedTempDir dir;
  TestProgram p = testing::WriteProgram(dir.path() / "p.c", kInjectable);
  for (uint64_t seed = 0; seed < 8; ++seed) {
    TestProgram inj = InjectOpaqueCall(p, seed);
    ASSERT_TRUE(inj.injected_call);
    ASSERT_TRUE(inj.line_map);
    EXPECT_EQ(inj.parent_id, p.id);
    const OpaqueCallSite& call = *inj.injected_call;
    EXPECT_FALSE(call.argument_vars.empty());
    auto lines = SplitLines(inj.source_text);
    EXPECT_NE(lines[call.line - 1].find("dh_opaque_sink("), std::string::npos);
    EXPECT_EQ(inj.line_map->ToOriginal(call.line), 0);
    // Every original line survives, shifted by the mapping.
    auto orig = SplitLines(p.source_text);
    for (int l = 1; l <= static_cast<int>(orig.size()); ++l) {
      EXPECT_NE(lines[inj.line_map->ToInjected(l) - 1].find(Trim(orig[l - 1])),
                std::string::npos) << "line " << l;
    }
    auto found = FindOpaqueCall(c::Parse(inj.source_text), "dh_opaque_sink");
    ASSERT_TRUE(found);
    EXPECT_EQ(found->line, call.line);
    EXPECT_EQ(found->argument_vars, call.argument_vars);
  }
}

TEST(Corpus, InjectionNeedsAnInitializedLocal) {
  TestProgram p = MakeProgram("int g;\nint main(void) {\n  g = 1;\n  return 0;\n}\n", "/tmp/n.c");
  try {
    InjectOpaqueCall(p, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoEligibleSite);
  }
}

TEST(Corpus, InjectedProgramLinksAgainstStub) {
  if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  ScopedTempDir dir;
  TestProgram p = testing::WriteProgram(dir.path() / "p.c", kInjectable);
  InjectionSettings is;
  is.check_toolchain = testing::HostGcc();
  TestProgram inj = InjectOpaqueCall(p, 3, is);
  fs::path stub = BuildStubObject(testing::HostGcc(), dir.path());
  BuildConfig cfg;
  cfg.opt_level = OptLevel::kO2;
  cfg.link_stub = true;
  CompileSettings cs;
  cs.out_dir = dir.path() / "build";
  cs.stub_object = stub;
  BuiltArtifact a = Compile(inj, testing::HostGcc(), cfg, cs);
  EXPECT_EQ(a.exit_status, 0) << a.build_log;
  EXPECT_TRUE(fs::exists(a.executable_path));
}

TEST(Corpus, SidecarRecordsRecipe) {
  TestProgram p = MakeProgram(kInjectable, "/tmp/s.c");
  GenerationRecipe r;
  r.seed = 9;
  r.retries = {{8, "too long (900)"}};
  p.recipe = r;
  Json j = ProgramSidecar(p, ScreenVerdict{});
  EXPECT_EQ(j["recipe"]["seed"], 9);
  EXPECT_EQ(j["recipe"]["retries"].size(), 1u);
}

}  // namespace
}  // namespace debugholes
