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
#include "test_support.h"

namespace debugholes {
namespace {

TEST(BuildConfig, O0RejectsDisablingFlags) {
  BuildConfig c;
  c.extra_flags = {"-fno-tree-ccp"};
  EXPECT_THROW(c.Validate(), Error);
  c.opt_level = OptLevel::kO1;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.Describe(), "-O1 -fno-tree-ccp");
}

TEST(BuildConfig, HashCoversEveryField) {
  BuildConfig a;
  a.opt_level = OptLevel::kO2;
  BuildConfig b = a;
  EXPECT_EQ(a.Hash(), b.Hash());
  b.link_stub = true;
  EXPECT_NE(a.Hash(), b.Hash());
  b = a;
  b.extra_flags = {"-fno-gcse"};
  EXPECT_NE(a.Hash(), b.Hash());
  Json j = b;
  EXPECT_EQ(j.get<BuildConfig>().Hash(), b.Hash());
}

TEST(BuildMatrix, CompileCommandShape) {
  ToolchainSpec t;
  t.compiler_path = "/usr/bin/gcc";
  t.include_dirs = {"/opt/runtime"};
  TestProgram p = MakeProgram("int main(void) { return 0; }\n", "/w/p.c");
  BuildConfig c;
  c.opt_level = OptLevel::kOs;
  c.extra_flags = {"-fno-inline"};
  c.link_stub = true;
  auto argv = CompileCommand(p, t, c, fs::path("/w/stub.o"), "/w/a.out");
  std::vector<std::string> want = {"/usr/bin/gcc", "-Os", "-g", "-fno-inline",
                                   "-I/opt/runtime", "-w", "/w/p.c", "/w/stub.o",
                                   "-o", "/w/a.out"};
  EXPECT_EQ(argv, want);
}

TEST(BuildMatrix, NormalizeAssemblyIgnoresDebugNoise) {
  std::string a =
      "\t.file\t\"p.c\"\n\t.text\n.Ltext0:\nmain:\n.LFB0:\n\t.loc 1 2 3\n"
      "\tmovl\t$0, %eax\t# comment\n\tjmp .L3\n.L3:\n\tret\n"
      "\t.section\t.debug_info,\"\",@progbits\n\t.long 0x55\n";
  std::string b =
      "\t.file\t\"q.c\"\n\t.text\nmain:\n.LVL9:\n\t.loc 1 7 1\n"
      "\tmovl $0,  %eax\n\tjmp .L7\n.L7:\n\tret\n";
  EXPECT_EQ(NormalizeAssembly(a), NormalizeAssembly(b));
  EXPECT_EQ(NormalizeAssembly(a).find("debug_info"), std::string::npos);
  EXPECT_NE(NormalizeAssembly(a), NormalizeAssembly(b + "\tnop\n"));
}

TEST(BuildMatrix, FlagsFromCatalogWhenDumpIsRefused) {
  ScopedTempDir dir;
  if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  fs::path cat = dir.path() / "cat.json";
  testing::WriteCatalog(cat, {"-ftree-ccp", "-fno-gcse"});
  ToolchainSpec t = testing::FakeGcc(cat);
  EXPECT_EQ(EnumerateOptFlags(t, OptLevel::kO1),
            (std::vector<std::string>{"-fno-tree-ccp", "-fno-gcse"}));
  EXPECT_TRUE(EnumerateOptFlags(t, OptLevel::kO3).empty());
  EXPECT_TRUE(EnumerateOptFlags(t, OptLevel::kO0).empty());
  t.flag_catalog_path.reset();
  try {
    EnumerateOptFlags(t, OptLevel::kO1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCatalogUnavailable);
  }
}

TEST(BuildMatrix, HostGccDumpsItsFlags) {
  if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  auto flags = EnumerateOptFlags(testing::HostGcc(), OptLevel::kO1);
  EXPECT_GT(flags.size(), 30u);
  EXPECT_NE(std::find(flags.begin(), flags.end(), "-fno-tree-ccp"), flags.end());
}

TEST(BuildMatrix, BundledCatalogMatchesPinnedGcc) {
  Json j = ReadJson(DataPath("gcc-11.4-flags.json"));
  EXPECT_EQ(j["levels"]["O1"].size(), 97u);
  EXPECT_EQ(j["levels"]["O2"].size(), 140u);
}

TEST(BuildMatrix, CompileWritesArtifacts) {
  if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  ScopedTempDir dir;
  TestProgram p = testing::WriteProgram(dir.path() / "p.c",
                                        "int g;\nint main(void) { g = 1; return 0; }\n");
  BuildConfig c;
  c.opt_level = OptLevel::kO2;
  CompileSettings s;
  s.out_dir = dir.path() / "o2";
  BuiltArtifact a = Compile(p, testing::HostGcc(), c, s);
  EXPECT_TRUE(fs::exists(a.executable_path));
  EXPECT_TRUE(fs::exists(s.out_dir / "build.log"));
  EXPECT_TRUE(fs::exists(s.out_dir / "meta.json"));
  EXPECT_EQ(a.asm_hash.size(), 64u);
  EXPECT_EQ(ReadJson(s.out_dir / "meta.json").get<BuiltArtifact>().asm_hash, a.asm_hash);

  // Same code under a different debug-only spelling hashes the same.
  c.debug_flags = {"-g", "-g3"};
  s.out_dir = dir.path() / "o2g3";
  EXPECT_EQ(Compile(p, testing::HostGcc(), c, s).asm_hash, a.asm_hash);
}

TEST(BuildMatrix, CompileFailureIsTyped) {
  if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  ScopedTempDir dir;
  TestProgram bad = testing::WriteProgram(dir.path() / "bad.c", "int main( {\n");
  CompileSettings s;
  s.out_dir = dir.path() / "b";
  try {
    Compile(bad, testing::HostGcc(), BuildConfig{}, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCompileFailed);
  }
  TestProgram unresolved = testing::WriteProgram(
      dir.path() / "u.c", "void nowhere(void);\nint main(void) { nowhere(); return 0; }\n");
  s.out_dir = dir.path() / "u";
  try {
    Compile(unresolved, testing::HostGcc(), BuildConfig{}, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLinkFailed);
  }
}

TEST(Toolchain, ProbeReadsVersion) {
  if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  ToolchainSpec t = testing::HostGcc();
  EXPECT_FALSE(t.version_string.empty());
  EXPECT_EQ(t.Id(), "gcc-" + t.version_string);
  EXPECT_EQ(testing::FakeClang().Id(), "clang-14.0.0");
}

}  // namespace
}  // namespace debugholes
