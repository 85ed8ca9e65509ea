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

#include "debugholes/dwarfscope.h"
#include "debugholes/elf_reader.h"
#include "test_support.h"

namespace debugholes {
namespace {

struct FixtureElf {
  fs::path exe = testing::BuiltTool("tests/dwarf_fixture");
  ElfFile elf = ElfFile::Load(exe);
  dwarf::DwarfData dw = dwarf::DwarfData::Load(elf);
  uint64_t probe = *elf.SymbolAddress("probe");
  uint64_t early = *elf.SymbolAddress("probe_early");
  uint64_t late = *elf.SymbolAddress("probe_late");
};

TEST(DwarfReader, ParsesHandWrittenUnit) {
  FixtureElf f;
  ASSERT_EQ(f.dw.units().size(), 1u);
  EXPECT_EQ(f.dw.units()[0].version, 4);
  EXPECT_EQ(f.dw.units()[0].name, "five_verdicts.c");
  int vars = 0;
  for (const auto& d : f.dw.dies()) vars += d.tag == dwarf::kTagVariable;
  EXPECT_EQ(vars, 4);
}

TEST(DwarfReader, LocationListIsAbsolute) {
  FixtureElf f;
  for (const auto& d : f.dw.dies()) {
    if (f.dw.Name(d) != "partial") continue;
    auto list = f.dw.LocationList(d);
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0].lo, f.early);
    EXPECT_EQ(list[0].hi, f.late);
    return;
  }
  FAIL() << "no DIE named partial";
}

TEST(DwarfScope, LookupShapes) {
  FixtureElf f;
  auto hollow = LookupVarDie(f.dw, "probe", "hollow", f.early);
  ASSERT_TRUE(hollow);
  EXPECT_FALSE(hollow->has_location);
  EXPECT_FALSE(hollow->has_const_value);
  auto partial = LookupVarDie(f.dw, "probe", "partial", f.early);
  ASSERT_TRUE(partial);
  ASSERT_EQ(partial->location_ranges.size(), 1u);
  auto folded = LookupVarDie(f.dw, "probe", "folded", f.late);
  ASSERT_TRUE(folded);
  EXPECT_TRUE(folded->has_const_value);
  EXPECT_FALSE(LookupVarDie(f.dw, "probe", "absent", f.early));
  EXPECT_FALSE(LookupVarDie(f.dw, "other", "hollow", f.early));
  // Outside the function nothing covers the pc.
  EXPECT_FALSE(LookupVarDie(f.dw, "probe", "hollow", f.probe - 1));
}

TEST(DwarfScope, FiveVerdicts) {
  FixtureElf f;
  ValidationOutcome none;
  ValidationOutcome confirmed;
  confirmed.confirmed_in = {"lldb-14"};
  ValidationOutcome refuted;
  refuted.refuted_in = {"lldb-14"};
  auto verdict = [&](const char* var, uint64_t pc, const ValidationOutcome& v) {
    return ClassifyDie(LookupVarDie(f.dw, "probe", var, pc), pc, v).tag;
  };
  EXPECT_EQ(verdict("absent", f.late, none), DieTag::kMissing);
  EXPECT_EQ(verdict("hollow", f.late, none), DieTag::kHollow);
  EXPECT_EQ(verdict("partial", f.late, none), DieTag::kIncomplete);
  EXPECT_EQ(verdict("partial", f.early, none), DieTag::kComplete);
  EXPECT_EQ(verdict("inreg", f.late, confirmed), DieTag::kIncorrect);
  EXPECT_EQ(verdict("inreg", f.late, none), DieTag::kComplete);
  EXPECT_EQ(verdict("folded", f.late, refuted), DieTag::kComplete);
}

TEST(DwarfScope, ManualOverrideMarksIncorrect) {
  VarDieInfo die;
  die.has_const_value = true;
  EXPECT_EQ(ClassifyDie(die, 0, {}, true).tag, DieTag::kIncorrect);
}

TEST(DwarfScope, DescribeListsScopePath) {
  FixtureElf f;
  auto lines = DescribeVarDies(f.dw, "probe", "partial");
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines[0].rfind("subprogram: location=list", 0), 0u) << lines[0];
}

TEST(DwarfScope, SnapshotCategorySplit) {
  Json j = ReadJson(DataPath("die_snapshots.json"));
  std::map<std::string, int> split;
  for (const auto& r : j.at("records")) {
    std::optional<VarDieInfo> die;
    if (!r.at("die").is_null()) die = r.at("die").get<VarDieInfo>();
    ValidationOutcome v = r.at("validation").get<ValidationOutcome>();
    DieVerdict got = ClassifyDie(die, r.at("stop_pc").get<uint64_t>(), v,
                                 r.value("manual_incorrect", false));
    EXPECT_EQ(DieTagName(got.tag), r.at("expected").get<std::string>())
        << r.at("tracker_id");
    std::string system = r.at("system");
    if (system == "gcc" || system == "clang") ++split[std::string(DieTagName(got.tag))];
  }
  EXPECT_EQ(split, (std::map<std::string, int>{
                       {"Missing", 4}, {"Hollow", 16}, {"Incomplete", 12}, {"Incorrect", 3}}));
}

TEST(DwarfScope, CompiledVariableIsFound) {
  if (!testing::HaveGccAndGdb()) GTEST_SKIP() << "gcc/gdb not installed";
  ScopedTempDir dir;
  TestProgram p = testing::WriteProgram(
      dir.path() / "v.c",
      "volatile int sink;\nint main(void) {\n  int x = 3;\n  sink = x;\n  return 0;\n}\n");
  CompileSettings s;
  s.out_dir = dir.path() / "o0";
  s.with_assembly = false;
  BuiltArtifact a = Compile(p, testing::HostGcc(), BuildConfig{}, s);
  ElfFile elf = ElfFile::Load(a.executable_path);
  uint64_t main_pc = *elf.SymbolAddress("main");
  auto dw = dwarf::DwarfData::Load(elf);
  auto die = LookupVarDie(dw, "main", "x", main_pc + 8);
  ASSERT_TRUE(die);
  EXPECT_TRUE(die->has_location);
  EXPECT_FALSE(dw.LineTable(dw.units()[0]).empty());
}

TEST(DwarfScope, ElfErrorsAreTyped) {
  ScopedTempDir dir;
  WriteFileAtomic(dir.path() / "junk", "not an elf file at all");
  try {
    ElfFile::Load(dir.path() / "junk");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedDwarf);
  }
}

}  // namespace
}  // namespace debugholes
