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

// Variable DIE lookup at a PC, the Missing/Hollow/Incomplete/Incorrect
// taxonomy, and DIE/assembly diffs between two builds.

#ifndef DEBUGHOLES_DWARFSCOPE_H_
#define DEBUGHOLES_DWARFSCOPE_H_

#include <optional>
#include <string>
#include <vector>

#include "debugholes/buildmatrix.h"
#include "debugholes/dbgtrace.h"
#include "debugholes/dwarf_reader.h"

namespace debugholes {

enum class ScopeKind { kSubprogram, kInlinedSubroutine, kLexicalBlock };
std::string_view ScopeKindName(ScopeKind k);

struct VarDieInfo {
  uint64_t die_offset = 0;
  bool has_location = false;
  bool has_const_value = false;
  std::vector<dwarf::AddrRange> location_ranges;
  ScopeKind scope_kind = ScopeKind::kSubprogram;
  bool abstract_origin_present = false;
};

enum class DieTag { kMissing, kHollow, kIncomplete, kIncorrect, kComplete };
std::string_view DieTagName(DieTag t);
DieTag ParseDieTag(std::string_view name);  // throws kConfig

struct DieVerdict {
  DieTag tag = DieTag::kComplete;
  std::string note;
};

// `pc` is a link-time address (runtime pc minus load bias).
std::optional<VarDieInfo> LookupVarDie(const dwarf::DwarfData& dwarf,
                                       const std::string& function,
                                       const std::string& variable,
                                       uint64_t pc);
std::optional<VarDieInfo> LookupVarDie(const fs::path& executable,
                                       const std::string& function,
                                       const std::string& variable,
                                       uint64_t runtime_pc, int64_t load_bias);

// Total over its inputs. `manual_incorrect` is the analyst override that
// marks a self-consistent DIE as wrong without cross-debugger evidence.
DieVerdict ClassifyDie(const std::optional<VarDieInfo>& die, uint64_t stop_pc,
                       const ValidationOutcome& validation,
                       bool manual_incorrect = false);

// Every concrete DIE of `variable` under `function`, one line each, with
// ranges relative to the enclosing subprogram's entry.
std::vector<std::string> DescribeVarDies(const dwarf::DwarfData& dwarf,
                                         const std::string& function,
                                         const std::string& variable);

struct DieDiff {
  std::vector<std::string> die_a;
  std::vector<std::string> die_b;
  std::string die_diff;  // unified diff of the two renderings
  std::string asm_diff;  // unified diff of normalized assembly
  bool same_code = false;

  bool empty() const { return die_diff.empty() && asm_diff.empty(); }
  std::string Render() const;
};

// Artifacts must carry asm.s next to their executables (Compile writes it).
DieDiff DiffDies(const BuiltArtifact& a, const BuiltArtifact& b,
                 const std::string& function, const std::string& variable);

void to_json(Json& j, const VarDieInfo& v);
void from_json(const Json& j, VarDieInfo& v);
void to_json(Json& j, const DieVerdict& v);
void from_json(const Json& j, DieVerdict& v);

// die_report.json and die_report.txt for one violation.
void WriteDieReport(const fs::path& dir, const std::optional<VarDieInfo>& die,
                    const DieVerdict& verdict, uint64_t stop_pc);

}  // namespace debugholes

#endif  // DEBUGHOLES_DWARFSCOPE_H_
