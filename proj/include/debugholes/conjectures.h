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

// Static source facts and the three availability conjectures:
//   C1  arguments of an opaque call are available at the call line;
//   C2  constant or unalterable constituents of a global-storage assignment
//       are available at the assignment line;
//   C3  availability of a variable instance never improves over time.

#ifndef DEBUGHOLES_CONJECTURES_H_
#define DEBUGHOLES_CONJECTURES_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "debugholes/dbgtrace.h"
#include "debugholes/dwarfscope.h"
#include "debugholes/program.h"

namespace debugholes {

enum class StorageKind { kGlobalVar, kGlobalArrayElem, kVolatileGlobal };
enum class ConstituentClass { kConstantValued, kUnalterable, kOther };
std::string_view StorageKindName(StorageKind k);
std::string_view ConstituentClassName(ConstituentClass k);

struct Constituent {
  std::string name;
  ConstituentClass klass = ConstituentClass::kOther;
  std::string evidence;
};

struct GlobalAssign {
  int line = 0;
  std::string function;
  StorageKind lhs_storage = StorageKind::kGlobalVar;
  std::vector<Constituent> constituents;
  std::string text;
};

struct Instance {
  int assign_line = 0;
  int scope_end_line = 0;
};

struct VarInstances {
  std::string function;
  std::string variable;
  std::vector<Instance> instances;  // ordered by assign_line
};

struct SourceFacts {
  std::vector<GlobalAssign> global_assign_lines;
  std::vector<VarInstances> var_instances;
  std::vector<OpaqueCallSite> opaque_calls;
  std::vector<int> simplifiable_lines;  // excluded global assignments
  std::vector<std::string> notes;

  const GlobalAssign* FindAssign(int line) const;
};

// Throws kUnsupportedSyntax for programs outside the parser subset.
SourceFacts AnalyzeSource(const TestProgram& program);

// Literal-only constant folding: the identifiers that still matter for the
// value of `e` after absorbing elements (x*0, x&0, 0&&x, ...) are folded.
std::set<std::string> SurvivingIdentifiers(const c::Expr& e);

// Identity of a violation across configurations.
struct ViolationKey {
  std::string program_id;
  ConjectureId conjecture = ConjectureId::kC1;
  int line = 0;
  std::string variable;

  auto Tie() const { return std::tie(program_id, conjecture, line, variable); }
  bool operator<(const ViolationKey& o) const { return Tie() < o.Tie(); }
  bool operator==(const ViolationKey& o) const { return Tie() == o.Tie(); }
  std::string ToString() const;
};

// (toolchain id, optimization level) a violation reproduces under.
using ConfigKey = std::pair<std::string, std::string>;

struct Violation {
  std::string program_id;
  ConjectureId conjecture = ConjectureId::kC1;
  std::string file;
  int line = 0;
  std::string variable;
  std::string function;
  AvailabilityState observed;
  std::string expected;
  std::set<ConfigKey> configs;
  ValidationOutcome validation;
  std::optional<DieVerdict> die_verdict;
  uint64_t stop_pc = 0;
  int original_line = 0;  // pre-injection line, 0 when not applicable

  ViolationKey Key() const { return {program_id, conjecture, line, variable}; }
};

// A check that could not be performed, e.g. an unsteppable call line.
struct SkipRecord {
  ConjectureId conjecture = ConjectureId::kC1;
  int line = 0;
  std::string reason;
};

// Checkers are pure functions of their inputs. Observations count only when
// the record's frame is the function the variable belongs to.
std::vector<Violation> CheckC1(const DebugTrace& trace,
                               const OpaqueCallSite& call,
                               std::vector<SkipRecord>* skips = nullptr);
std::vector<Violation> CheckC2(const DebugTrace& trace,
                               const SourceFacts& facts);
// C3 judges each contiguous pass through an instance's window (records of
// the variable's function with assign_line < line <= window end) and reports
// the first record whose rank exceeds that of an earlier record, in the same
// pass, at a smaller source line.
std::vector<Violation> CheckC3(const DebugTrace& trace,
                               const SourceFacts& facts);

// Sets configs to {(trace toolchain, level)} and maps original lines.
void StampViolations(std::vector<Violation>& vs, const DebugTrace& trace,
                     const TestProgram& program);

struct DedupeResult {
  std::vector<Violation> unique;  // sorted by key
  std::map<ViolationKey, std::set<std::string>> level_matrix;
};

DedupeResult Dedupe(const std::vector<Violation>& per_config);

// Unique violations per exact level combination (Venn regions).
std::map<std::set<std::string>, int> VennRegions(
    const std::map<ViolationKey, std::set<std::string>>& level_matrix);
// Violations reproducing at each level.
std::map<std::string, int> PerLevelCounts(
    const std::map<ViolationKey, std::set<std::string>>& level_matrix);

void to_json(Json& j, const Violation& v);
void from_json(const Json& j, Violation& v);
void to_json(Json& j, const SkipRecord& s);
Json FactsToJson(const SourceFacts& facts);

}  // namespace debugholes

#endif  // DEBUGHOLES_CONJECTURES_H_
