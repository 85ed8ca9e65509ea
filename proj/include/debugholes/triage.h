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

// Culprit attribution: which optimization, once disabled, makes a violation
// go away. gcc is searched one -fno-* flag at a time; clang is bisected
// over its pass pipeline with -opt-bisect-limit.

#ifndef DEBUGHOLES_TRIAGE_H_
#define DEBUGHOLES_TRIAGE_H_

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "debugholes/buildmatrix.h"
#include "debugholes/conjectures.h"
#include "debugholes/dbgtrace.h"

namespace debugholes {

struct ClangPass {
  int index = 0;
  std::string pass_name;
  std::string target_function;
};

struct CulpritAttribution {
  enum class Kind { kGccFlagSet, kClangPass, kUnattributed };
  Kind kind = Kind::kUnattributed;
  std::set<std::string> gcc_flags;
  std::vector<std::string> ranked_flags;  // gcc_flags in report order
  std::optional<ClangPass> clang_pass;
  std::string reason;  // set when kUnattributed
  // Verification evidence.
  bool baseline_present = false;
  std::optional<bool> confirm_absent;
  int builds = 0;

  std::string Label() const;  // group key, e.g. "tree-ccp" or "LoopStrengthReducePass"
};

std::string_view AttributionKindName(CulpritAttribution::Kind k);

// Order in which flags are tried and reported. Inlining flags come last:
// disabling inlining tends to hide losses caused by later passes.
class FlagRanking {
 public:
  struct Entry {
    std::string flag;
    double weight = 1.0;
  };

  static FlagRanking FromCatalog(const std::vector<std::string>& flags);
  static bool IsInliningFlag(const std::string& flag);

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<std::string> Ordered() const;
  int RankOf(const std::string& flag) const;  // -1 when absent

 private:
  std::vector<Entry> entries_;  // sorted by weight, stable in catalog order
};

struct FlagBudget {
  int max_flags = 1 << 20;  // single-flag probes
  int pair_budget = 0;      // 0 disables the pair search
  int pair_pool = 16;       // pairs drawn from the top-ranked flags
  int jobs = 1;
};

// Answers "does the violation reproduce under this build config?";
// nullopt when the probe could not build or trace.
using ConfigProbe = std::function<std::optional<bool>(const BuildConfig&)>;

CulpritAttribution TriageFlags(const ConfigProbe& probe, OptLevel level,
                               const std::vector<std::string>& catalog,
                               const FlagBudget& budget = {});

// One line of a clang bisect log.
struct BisectEntry {
  int index = 0;
  bool ran = true;
  std::string pass_name;
  std::string target;
};

std::vector<BisectEntry> ParseBisectLog(const std::string& log);

// Presence of the violation under a given bisect limit (-1 = unlimited).
using LimitProbe = std::function<std::optional<bool>(int limit)>;

CulpritAttribution TriageBisect(const LimitProbe& probe,
                                const std::vector<BisectEntry>& pipeline);

// Exhaustive oracle: smallest N in [lo, hi] with present(N), or nullopt.
std::optional<int> LinearScanLimit(const LimitProbe& probe, int lo, int hi);

// Builds and traces a program under arbitrary configs and checks one
// violation identity. Thread-safe; results are cached per config, and
// traces are cached per executable content.
class PipelineProbe {
 public:
  struct Settings {
    fs::path work_dir;
    std::optional<fs::path> stub_object;
    CompileSettings compile;  // out_dir is overridden per config
    TraceSettings trace;
  };

  PipelineProbe(TestProgram program, ToolchainSpec toolchain,
                ViolationKey key, Settings settings);

  std::optional<bool> Present(const BuildConfig& config);
  // `level` plus `-mllvm -opt-bisect-limit=N`.
  std::optional<bool> PresentAtLimit(OptLevel level, int limit);
  // Compiler stderr of an unlimited bisect build, for ParseBisectLog.
  std::string BisectLog(OptLevel level);

  int builds() const;
  const ViolationKey& key() const { return key_; }

  // Violations found for `config`, for callers that need more than the
  // boolean (the reducer's fuzzy line match).
  std::vector<Violation> Violations(const BuildConfig& config);

 private:
  BuiltArtifact Build(const BuildConfig& config);
  DebugTrace Trace(const BuiltArtifact& artifact, bool full);

  TestProgram program_;
  SourceFacts facts_;
  ToolchainSpec toolchain_;
  ViolationKey key_;
  Settings settings_;
  mutable std::mutex mu_;
  std::map<std::string, std::optional<bool>> cache_;
  int builds_ = 0;
};

std::vector<Violation> CheckAll(const DebugTrace& trace, const TestProgram& program,
                                const SourceFacts& facts, ConjectureId which);

// The attribution a violation's toolchain calls for: flag search for gcc,
// bisection for clang.
CulpritAttribution TriageViolation(PipelineProbe& probe,
                                   const ToolchainSpec& toolchain,
                                   OptLevel level, const FlagBudget& budget);

struct CulpritRow {
  std::string culprit;
  int count = 0;
};

// Unique violations per culprit for each conjecture, sorted by count
// descending, then name.
std::map<ConjectureId, std::vector<CulpritRow>> GroupByCulprit(
    const std::vector<std::pair<ViolationKey, CulpritAttribution>>& items);

std::string GroupTableCsv(const std::vector<CulpritRow>& rows);
std::string RenderGroupTables(
    const std::map<ConjectureId, std::vector<CulpritRow>>& tables,
    const std::string& toolchain_label);

void to_json(Json& j, const CulpritAttribution& a);
void from_json(const Json& j, CulpritAttribution& a);

}  // namespace debugholes

#endif  // DEBUGHOLES_TRIAGE_H_
