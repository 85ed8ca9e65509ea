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

// Culprit-preserving test-case reduction. A candidate is interesting when
// the violation shows up at the configured level and disappears once the
// culprit is disabled; an external reducer (creduce, cvise) drives the
// search through a generated shell script.

#ifndef DEBUGHOLES_REDUCER_H_
#define DEBUGHOLES_REDUCER_H_

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "debugholes/conjectures.h"
#include "debugholes/dwarfscope.h"
#include "debugholes/triage.h"

namespace debugholes {

struct InterestingnessSpec {
  ViolationKey key;
  // Whitespace-normalized text of the violating line, used to find the
  // line again after the reducer renumbers the file.
  std::string construct;
  ToolchainSpec toolchain;
  OptLevel opt_level = OptLevel::kO1;
  CulpritAttribution culprit;
  bool require_ub_clean = true;
  std::chrono::seconds compile_timeout{60};
  std::chrono::seconds trace_timeout{60};
  std::optional<fs::path> stub_object;  // C1 programs link the opaque stub
  std::string callee = "dh_opaque_sink";
  fs::path cli_path;  // the debugholes binary the script invokes

  // Throws kConfig when the culprit is Unattributed.
  void Validate() const;
  // The build with the culprit disabled.
  BuildConfig DisabledConfig() const;
};

struct InterestingVerdict {
  bool interesting = false;
  std::string reason;
  int matched_line = 0;
  bool fuzzy_line = false;  // matched a different line than the original
};

// The predicate itself; the generated script calls it through the CLI.
InterestingVerdict EvaluateCandidate(const InterestingnessSpec& spec,
                                     const fs::path& candidate);

// Writes spec.json and interesting.sh into `dir`; returns the script path.
// The script tests ./<file_name> in its working directory.
fs::path MakeInterestingnessTest(const InterestingnessSpec& spec,
                                 const fs::path& dir,
                                 const std::string& file_name);

// Normalized text of `line` (1-based) in `source`.
std::string ConstructAt(const std::string& source, int line);

// The call to `callee` in `tu`, with its plain-variable arguments.
std::optional<OpaqueCallSite> FindOpaqueCall(const c::TranslationUnit& tu,
                                             const std::string& callee);

struct ReductionResult {
  std::string reduced_source;
  int iterations = 0;
  bool final_verification = false;
  bool verification_regressed = false;  // re-triage found another culprit
  bool fuzzy_line = false;
  int matched_line = 0;  // violating line in the reduced source
  std::optional<CulpritAttribution> retriage;
  fs::path work_dir;  // holds the reduced file, spec and script
  fs::path reduced_path;
  fs::path bundle_path;
};

struct ReductionSettings {
  fs::path reducer_path;
  std::vector<std::string> reducer_args;  // before the script and file
  std::chrono::seconds wall_budget{3600};
  bool retriage = true;
  FlagBudget triage_budget;
};

// Throws kPreconditionFlaky when the original is not interesting and
// kReducerFailed when the reducer exits abnormally.
ReductionResult RunReduction(const TestProgram& program,
                             const InterestingnessSpec& spec,
                             const ReductionSettings& settings,
                             const fs::path& work_dir);

struct BundleInputs {
  std::vector<std::string> commands;  // both compile command lines
  std::string debugger_id;
  std::string trace_excerpt;  // records at the violating line, both builds
  std::optional<DieVerdict> verdict;
  std::optional<DieDiff> die_diff;  // absent for debugger-side issues
  ValidationOutcome validation;
};

// Rebuilds the reduced program under both configs and gathers the
// commands, trace excerpts, DIE verdict and diffs.
BundleInputs CollectBundleInputs(const InterestingnessSpec& spec,
                                 const ReductionResult& result);

// Writes `<dir>/report/`. Requires result.final_verification.
fs::path EmitReportBundle(const ReductionResult& result,
                          const InterestingnessSpec& spec,
                          const BundleInputs& inputs, const fs::path& dir);

void to_json(Json& j, const InterestingnessSpec& s);
void from_json(const Json& j, InterestingnessSpec& s);

}  // namespace debugholes

#endif  // DEBUGHOLES_REDUCER_H_
