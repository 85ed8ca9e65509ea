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

// Debugger-driven traces: one-shot breakpoints on every steppable line and
// the availability of each frame local at the first hit of each line.

#ifndef DEBUGHOLES_DBGTRACE_H_
#define DEBUGHOLES_DBGTRACE_H_

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "debugholes/buildmatrix.h"
#include "debugholes/toolchain.h"

namespace debugholes {

enum class Availability { kNotVisible = 0, kVisibleOptimizedOut = 1, kAvailableWithValue = 2 };

inline int Rank(Availability a) { return static_cast<int>(a); }
std::string_view AvailabilityName(Availability a);
Availability ParseAvailability(std::string_view name);  // throws kConfig

struct AvailabilityState {
  Availability tag = Availability::kNotVisible;
  std::optional<std::string> value_text;  // present iff kAvailableWithValue

  bool operator==(const AvailabilityState& o) const {
    return tag == o.tag && value_text == o.value_text;
  }
};

// Maps a debugger's rendering of a listed variable to a state.
AvailabilityState NormalizeValue(const std::string& rendered);

struct LineRecord {
  std::string file;  // base name
  int line = 0;
  uint64_t stop_pc = 0;
  std::string frame_function;
  std::map<std::string, AvailabilityState> observations;

  // NotVisible when the variable was not listed.
  AvailabilityState Observe(const std::string& variable) const;
};

enum class TraceExit { kRanToCompletion, kTimeout, kCrashed };
std::string_view TraceExitName(TraceExit e);

struct DebugTrace {
  std::string program_id;
  std::string toolchain_id;
  BuildConfig config;
  std::string debugger_id;
  TraceExit exit_status = TraceExit::kRanToCompletion;
  // Runtime address minus link-time address (PIE slide).
  int64_t load_bias = 0;
  std::vector<LineRecord> records;  // stop order

  const LineRecord* Find(int line) const;
};

struct SteppableLineSet {
  std::set<std::pair<std::string, int>> lines;  // (file base name, line)
};

// Every is_stmt line-table row of the listed source files (base names).
// Throws kMalformedDwarf for binaries without line information.
SteppableLineSet ExtractSteppableLines(const fs::path& executable,
                                       const std::set<std::string>& files);

struct TraceSettings {
  std::chrono::seconds timeout{30};
  // Restricts breakpoints to these lines (used by cross-validation and the
  // fast triage path).
  std::optional<std::set<int>> only_lines;
};

// Runs the executable under `debugger` (gdb over MI, lldb in batch mode,
// chosen by the binary's name). On timeout the partial trace is returned
// with exit_status kTimeout. Throws kDebuggerCrashed and
// kBreakpointSetupFailed.
DebugTrace CollectTrace(const BuiltArtifact& artifact, const fs::path& debugger,
                        const SteppableLineSet& lines,
                        const TraceSettings& settings = {});

// "gdb-12.1", "lldb-14.0.0"; throws kToolUnavailable.
std::string DebuggerId(const fs::path& debugger);

// Parsers for the raw sessions, exposed for tests on canned output.
std::vector<LineRecord> ParseLldbSession(const std::string& output);
std::map<std::string, AvailabilityState> ParseInfoLocals(
    const std::vector<std::string>& lines);

struct ValidationOutcome {
  std::vector<std::string> confirmed_in;  // debugger ids
  std::vector<std::string> refuted_in;
  std::vector<std::string> skipped;       // "path: reason"

  bool DebuggerSideCandidate() const { return !refuted_in.empty(); }
};

// Re-collects only `line` under each alternate debugger and checks whether
// `variable` is available there.
ValidationOutcome CrossValidate(const BuiltArtifact& artifact,
                                const std::string& file, int line,
                                const std::string& variable,
                                const std::vector<fs::path>& alternates,
                                const TraceSettings& settings = {});

void to_json(Json& j, const AvailabilityState& s);
void from_json(const Json& j, AvailabilityState& s);
void to_json(Json& j, const LineRecord& r);
void from_json(const Json& j, LineRecord& r);
void to_json(Json& j, const DebugTrace& t);
void from_json(const Json& j, DebugTrace& t);
void to_json(Json& j, const ValidationOutcome& v);
void from_json(const Json& j, ValidationOutcome& v);

}  // namespace debugholes

#endif  // DEBUGHOLES_DBGTRACE_H_
