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

// Campaign orchestration: configuration, the resumable on-disk store, the
// per-program pipeline run on a worker pool, summaries, and the commands
// that operate on a finished store (triage, reduce, metrics, compare,
// report).

#ifndef DEBUGHOLES_CAMPAIGN_H_
#define DEBUGHOLES_CAMPAIGN_H_

#include <atomic>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "debugholes/conjectures.h"
#include "debugholes/metrics.h"
#include "debugholes/program.h"
#include "debugholes/toolchain.h"
#include "debugholes/triage.h"

namespace debugholes {

struct CampaignConfig {
  static constexpr int kSchema = 1;

  std::vector<ToolchainSpec> toolchains;  // versions are probed, not read
  std::vector<OptLevel> levels;           // O0 is always built as well
  std::set<ConjectureId> conjectures = {ConjectureId::kC1, ConjectureId::kC2,
                                        ConjectureId::kC3};
  int program_count = 1;
  uint64_t seed = 1;
  int jobs = 1;

  std::chrono::seconds generate_timeout{60};
  std::chrono::seconds compile_timeout{60};
  std::chrono::seconds trace_timeout{60};

  fs::path store_root;
  fs::path generator_path;
  std::vector<std::string> generator_args;
  std::optional<fs::path> assortments_path;
  int max_source_lines = 600;
  int retry_budget = 10;

  std::optional<fs::path> analyzer_path;
  std::vector<std::string> analyzer_args;
  std::optional<fs::path> reducer_path;
  std::vector<std::string> reducer_args;

  bool classify_dies = true;
  bool triage = false;
  FlagBudget triage_budget;
  bool reduce = false;
  std::chrono::seconds reduce_wall_budget{3600};
  fs::path cli_path;  // used by reduction scripts; set by the CLI

  // Relative paths resolve against the config file's directory; there is
  // no PATH lookup. Throws kConfig.
  static CampaignConfig Load(const fs::path& path);
  static CampaignConfig FromJson(const Json& j, const fs::path& base_dir);
  Json ToJson() const;

  void Validate() const;  // throws kConfig
  // Every referenced binary must exist and be executable; throws
  // kToolUnavailable.
  void CheckTools() const;
};

// Default worker count: one less than the hardware threads, at least one.
int DefaultJobs();

enum class Stage { kGenerated, kBuilt, kTraced, kChecked, kTriaged, kReduced };
std::string_view StageName(Stage s);

// Layout (ids shortened to 12 hex digits):
//   campaign.json               config as run, with probed toolchains
//   index/<nnnnn>.json          program index -> program id
//   programs/<id>/              sources, sidecars, builds/, traces/,
//                               checks/, violations.json, stages/
//   violations.json, summary.json, summary.txt, heatgrid.csv
class RunStore {
 public:
  explicit RunStore(fs::path root);

  const fs::path& root() const { return root_; }
  fs::path ProgramDir(const std::string& program_id) const;
  fs::path IndexFile(int index) const;
  fs::path StageMarker(const std::string& program_id, Stage s) const;

  bool HasStage(const std::string& program_id, Stage s) const;
  void MarkStage(const std::string& program_id, Stage s) const;

  // (index, program id) for every generated program, in index order.
  std::vector<std::pair<int, std::string>> Programs() const;

  // The stored program, and its C1 variant when one was injected.
  TestProgram LoadProgram(const std::string& program_id) const;
  std::optional<TestProgram> LoadInjected(const std::string& program_id) const;

  // Deduplicated violations of one program (checked stage output).
  std::vector<Violation> ProgramViolations(const std::string& program_id) const;
  std::vector<Violation> AllViolations() const;  // store-level file

  std::optional<DebugTrace> LoadTrace(const std::string& program_id,
                                      const std::string& toolchain_id,
                                      const std::string& variant,
                                      OptLevel level) const;

  CampaignConfig LoadConfig() const;  // campaign.json

 private:
  fs::path root_;
};

struct ToolchainTable {
  std::string toolchain;
  std::vector<std::string> levels;
  // conjecture -> level -> unique violations reproducing at that level
  std::map<ConjectureId, std::map<std::string, int>> per_level;
  std::map<ConjectureId, int> unique;
};

struct CampaignSummary {
  int programs = 0;
  int programs_failed = 0;  // with at least one recorded stage error
  std::vector<ToolchainTable> tables;
  std::map<ConjectureId, int> no_violation_programs;
  std::map<ConjectureId, int> checked_programs;
  long builds = 0;  // performed in this run
  long traces = 0;

  std::string Render() const;
};

void to_json(Json& j, const CampaignSummary& s);

// Recomputes the summary from the per-program violations.json files.
CampaignSummary Summarize(const RunStore& store, const CampaignConfig& config);

// Per-program count of conjectures with at least one violation, in index
// order.
std::vector<int> ConjectureCounts(const RunStore& store);

struct CampaignOptions {
  // Stop scheduling after this many programs finish (tests interrupt runs
  // this way); nullopt runs everything.
  std::optional<int> stop_after;
  bool quiet = true;
};

// Runs every stage for every program; per-program failures are recorded
// in programs/<id>/errors.json and never abort the campaign.
CampaignSummary RunCampaign(const CampaignConfig& config,
                            const CampaignOptions& options = {});

struct TriageCommandResult {
  int triaged = 0;
  std::map<std::string, std::map<ConjectureId, std::vector<CulpritRow>>> tables;
};

// `filter` is a regular expression over ViolationKey::ToString().
TriageCommandResult CmdTriage(const RunStore& store, const std::string& filter,
                              std::optional<int> jobs = std::nullopt);

struct ReduceCommandResult {
  int reduced = 0;
  int skipped = 0;
  std::vector<fs::path> bundles;
};

ReduceCommandResult CmdReduce(const RunStore& store, const std::string& filter,
                              const fs::path& reducer,
                              std::chrono::seconds wall_budget,
                              const fs::path& cli_path);

// Throws kMissingStage when an optimized trace lacks its O0 sibling.
std::vector<MetricsRecord> CmdMetrics(const RunStore& store);

struct CompareReport {
  std::string label_a, label_b;
  std::map<ConjectureId, std::pair<int, int>> counts;
  std::vector<std::string> appeared;     // key strings, sorted
  std::vector<std::string> disappeared;  // key strings, sorted
  std::vector<int> heat_a, heat_b;

  std::string Render() const;
};

void to_json(Json& j, const CompareReport& r);

// Throws kCorpusMismatch when the program id sets differ.
CompareReport CmdCompare(const RunStore& a, const RunStore& b,
                         const std::string& label_a, const std::string& label_b);

// One dossier per matching violation under reports/; returns their paths.
std::vector<fs::path> CmdReport(const RunStore& store, const std::string& filter);

}  // namespace debugholes

#endif  // DEBUGHOLES_CAMPAIGN_H_
