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

#include "debugholes/triage.h"

#include <algorithm>
#include <atomic>
#include <regex>
#include <sstream>
#include <thread>

namespace debugholes {

std::string_view AttributionKindName(CulpritAttribution::Kind k) {
  switch (k) {
    case CulpritAttribution::Kind::kGccFlagSet: return "GccFlagSet";
    case CulpritAttribution::Kind::kClangPass: return "ClangPass";
    case CulpritAttribution::Kind::kUnattributed: return "Unattributed";
  }
  return "Unattributed";
}

std::string CulpritAttribution::Label() const {
  switch (kind) {
    case Kind::kGccFlagSet: {
      std::vector<std::string> flags = ranked_flags;
      if (flags.empty()) flags.assign(gcc_flags.begin(), gcc_flags.end());
      std::string out;
      for (const auto& f : flags) {
        if (!out.empty()) out += "+";
        out += StartsWith(f, "-fno-") ? f.substr(5) : f;
      }
      return out;
    }
    case Kind::kClangPass:
      return clang_pass ? clang_pass->pass_name : "?";
    case Kind::kUnattributed:
      return "unattributed:" + reason;
  }
  return "?";
}

// ---- flag ranking ----

bool FlagRanking::IsInliningFlag(const std::string& flag) {
  return flag.find("inline") != std::string::npos ||
         flag.find("early-inlining") != std::string::npos ||
         flag.find("ipa-icf") != std::string::npos;
}

FlagRanking FlagRanking::FromCatalog(const std::vector<std::string>& flags) {
  FlagRanking r;
  std::set<std::string> seen;
  for (const auto& f : flags) {
    if (!seen.insert(f).second) continue;
    r.entries_.push_back({f, IsInliningFlag(f) ? 0.1 : 1.0});
  }
  std::stable_sort(r.entries_.begin(), r.entries_.end(),
                   [](const Entry& a, const Entry& b) { return a.weight > b.weight; });
  return r;
}

std::vector<std::string> FlagRanking::Ordered() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.flag);
  return out;
}

int FlagRanking::RankOf(const std::string& flag) const {
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].flag == flag) return static_cast<int>(i);
  }
  return -1;
}

// ---- gcc flag search ----

namespace {

CulpritAttribution Unattributed(std::string reason, int builds, bool baseline) {
  CulpritAttribution a;
  a.kind = CulpritAttribution::Kind::kUnattributed;
  a.reason = std::move(reason);
  a.builds = builds;
  a.baseline_present = baseline;
  return a;
}

BuildConfig WithFlags(OptLevel level, std::vector<std::string> flags) {
  BuildConfig c;
  c.opt_level = level;
  c.extra_flags = std::move(flags);
  return c;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void ParallelFor(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

CulpritAttribution TriageFlags(const ConfigProbe& probe, OptLevel level,
                               const std::vector<std::string>& catalog,
                               const FlagBudget& budget) {
  std::atomic<int> builds{0};
  auto run = [&](const BuildConfig& c) {
    ++builds;
    return probe(c);
  };
  if (run(WithFlags(level, {})) != true) {
    return Unattributed("flaky", builds, false);
  }
  if (catalog.empty()) return Unattributed("empty-catalog", builds, true);

  FlagRanking ranking = FlagRanking::FromCatalog(catalog);
  std::vector<std::string> ordered = ranking.Ordered();
  size_t limit = std::min(ordered.size(), static_cast<size_t>(std::max(0, budget.max_flags)));
  std::vector<std::optional<bool>> results(limit);
  ParallelFor(static_cast<int>(limit), budget.jobs, [&](int i) {
    results[i] = run(WithFlags(level, {ordered[i]}));
  });

  CulpritAttribution a;
  a.baseline_present = true;
  for (size_t i = 0; i < limit; ++i) {
    if (results[i] == false) a.ranked_flags.push_back(ordered[i]);
  }
  if (a.ranked_flags.empty() && budget.pair_budget > 0) {
    size_t pool = std::min(limit, static_cast<size_t>(budget.pair_pool));
    int tried = 0;
    for (size_t i = 0; i < pool && a.ranked_flags.empty(); ++i) {
      for (size_t k = i + 1; k < pool && tried < budget.pair_budget; ++k, ++tried) {
        if (run(WithFlags(level, {ordered[i], ordered[k]})) == false) {
          a.ranked_flags = {ordered[i], ordered[k]};
          break;
        }
      }
    }
  }
  if (a.ranked_flags.empty()) {
    return Unattributed(limit < ordered.size() ? "budget-exhausted"
                                               : "uncontrollable-by-flags",
                        builds, true);
  }
  a.kind = CulpritAttribution::Kind::kGccFlagSet;
  a.gcc_flags.insert(a.ranked_flags.begin(), a.ranked_flags.end());
  std::optional<bool> confirm = run(WithFlags(level, a.ranked_flags));
  if (confirm) a.confirm_absent = !*confirm;
  a.builds = builds;
  return a;
}

// ---- clang bisection ----

std::vector<BisectEntry> ParseBisectLog(const std::string& log) {
  static const std::regex kLine(R"(BISECT: (NOT )?running pass \((\d+)\) (.+) on (.+))");
  std::vector<BisectEntry> out;
  for (const auto& line : SplitLines(log)) {
    std::smatch m;
    if (!std::regex_search(line, m, kLine)) continue;
    BisectEntry e;
    e.ran = !m[1].matched;
    e.index = std::stoi(m[2].str());
    e.pass_name = Trim(m[3].str());
    std::string target = Trim(m[4].str());
    // "function (main)" and "module ([module])" carry the name in parens.
    auto open = target.find('(');
    if (open != std::string::npos && target.back() == ')') {
      target = target.substr(open + 1, target.size() - open - 2);
    }
    e.target = target;
    out.push_back(std::move(e));
  }
  return out;
}

std::optional<int> LinearScanLimit(const LimitProbe& probe, int lo, int hi) {
  for (int n = lo; n <= hi; ++n) {
    if (probe(n) == true) return n;
  }
  return std::nullopt;
}

CulpritAttribution TriageBisect(const LimitProbe& raw_probe,
                                const std::vector<BisectEntry>& pipeline) {
  int builds = 0;
  std::map<int, std::optional<bool>> memo;
  LimitProbe probe = [&](int n) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    ++builds;
    return memo[n] = raw_probe(n);
  };
  if (probe(-1) != true) return Unattributed("flaky", builds, false);
  if (pipeline.empty()) return Unattributed("no-bisect-log", builds, true);
  int length = 0;
  for (const auto& e : pipeline) length = std::max(length, e.index);

  std::optional<bool> at_zero = probe(0);
  if (!at_zero) return Unattributed("probe-failed", builds, true);
  if (*at_zero) return Unattributed("pre-pipeline", builds, true);

  std::optional<int> found;
  if (probe(length) == true) {
    int lo = 0, hi = length;  // absent at lo, present at hi
    bool consistent = true;
    while (hi - lo > 1) {
      int mid = lo + (hi - lo) / 2;
      std::optional<bool> p = probe(mid);
      if (!p) {
        consistent = false;
        break;
      }
      (*p ? hi : lo) = mid;
    }
    if (consistent) found = hi;
  }
  if (!found) {
    // Presence is not monotone in the limit; fall back to a scan.
    found = LinearScanLimit(probe, 1, length);
    if (!found || probe(*found - 1) != false) {
      return Unattributed("nonmonotonic", builds, true);
    }
  }
  CulpritAttribution a;
  a.kind = CulpritAttribution::Kind::kClangPass;
  a.baseline_present = true;
  ClangPass pass;
  pass.index = *found;
  for (const auto& e : pipeline) {
    if (e.index == *found) {
      pass.pass_name = e.pass_name;
      pass.target_function = e.target;
      break;
    }
  }
  a.clang_pass = pass;
  a.confirm_absent = probe(*found - 1) == false;
  a.builds = builds;
  return a;
}

// ---- pipeline probe ----

namespace {

std::mutex g_trace_cache_mu;
std::map<std::string, DebugTrace> g_trace_cache;

}  // namespace

std::vector<Violation> CheckAll(const DebugTrace& trace, const TestProgram& program,
                                const SourceFacts& facts, ConjectureId which) {
  switch (which) {
    case ConjectureId::kC1:
      return program.injected_call ? CheckC1(trace, *program.injected_call)
                                   : std::vector<Violation>{};
    case ConjectureId::kC2:
      return CheckC2(trace, facts);
    case ConjectureId::kC3:
      return CheckC3(trace, facts);
  }
  return {};
}

PipelineProbe::PipelineProbe(TestProgram program, ToolchainSpec toolchain,
                             ViolationKey key, Settings settings)
    : program_(std::move(program)),
      toolchain_(std::move(toolchain)),
      key_(std::move(key)),
      settings_(std::move(settings)) {
  try {
    facts_ = AnalyzeSource(program_);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnsupportedSyntax) throw;
  }
}

int PipelineProbe::builds() const {
  std::lock_guard<std::mutex> lock(mu_);
  return builds_;
}

BuiltArtifact PipelineProbe::Build(const BuildConfig& config) {
  CompileSettings cs = settings_.compile;
  cs.out_dir = settings_.work_dir / config.Hash();
  cs.stub_object = settings_.stub_object;
  cs.with_assembly = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++builds_;
  }
  return Compile(program_, toolchain_, config, cs);
}

DebugTrace PipelineProbe::Trace(const BuiltArtifact& artifact, bool full) {
  SteppableLineSet lines =
      ExtractSteppableLines(artifact.executable_path, {program_.FileName()});
  TraceSettings ts = settings_.trace;
  bool stepped = lines.lines.count({program_.FileName(), key_.line}) > 0;
  if (!full && stepped) ts.only_lines = std::set<int>{key_.line};
  std::string cache_key = Sha256Hex(ReadFile(artifact.executable_path)) + "|" +
                          toolchain_.debugger_path.string() + "|" +
                          (ts.only_lines ? std::to_string(key_.line) : "all");
  {
    std::lock_guard<std::mutex> lock(g_trace_cache_mu);
    auto it = g_trace_cache.find(cache_key);
    if (it != g_trace_cache.end()) return it->second;
  }
  DebugTrace t = CollectTrace(artifact, toolchain_.debugger_path, lines, ts);
  t.program_id = program_.id;
  std::lock_guard<std::mutex> lock(g_trace_cache_mu);
  g_trace_cache.emplace(cache_key, t);
  return t;
}

std::vector<Violation> PipelineProbe::Violations(const BuildConfig& config) {
  BuildConfig c = config;
  c.link_stub = program_.injected_call.has_value();
  BuiltArtifact art = Build(c);
  DebugTrace t = Trace(art, /*full=*/true);
  return CheckAll(t, program_, facts_, key_.conjecture);
}

std::optional<bool> PipelineProbe::Present(const BuildConfig& config) {
  BuildConfig c = config;
  c.link_stub = program_.injected_call.has_value();
  std::string hash = c.Hash();
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(hash);
    if (it != cache_.end()) return it->second;
  }
  std::optional<bool> present;
  try {
    BuiltArtifact art = Build(c);
    DebugTrace t = Trace(art, key_.conjecture == ConjectureId::kC3);
    present = false;
    for (const auto& v : CheckAll(t, program_, facts_, key_.conjecture)) {
      if (v.line == key_.line && v.variable == key_.variable) present = true;
    }
  } catch (const Error&) {
    present.reset();
  }
  std::lock_guard<std::mutex> lock(mu_);
  cache_[hash] = present;
  return present;
}

std::optional<bool> PipelineProbe::PresentAtLimit(OptLevel level, int limit) {
  if (limit < 0) return Present(WithFlags(level, {}));
  return Present(WithFlags(level, {"-mllvm", "-opt-bisect-limit=" + std::to_string(limit)}));
}

std::string PipelineProbe::BisectLog(OptLevel level) {
  BuildConfig c = WithFlags(level, {"-mllvm", "-opt-bisect-limit=-1"});
  c.link_stub = program_.injected_call.has_value();
  return Build(c).build_log;
}

CulpritAttribution TriageViolation(PipelineProbe& probe,
                                   const ToolchainSpec& toolchain,
                                   OptLevel level, const FlagBudget& budget) {
  if (level == OptLevel::kO0) return Unattributed("empty-catalog", 0, false);
  if (toolchain.family == CompilerFamily::kGcc) {
    std::vector<std::string> catalog;
    try {
      catalog = EnumerateOptFlags(toolchain, level);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kCatalogUnavailable) throw;
      return Unattributed("catalog-unavailable", 0, false);
    }
    return TriageFlags([&](const BuildConfig& c) { return probe.Present(c); },
                       level, catalog, budget);
  }
  std::vector<BisectEntry> pipeline;
  try {
    pipeline = ParseBisectLog(probe.BisectLog(level));
  } catch (const Error&) {
    return Unattributed("bisect-build-failed", probe.builds(), false);
  }
  CulpritAttribution a = TriageBisect(
      [&](int n) { return probe.PresentAtLimit(level, n); }, pipeline);
  a.builds = probe.builds();
  return a;
}

// ---- grouping ----

std::map<ConjectureId, std::vector<CulpritRow>> GroupByCulprit(
    const std::vector<std::pair<ViolationKey, CulpritAttribution>>& items) {
  std::map<ConjectureId, std::map<std::string, std::set<ViolationKey>>> groups;
  for (const auto& [key, a] : items) groups[key.conjecture][a.Label()].insert(key);
  std::map<ConjectureId, std::vector<CulpritRow>> out;
  for (const auto& [conj, by_label] : groups) {
    auto& rows = out[conj];
    for (const auto& [label, keys] : by_label) {
      rows.push_back({label, static_cast<int>(keys.size())});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const CulpritRow& a, const CulpritRow& b) {
      return a.count > b.count;
    });
  }
  return out;
}

std::string GroupTableCsv(const std::vector<CulpritRow>& rows) {
  std::ostringstream os;
  os << "culprit,count\n";
  for (const auto& r : rows) os << '"' << r.culprit << "\"," << r.count << '\n';
  return os.str();
}

std::string RenderGroupTables(
    const std::map<ConjectureId, std::vector<CulpritRow>>& tables,
    const std::string& toolchain_label) {
  std::ostringstream os;
  for (const auto& [conj, rows] : tables) {
    os << ConjectureName(conj) << " (" << toolchain_label << ")\n";
    size_t width = 7;
    for (const auto& r : rows) width = std::max(width, r.culprit.size());
    for (const auto& r : rows) {
      os << "  " << r.culprit << std::string(width - r.culprit.size() + 2, ' ')
         << r.count << '\n';
    }
    os << '\n';
  }
  return os.str();
}

// ---- JSON ----

void to_json(Json& j, const CulpritAttribution& a) {
  j = Json{{"kind", std::string(AttributionKindName(a.kind))},
           {"gcc_flags", a.gcc_flags},
           {"ranked_flags", a.ranked_flags},
           {"reason", a.reason},
           {"baseline_present", a.baseline_present},
           {"builds", a.builds},
           {"label", a.Label()}};
  j["confirm_absent"] = a.confirm_absent ? Json(*a.confirm_absent) : Json(nullptr);
  if (a.clang_pass) {
    j["clang_pass"] = {{"index", a.clang_pass->index},
                       {"pass_name", a.clang_pass->pass_name},
                       {"target_function", a.clang_pass->target_function}};
  } else {
    j["clang_pass"] = nullptr;
  }
}

void from_json(const Json& j, CulpritAttribution& a) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "GccFlagSet") {
    a.kind = CulpritAttribution::Kind::kGccFlagSet;
  } else if (kind == "ClangPass") {
    a.kind = CulpritAttribution::Kind::kClangPass;
  } else if (kind == "Unattributed") {
    a.kind = CulpritAttribution::Kind::kUnattributed;
  } else {
    throw Error(ErrorCode::kConfig, "unknown attribution kind " + kind);
  }
  a.gcc_flags = j.value("gcc_flags", std::set<std::string>{});
  a.ranked_flags = j.value("ranked_flags", std::vector<std::string>{});
  a.reason = j.value("reason", "");
  a.baseline_present = j.value("baseline_present", false);
  a.builds = j.value("builds", 0);
  a.confirm_absent.reset();
  if (j.contains("confirm_absent") && !j["confirm_absent"].is_null()) {
    a.confirm_absent = j["confirm_absent"].get<bool>();
  }
  a.clang_pass.reset();
  if (j.contains("clang_pass") && !j["clang_pass"].is_null()) {
    const Json& p = j["clang_pass"];
    a.clang_pass = ClangPass{p.at("index").get<int>(), p.at("pass_name").get<std::string>(),
                             p.value("target_function", "")};
  }
}

}  // namespace debugholes
