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

// Acceptance checks. Prints one line per criterion:
//   [PASS] 4 triage oracle: ...
// and exits non-zero when any criterion fails. Criteria that need gcc and
// gdb report SKIP when either is missing.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include "debugholes/campaign.h"
#include "debugholes/elf_reader.h"
#include "debugholes/metrics.h"
#include "debugholes/reducer.h"
#include "test_support.h"

namespace dh = debugholes;
namespace t = debugholes::testing;
using dh::fs::path;

namespace {

enum class Outcome { kPass, kFail, kSkip };

struct Result {
  Outcome outcome = Outcome::kFail;
  std::string detail;
};

Result Pass(std::string d) { return {Outcome::kPass, std::move(d)}; }
Result Fail(std::string d) { return {Outcome::kFail, std::move(d)}; }
Result Skip(std::string d) { return {Outcome::kSkip, std::move(d)}; }
Result Check(bool ok, std::string d) { return ok ? Pass(std::move(d)) : Fail(std::move(d)); }

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Fixed(double v, int digits = 1) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

// ---- 1. checker fixtures ----

Result CheckerFixtures() {
  auto start = std::chrono::steady_clock::now();
  auto paths = t::CheckerFixturePaths();
  int exact = 0;
  std::string first_bad;
  for (const auto& p : paths) {
    auto f = t::LoadCheckerFixture(p);
    if (t::RunCheckers(f) == f.expected) {
      ++exact;
    } else if (first_bad.empty()) {
      first_bad = f.name;
    }
  }
  // The case-study shapes must be among them.
  int shapes = 0;
  for (const char* name : {"array_index_constant_folded", "opaque_call_missing_argument",
                           "nested_loop_induction_first_store", "goto_loop_late_availability"}) {
    shapes += dh::fs::exists(t::FixturePath("conjectures") / (std::string(name) + ".json"));
  }
  double secs = Seconds(start);
  bool ok = paths.size() >= 30 && exact == static_cast<int>(paths.size()) && shapes == 4 &&
            secs < 5.0;
  return Check(ok, std::to_string(exact) + "/" + std::to_string(paths.size()) +
                       " fixtures exact, " + std::to_string(shapes) + "/4 case-study shapes, " +
                       Fixed(secs, 2) + " s (limit 5 s)" +
                       (first_bad.empty() ? "" : ", first mismatch " + first_bad));
}

// ---- 2. C3 oracle ----

Result C3Oracle() {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(0xC3);
  int agree = 0;
  int with_violations = 0;
  const int kCases = 1000;
  for (int i = 0; i < kCases; ++i) {
    auto c = t::RandomC3Case(rng, 50, 10);
    auto got = t::Triples(dh::CheckC3(c.trace, c.facts));
    auto want = t::BruteForceC3(c.trace, c.facts);
    agree += got == want;
    with_violations += !want.empty();
  }
  double secs = Seconds(start);
  return Check(agree == kCases && secs < 30.0,
               std::to_string(agree) + "/" + std::to_string(kCases) + " agree (" +
                   std::to_string(with_violations) + " with violations), " + Fixed(secs, 2) +
                   " s (limit 30 s)");
}

// ---- 3. dedupe / Venn ----

Result DedupeVenn() {
  std::mt19937_64 rng(0xD0);
  const std::vector<std::string> levels = {"Og", "O1", "O2", "O3", "Os", "Oz"};
  int rounds_ok = 0;
  const int kRounds = 500;
  for (int round = 0; round < kRounds; ++round) {
    std::vector<dh::Violation> all;
    std::set<std::tuple<std::string, int, std::string>> uni;
    for (const auto& l : levels) {
      int n = std::uniform_int_distribution<int>(0, 40)(rng);
      for (int i = 0; i < n; ++i) {
        dh::Violation v;
        v.program_id = "p" + std::to_string(rng() % 6);
        v.conjecture = dh::ConjectureId::kC2;
        v.line = static_cast<int>(rng() % 20);
        v.variable = "v" + std::to_string(rng() % 4);
        v.configs = {{"gcc", l}};
        uni.insert({v.program_id, v.line, v.variable});
        all.push_back(v);
      }
    }
    std::shuffle(all.begin(), all.end(), rng);
    rounds_ok += dh::Dedupe(all).unique.size() == uni.size();
  }

  dh::Json fx = dh::ReadJson(t::FixturePath("dedupe/clang_c1_per_level.json"));
  std::vector<dh::Violation> recorded;
  for (const auto& [level, keys] : fx["levels"].items()) {
    for (const auto& k : keys) {
      dh::Violation v;
      v.program_id = k[0];
      v.conjecture = dh::ConjectureId::kC1;
      v.line = k[1];
      v.variable = k[2];
      v.configs = {{fx["toolchain"], level}};
      recorded.push_back(v);
    }
  }
  dh::DedupeResult r = dh::Dedupe(recorded);
  auto per_level = dh::PerLevelCounts(r.level_matrix);
  // Reference counts for clang, C1, per level.
  const std::map<std::string, int> kReference = {{"Og", 71}, {"O2", 51}, {"O3", 51},
                                             {"Os", 73}, {"Oz", 74}};
  int unique = static_cast<int>(r.unique.size());
  bool ok = rounds_ok == kRounds && unique == 84 && per_level == kReference;
  return Check(ok, std::to_string(rounds_ok) + "/" + std::to_string(kRounds) +
                       " random rounds equal set union; recorded clang C1 replay unique=" +
                       std::to_string(unique) + " (reference 84), per-level " +
                       (per_level == kReference ? "matches" : "differs from") + " the reference");
}

// ---- 4. triage oracle ----

Result TriageOracle() {
  if (!t::HaveGccAndGdb()) return Skip("gcc/gdb not installed");
  auto start = std::chrono::steady_clock::now();
  dh::ScopedTempDir dir("dhaccept4");
  // Real gcc flag names give the catalogs a realistic shape.
  dh::Json real = dh::ReadJson(dh::DataPath("gcc-11.4-flags.json"));
  std::vector<std::string> pool = real["levels"]["O1"].get<std::vector<std::string>>();
  int gcc_ok = 0, clang_ok = 0;
  std::string first_bad;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> catalog;
    for (int k = 0; k < 10; ++k) catalog.push_back(pool[(i * 7 + k * 3) % pool.size()]);
    std::string planted = catalog[(i * 3) % catalog.size()].substr(2);  // drop "-f"
    path case_dir = dir.path() / ("gcc" + std::to_string(i));
    path cat = case_dir / "catalog.json";
    t::WriteCatalog(cat, catalog);
    dh::ToolchainSpec tc = t::FakeGcc(cat);
    dh::TestProgram p =
        t::WriteProgram(case_dir / "p.c", t::PlantedSource("dh-culprit: " + planted));
    dh::PipelineProbe::Settings s;
    s.work_dir = case_dir / "work";
    dh::PipelineProbe probe(p, tc, {p.id, dh::ConjectureId::kC2, t::kPlantedLine, "j"}, s);
    dh::CulpritAttribution a = dh::TriageViolation(probe, tc, dh::OptLevel::kO1, {});
    bool ok = a.kind == dh::CulpritAttribution::Kind::kGccFlagSet &&
              a.gcc_flags == std::set<std::string>{"-fno-" + planted};
    gcc_ok += ok;
    if (!ok && first_bad.empty()) first_bad = "gcc case " + std::to_string(i) + ": " + a.Label();
  }
  dh::ToolchainSpec clang = t::FakeClang();
  for (int i = 0; i < 20; ++i) {
    int planted = 1 + (i * 5) % 12;
    path case_dir = dir.path() / ("clang" + std::to_string(i));
    dh::TestProgram p =
        t::WriteProgram(case_dir / "p.c", t::PlantedSource("dh-bisect: " + std::to_string(planted)));
    dh::PipelineProbe::Settings s;
    s.work_dir = case_dir / "work";
    dh::PipelineProbe probe(p, clang, {p.id, dh::ConjectureId::kC2, t::kPlantedLine, "j"}, s);
    dh::CulpritAttribution a = dh::TriageViolation(probe, clang, dh::OptLevel::kO2, {});
    auto linear = dh::LinearScanLimit(
        [&](int n) { return probe.PresentAtLimit(dh::OptLevel::kO2, n); }, 0, 12);
    bool ok = a.kind == dh::CulpritAttribution::Kind::kClangPass &&
              a.clang_pass->index == planted && linear == planted;
    clang_ok += ok;
    if (!ok && first_bad.empty()) first_bad = "clang case " + std::to_string(i) + ": " + a.Label();
  }
  double secs = Seconds(start);
  return Check(gcc_ok == 20 && clang_ok == 20 && secs < 120.0,
               "gcc flag " + std::to_string(gcc_ok) + "/20, clang bisect index " +
                   std::to_string(clang_ok) + "/20 (linear-scan minimal), " + Fixed(secs) +
                   " s (limit 120 s)" + (first_bad.empty() ? "" : ", " + first_bad));
}

// ---- 5. DIE classifier ----

Result DieClassifier() {
  dh::ElfFile elf = dh::ElfFile::Load(t::BuiltTool("tests/dwarf_fixture"));
  auto dw = dh::dwarf::DwarfData::Load(elf);
  uint64_t early = *elf.SymbolAddress("probe_early");
  uint64_t late = *elf.SymbolAddress("probe_late");
  dh::ValidationOutcome none, confirmed;
  confirmed.confirmed_in = {"lldb-14"};
  struct Case {
    const char* var;
    uint64_t pc;
    const dh::ValidationOutcome* v;
    dh::DieTag want;
  };
  const Case cases[] = {{"absent", late, &none, dh::DieTag::kMissing},
                        {"hollow", late, &none, dh::DieTag::kHollow},
                        {"partial", late, &none, dh::DieTag::kIncomplete},
                        {"inreg", late, &confirmed, dh::DieTag::kIncorrect},
                        {"partial", early, &none, dh::DieTag::kComplete},
                        {"folded", late, &none, dh::DieTag::kComplete}};
  int crafted = 0;
  for (const auto& c : cases) {
    crafted += dh::ClassifyDie(dh::LookupVarDie(dw, "probe", c.var, c.pc), c.pc, *c.v).tag == c.want;
  }
  const int kCrafted = static_cast<int>(std::size(cases));

  dh::Json snaps = dh::ReadJson(dh::DataPath("die_snapshots.json"));
  std::map<std::string, int> split;
  int records = 0;
  for (const auto& r : snaps["records"]) {
    std::string system = r["system"];
    if (system != "gcc" && system != "clang") continue;
    ++records;
    std::optional<dh::VarDieInfo> die;
    if (!r["die"].is_null()) die = r["die"].get<dh::VarDieInfo>();
    auto v = dh::ClassifyDie(die, r["stop_pc"].get<uint64_t>(),
                             r["validation"].get<dh::ValidationOutcome>(),
                             r.value("manual_incorrect", false));
    ++split[std::string(dh::DieTagName(v.tag))];
  }
  const std::map<std::string, int> kReference = {
      {"Missing", 4}, {"Hollow", 16}, {"Incomplete", 12}, {"Incorrect", 3}};
  std::string shown;
  for (const auto& [k, n] : split) shown += (shown.empty() ? "" : " ") + k + "=" + std::to_string(n);
  return Check(crafted == kCrafted && records == 35 && split == kReference,
               std::to_string(crafted) + "/" + std::to_string(kCrafted) +
                   " crafted DWARF cases; snapshots over " + std::to_string(records) +
                   " records: " + shown);
}

// ---- 6. metrics identities ----

dh::LineRecord Rec(int line, const std::map<std::string, std::string>& vars) {
  dh::LineRecord r;
  r.file = "m.c";
  r.line = line;
  r.frame_function = "main";
  for (const auto& [k, v] : vars) r.observations[k] = dh::NormalizeValue(v);
  return r;
}

Result MetricsIdentities() {
  std::mt19937_64 rng(0x6);
  bool identity = true;
  std::vector<dh::MetricsRecord> records;
  double brute_cov = 0, brute_av = 0;
  int brute_av_n = 0;
  for (int p = 0; p < 50; ++p) {
    dh::DebugTrace o0, opt;
    o0.toolchain_id = opt.toolchain_id = "gcc";
    o0.program_id = opt.program_id = "p" + std::to_string(p);
    opt.config.opt_level = dh::OptLevel::kO2;
    int base_lines = 0, shared = 0;
    double ratio_sum = 0;
    int ratio_n = 0;
    for (int l = 1; l <= 15; ++l) {
      std::map<std::string, std::string> full, part;
      for (int v = 0; v < 4; ++v) {
        std::string name = "v" + std::to_string(v);
        if (rng() % 4) full[name] = std::to_string(v);
        if (full.count(name)) part[name] = rng() % 2 ? full[name] : "<optimized out>";
      }
      o0.records.push_back(Rec(l, full));
      ++base_lines;
      if (rng() % 3 == 0) continue;
      opt.records.push_back(Rec(l, part));
      ++shared;
      int avail = 0;
      for (const auto& [k, v] : part) avail += v != "<optimized out>";
      if (!full.empty()) {
        ratio_sum += static_cast<double>(avail) / full.size();
        ++ratio_n;
      }
    }
    identity &= dh::LineCoverage(o0, o0) == 1.0 && dh::VariableAvailability(o0, o0) == 1.0;
    if (opt.records.empty()) continue;
    records.push_back(dh::ComputeMetrics(opt, o0));
    brute_cov += static_cast<double>(shared) / base_lines;
    if (ratio_n) {
      brute_av += ratio_sum / ratio_n;
      ++brute_av_n;
    }
  }
  auto rows = dh::Aggregate(records);
  bool agg = rows.size() == 1 &&
             std::abs(rows[0].line_coverage - brute_cov / records.size()) < 1e-12 &&
             std::abs(*rows[0].availability - brute_av / brute_av_n) < 1e-12;

  dh::DebugTrace a, b;
  a.records = {Rec(1, {{"x", "1"}, {"y", "2"}, {"z", "3"}})};
  b.records = {Rec(1, {{"x", "1"}, {"y", "2"}, {"z", "<optimized out>"}})};
  double two_thirds = *dh::VariableAvailability(b, a);
  bool ratio = std::abs(two_thirds - 2.0 / 3.0) < 1e-12;
  return Check(identity && ratio && agg,
               std::string("identities ") + (identity ? "exact" : "broken") +
                   ", two-of-three = " + Fixed(two_thirds, 15) + ", aggregation " +
                   (agg ? "equals" : "differs from") + " brute force over " +
                   std::to_string(records.size()) + " programs");
}

// ---- 7. end-to-end smoke ----

Result EndToEnd() {
  if (!t::HaveGccAndGdb()) return Skip("gcc/gdb not installed");
  dh::ToolchainSpec gcc = t::HostGcc();
  int major = std::atoi(gcc.version_string.c_str());
  // gcc releases known to emit the hollow DIE for this listing. No fixed
  // release is known, so other versions are reported, not judged.
  bool known_affected = major == 11 || major == 12;
  dh::ScopedTempDir dir("dhaccept7");
  // The listing exactly, without a marker line: the access is on line 8.
  std::string text = t::PlantedSource("x");
  text = text.substr(text.find('\n') + 1);
  const int kLine = t::kPlantedLine - 1;
  dh::TestProgram p = t::WriteProgram(dir.path() / "p1.c", text);
  dh::BuildConfig cfg;
  cfg.opt_level = dh::OptLevel::kO1;
  dh::CompileSettings cs;
  cs.out_dir = dir.path() / "O1";
  cs.with_assembly = false;
  dh::BuiltArtifact art = dh::Compile(p, gcc, cfg, cs);
  dh::DebugTrace trace = dh::CollectTrace(
      art, gcc.debugger_path, dh::ExtractSteppableLines(art.executable_path, {"p1.c"}));
  auto vs = dh::CheckC2(trace, dh::AnalyzeSource(p));
  const dh::Violation* hit = nullptr;
  for (const auto& v : vs) {
    if (v.line == kLine && v.variable == "j") hit = &v;
  }
  std::string label = gcc.Id() + (known_affected ? " (known affected)" : " (status unknown)");
  if (!known_affected) {
    return Skip(label + ": violation " + (hit ? "present" : "absent") + ", not judged");
  }
  if (!hit) return Fail(label + ": no C2 violation for j at line " + std::to_string(kLine));
  auto die = dh::LookupVarDie(art.executable_path, "main", "j", hit->stop_pc, trace.load_bias);
  dh::DieVerdict verdict = dh::ClassifyDie(
      die, hit->stop_pc - static_cast<uint64_t>(trace.load_bias), {});
  return Check(verdict.tag == dh::DieTag::kHollow,
               label + ": C2 j at line " + std::to_string(kLine) + ", verdict " +
                   std::string(dh::DieTagName(verdict.tag)) + " (" + verdict.note + ")");
}

// ---- 8 and 9. throughput and resumability ----

struct CliRun {
  int exit_status = -1;
  std::string out;
};

pid_t Spawn(const std::vector<std::string>& argv, const path& log) {
  pid_t pid = fork();
  if (pid == 0) {
    setpgid(0, 0);
    FILE* f = freopen(log.c_str(), "w", stdout);
    (void)f;
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execv(args[0], args.data());
    _exit(127);
  }
  setpgid(pid, pid);
  return pid;
}

int Wait(pid_t pid) {
  int status = 0;
  waitpid(pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

CliRun RunCli(const std::vector<std::string>& args, const path& log) {
  std::vector<std::string> argv = {t::BuiltTool("debugholes").string()};
  argv.insert(argv.end(), args.begin(), args.end());
  CliRun r;
  r.exit_status = Wait(Spawn(argv, log));
  r.out = dh::ReadFile(log);
  return r;
}

int CheckedPrograms(const path& root) {
  if (!dh::fs::exists(root / "programs")) return 0;
  try {
    dh::RunStore store(root);
    int n = 0;
    for (const auto& [index, id] : store.Programs()) {
      n += store.HasStage(id, dh::Stage::kChecked);
    }
    return n;
  } catch (const dh::Error&) {
    return 0;  // store still being laid out
  }
}

void WriteCampaignConfig(const path& file, const path& store) {
  dh::Json j = {{"schema", 1},
                {"store", store.string()},
                {"program_count", 50},
                {"seed", 2026},
                {"jobs", 4},
                {"levels", {"O1", "O2"}},
                {"conjectures", {"C1", "C2", "C3"}},
                {"generator", {{"path", t::BuiltTool("minigen").string()}}},
                {"toolchains",
                 {{{"family", "gcc"},
                   {"compiler", t::FindOnPath("gcc")->string()},
                   {"debugger", t::FindOnPath("gdb")->string()}}}},
                {"timeouts", {{"generate", 60}, {"compile", 120}, {"trace", 120}}}};
  dh::WriteJsonAtomic(file, j);
}

struct CampaignResults {
  Result throughput = Skip("gcc/gdb not installed");
  Result resume = Skip("gcc/gdb not installed");
};

CampaignResults Campaigns() {
  CampaignResults out;
  if (!t::HaveGccAndGdb()) return out;
  dh::ScopedTempDir dir("dhaccept8");
  path full_cfg = dir.path() / "full.json";
  path killed_cfg = dir.path() / "killed.json";
  WriteCampaignConfig(full_cfg, dir.path() / "full");
  WriteCampaignConfig(killed_cfg, dir.path() / "killed");

  auto start = std::chrono::steady_clock::now();
  CliRun full = RunCli({"campaign", "--config", full_cfg.string()}, dir.path() / "full.log");
  double secs = Seconds(start);
  int programs = CheckedPrograms(dir.path() / "full");
  out.throughput = Check(full.exit_status == 0 && programs == 50 && secs <= 1800.0,
                         std::to_string(programs) + "/50 programs, 3 conjectures, O1+O2, " +
                             "4 workers in " + Fixed(secs) + " s (limit 1800 s)");
  if (full.exit_status != 0) {
    out.resume = Fail("uninterrupted run failed with exit " + std::to_string(full.exit_status));
    return out;
  }

  // Kill the second run once a third of the programs are checked.
  std::vector<std::string> argv = {t::BuiltTool("debugholes").string(), "campaign", "--config",
                                   killed_cfg.string()};
  pid_t pid = Spawn(argv, dir.path() / "killed.log");
  int seen = 0;
  bool exited_early = false;
  while ((seen = CheckedPrograms(dir.path() / "killed")) < 17) {
    int status = 0;
    if (waitpid(pid, &status, WNOHANG) == pid) {
      exited_early = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
  }
  if (!exited_early) {
    kill(-pid, SIGKILL);
    Wait(pid);
  }
  CliRun rerun =
      RunCli({"campaign", "--config", killed_cfg.string()}, dir.path() / "rerun.log");
  std::string a = dh::ReadFile(dir.path() / "full" / "violations.json");
  std::string b = dh::fs::exists(dir.path() / "killed" / "violations.json")
                      ? dh::ReadFile(dir.path() / "killed" / "violations.json")
                      : "";
  CliRun again =
      RunCli({"campaign", "--config", full_cfg.string()}, dir.path() / "again.log");
  bool idle = again.out.find("builds: 0, traces: 0") != std::string::npos;
  size_t count = dh::RunStore(dir.path() / "full").AllViolations().size();
  out.resume = Check(!exited_early && rerun.exit_status == 0 && a == b && idle,
                     std::string("killed after ") + std::to_string(seen) +
                         " programs; resumed violations.json " +
                         (a == b ? "byte-identical" : "differs") + " (" +
                         std::to_string(count) + " violations, " + std::to_string(a.size()) +
                         " bytes); rerun of a finished store " +
                         (idle ? "does no work" : "rebuilt something"));
  return out;
}

// ---- 10. reduction predicate ----

Result ReductionPredicate() {
  if (!t::HaveGccAndGdb()) return Skip("gcc/gdb not installed");
  dh::ScopedTempDir dir("dhaccept10");
  path fx = t::FixturePath("reduction");
  dh::Json triple = dh::ReadJson(fx / "triple.json");
  path cat = dir.path() / "catalog.json";
  t::WriteCatalog(cat, triple["catalog"].get<std::vector<std::string>>());
  dh::InterestingnessSpec spec;
  spec.key.conjecture = dh::RequireConjecture(triple["violation"]["conjecture"].get<std::string>());
  spec.key.line = triple["violation"]["line"];
  spec.key.variable = triple["violation"]["variable"];
  std::string original = dh::ReadFile(fx / triple["program"].get<std::string>());
  spec.construct = dh::ConstructAt(original, spec.key.line);
  spec.toolchain = t::FakeGcc(cat);
  spec.opt_level = dh::RequireOptLevel(triple["opt_level"].get<std::string>());
  spec.culprit = triple["culprit"].get<dh::CulpritAttribution>();
  spec.cli_path = t::BuiltTool("debugholes");

  // (a) as a direct check: the culprit-disabled build of the original.
  dh::TestProgram p = t::WriteProgram(dir.path() / "orig" / "original.c", original);
  dh::PipelineProbe::Settings s;
  s.work_dir = dir.path() / "probe";
  dh::PipelineProbe probe(p, spec.toolchain,
                          {p.id, spec.key.conjecture, spec.key.line, spec.key.variable}, s);
  std::optional<bool> disabled = probe.Present(spec.DisabledConfig());

  int matched = 0, total = 0;
  std::string shown;
  for (const auto& c : triple["candidates"]) {
    // Through the generated script, as a reducer would call it.
    path work = dir.path() / ("c" + std::to_string(total));
    path script = dh::MakeInterestingnessTest(spec, work, "cand.c");
    dh::fs::copy_file(fx / c["file"].get<std::string>(), work / "cand.c");
    dh::RunOptions o;
    o.cwd = work;
    o.timeout = std::chrono::seconds(300);
    bool interesting = dh::RunProcess({script.string()}, o).exit_status == 0;
    matched += interesting == c["interesting"].get<bool>();
    ++total;
    shown += (shown.empty() ? "" : ", ") + c["file"].get<std::string>() + "=" +
             (interesting ? "interesting" : "not");
  }
  return Check(matched == total && disabled == false,
               shown + "; culprit-disabled build " +
                   (disabled == false ? "loses the violation" : "still violates"));
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    std::function<Result()> run;
  };
  CampaignResults campaign;
  bool campaign_done = false;
  auto campaigns = [&]() -> CampaignResults& {
    if (!campaign_done) {
      campaign = Campaigns();
      campaign_done = true;
    }
    return campaign;
  };
  const std::vector<Criterion> criteria = {
      {1, "conjecture-checker fixtures", CheckerFixtures},
      {2, "C3 oracle equivalence", C3Oracle},
      {3, "dedupe and Venn counts", DedupeVenn},
      {4, "triage oracle", TriageOracle},
      {5, "DIE classifier", DieClassifier},
      {6, "metrics identities", MetricsIdentities},
      {7, "end-to-end smoke", EndToEnd},
      {8, "campaign throughput", [&] { return campaigns().throughput; }},
      {9, "kill-and-rerun resumability", [&] { return campaigns().resume; }},
      {10, "reduction predicate", ReductionPredicate},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = Fail(std::string("exception: ") + e.what());
    }
    const char* tag = r.outcome == Outcome::kPass ? "PASS"
                      : r.outcome == Outcome::kSkip ? "SKIP"
                                                    : "FAIL";
    failed += r.outcome == Outcome::kFail;
    std::cout << "[" << tag << "] " << c.number << " " << c.name << ": " << r.detail
              << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria met")
            << std::endl;
  return failed ? 1 : 0;
}
