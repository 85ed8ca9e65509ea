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

#include "debugholes/campaign.h"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "debugholes/buildmatrix.h"
#include "debugholes/corpus.h"
#include "debugholes/dwarfscope.h"
#include "debugholes/reducer.h"

namespace debugholes {
namespace {

constexpr int kStoreSchema = 1;

std::string ShortId(const std::string& id) { return id.substr(0, 12); }

fs::path Resolve(const fs::path& base, const std::string& text) {
  fs::path p(text);
  if (p.is_relative()) p = base / p;
  return p.lexically_normal();
}

std::optional<fs::path> OptionalPath(const Json& j, const char* key,
                                     const fs::path& base) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return Resolve(base, j[key].get<std::string>());
}

Json PathOrNull(const std::optional<fs::path>& p) {
  return p ? Json(p->string()) : Json(nullptr);
}

void RequireKeys(const Json& j, const std::set<std::string>& allowed,
                 const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) {
      throw Error(ErrorCode::kConfig, "unknown key '" + k + "' in " + where);
    }
  }
}

std::string KeyName(const ViolationKey& k) {
  return std::string(ConjectureName(k.conjecture)) + "-L" + std::to_string(k.line) +
         "-" + k.variable;
}

}  // namespace

// ---- config ----

int DefaultJobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n > 1 ? static_cast<int>(n) - 1 : 1;
}

CampaignConfig CampaignConfig::Load(const fs::path& path) {
  Json j;
  try {
    j = ReadJson(path);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  return FromJson(j, fs::absolute(path).parent_path());
}

CampaignConfig CampaignConfig::FromJson(const Json& j, const fs::path& base) {
  RequireKeys(j,
              {"schema", "store", "program_count", "seed", "jobs", "levels",
               "conjectures", "generator", "toolchains", "timeouts", "analyzer",
               "analyzer_args", "reducer", "reducer_args", "classify_dies",
               "triage", "reduce", "probed_toolchains"},
              "config");
  if (j.value("schema", 0) != kSchema) {
    throw Error(ErrorCode::kConfig, "config schema must be " + std::to_string(kSchema));
  }
  CampaignConfig c;
  try {
    c.store_root = Resolve(base, j.at("store").get<std::string>());
    c.program_count = j.value("program_count", 1);
    c.seed = j.value("seed", uint64_t{1});
    c.jobs = j.value("jobs", DefaultJobs());
    for (const auto& l : j.at("levels")) c.levels.push_back(RequireOptLevel(l.get<std::string>()));
    if (j.contains("conjectures")) {
      c.conjectures.clear();
      for (const auto& s : j["conjectures"]) {
        c.conjectures.insert(RequireConjecture(s.get<std::string>()));
      }
    }
    const Json& g = j.at("generator");
    RequireKeys(g, {"path", "args", "assortments", "max_source_lines", "retry_budget"},
                "generator");
    c.generator_path = Resolve(base, g.at("path").get<std::string>());
    c.generator_args = g.value("args", std::vector<std::string>{});
    c.assortments_path = OptionalPath(g, "assortments", base);
    c.max_source_lines = g.value("max_source_lines", 600);
    c.retry_budget = g.value("retry_budget", 10);
    for (const auto& t : j.at("toolchains")) {
      RequireKeys(t, {"family", "compiler", "debugger", "alt_debuggers",
                      "flag_catalog", "include_dirs"},
                  "toolchain");
      ToolchainSpec s;
      s.family = RequireFamily(t.at("family").get<std::string>());
      s.compiler_path = Resolve(base, t.at("compiler").get<std::string>());
      s.debugger_path = Resolve(base, t.at("debugger").get<std::string>());
      for (const auto& a : t.value("alt_debuggers", Json::array())) {
        s.alt_debugger_paths.push_back(Resolve(base, a.get<std::string>()));
      }
      s.flag_catalog_path = OptionalPath(t, "flag_catalog", base);
      for (const auto& d : t.value("include_dirs", Json::array())) {
        s.include_dirs.push_back(Resolve(base, d.get<std::string>()));
      }
      c.toolchains.push_back(std::move(s));
    }
    if (j.contains("timeouts")) {
      const Json& t = j["timeouts"];
      RequireKeys(t, {"generate", "compile", "trace"}, "timeouts");
      c.generate_timeout = std::chrono::seconds(t.value("generate", 60));
      c.compile_timeout = std::chrono::seconds(t.value("compile", 60));
      c.trace_timeout = std::chrono::seconds(t.value("trace", 60));
    }
    c.analyzer_path = OptionalPath(j, "analyzer", base);
    c.analyzer_args = j.value("analyzer_args", std::vector<std::string>{});
    c.reducer_path = OptionalPath(j, "reducer", base);
    c.reducer_args = j.value("reducer_args", std::vector<std::string>{});
    c.classify_dies = j.value("classify_dies", true);
    if (j.contains("triage")) {
      const Json& t = j["triage"];
      RequireKeys(t, {"enabled", "max_flags", "pair_budget", "jobs"}, "triage");
      c.triage = t.value("enabled", false);
      c.triage_budget.max_flags = t.value("max_flags", c.triage_budget.max_flags);
      c.triage_budget.pair_budget = t.value("pair_budget", 0);
      c.triage_budget.jobs = t.value("jobs", 1);
    }
    if (j.contains("reduce")) {
      const Json& r = j["reduce"];
      RequireKeys(r, {"enabled", "wall_budget"}, "reduce");
      c.reduce = r.value("enabled", false);
      c.reduce_wall_budget = std::chrono::seconds(r.value("wall_budget", 3600));
    }
    if (j.contains("probed_toolchains")) {
      c.toolchains = j["probed_toolchains"].get<std::vector<ToolchainSpec>>();
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

Json CampaignConfig::ToJson() const {
  Json tcs = Json::array();
  for (const auto& t : toolchains) {
    std::vector<std::string> alts, incs;
    for (const auto& a : t.alt_debugger_paths) alts.push_back(a.string());
    for (const auto& d : t.include_dirs) incs.push_back(d.string());
    tcs.push_back({{"family", std::string(FamilyName(t.family))},
                   {"compiler", t.compiler_path.string()},
                   {"debugger", t.debugger_path.string()},
                   {"alt_debuggers", alts},
                   {"flag_catalog", PathOrNull(t.flag_catalog_path)},
                   {"include_dirs", incs}});
  }
  std::vector<std::string> levels_s, conj_s;
  for (auto l : levels) levels_s.emplace_back(OptLevelName(l));
  for (auto c : conjectures) conj_s.emplace_back(ConjectureName(c));
  return Json{
      {"schema", kSchema},
      {"store", store_root.string()},
      {"program_count", program_count},
      {"seed", seed},
      {"jobs", jobs},
      {"levels", levels_s},
      {"conjectures", conj_s},
      {"generator",
       {{"path", generator_path.string()},
        {"args", generator_args},
        {"assortments", PathOrNull(assortments_path)},
        {"max_source_lines", max_source_lines},
        {"retry_budget", retry_budget}}},
      {"toolchains", tcs},
      {"timeouts",
       {{"generate", generate_timeout.count()},
        {"compile", compile_timeout.count()},
        {"trace", trace_timeout.count()}}},
      {"analyzer", PathOrNull(analyzer_path)},
      {"analyzer_args", analyzer_args},
      {"reducer", PathOrNull(reducer_path)},
      {"reducer_args", reducer_args},
      {"classify_dies", classify_dies},
      {"triage",
       {{"enabled", triage},
        {"max_flags", triage_budget.max_flags},
        {"pair_budget", triage_budget.pair_budget},
        {"jobs", triage_budget.jobs}}},
      {"reduce", {{"enabled", reduce}, {"wall_budget", reduce_wall_budget.count()}}}};
}

void CampaignConfig::Validate() const {
  if (program_count < 1) throw Error(ErrorCode::kConfig, "program_count must be >= 1");
  if (levels.empty()) throw Error(ErrorCode::kConfig, "no optimization levels");
  if (conjectures.empty()) throw Error(ErrorCode::kConfig, "no conjectures");
  if (toolchains.empty()) throw Error(ErrorCode::kConfig, "no toolchains");
  if (jobs < 1) throw Error(ErrorCode::kConfig, "jobs must be >= 1");
  if (store_root.empty()) throw Error(ErrorCode::kConfig, "store path missing");
  if (reduce && !reducer_path) {
    throw Error(ErrorCode::kConfig, "reduce enabled without a reducer path");
  }
}

void CampaignConfig::CheckTools() const {
  auto check = [](const fs::path& p, const std::string& what) {
    if (::access(p.c_str(), X_OK) != 0 || fs::is_directory(p)) {
      throw Error(ErrorCode::kToolUnavailable, what + " not executable: " + p.string());
    }
  };
  check(generator_path, "generator");
  for (const auto& t : toolchains) {
    check(t.compiler_path, "compiler");
    check(t.debugger_path, "debugger");
    for (const auto& a : t.alt_debugger_paths) check(a, "debugger");
  }
  if (reduce && reducer_path) check(*reducer_path, "reducer");
  // A missing analyzer is recorded per program, not fatal.
}

// ---- store ----

std::string_view StageName(Stage s) {
  switch (s) {
    case Stage::kGenerated: return "generated";
    case Stage::kBuilt: return "built";
    case Stage::kTraced: return "traced";
    case Stage::kChecked: return "checked";
    case Stage::kTriaged: return "triaged";
    case Stage::kReduced: return "reduced";
  }
  return "generated";
}

RunStore::RunStore(fs::path root) : root_(fs::absolute(root).lexically_normal()) {}

fs::path RunStore::ProgramDir(const std::string& program_id) const {
  return root_ / "programs" / ShortId(program_id);
}

fs::path RunStore::IndexFile(int index) const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05d.json", index);
  return root_ / "index" / buf;
}

fs::path RunStore::StageMarker(const std::string& program_id, Stage s) const {
  return ProgramDir(program_id) / "stages" / (std::string(StageName(s)) + ".done");
}

bool RunStore::HasStage(const std::string& program_id, Stage s) const {
  return fs::exists(StageMarker(program_id, s));
}

void RunStore::MarkStage(const std::string& program_id, Stage s) const {
  fs::create_directories(StageMarker(program_id, s).parent_path());
  WriteFileAtomic(StageMarker(program_id, s), std::string(StageName(s)) + "\n");
}

std::vector<std::pair<int, std::string>> RunStore::Programs() const {
  std::vector<std::pair<int, std::string>> out;
  fs::path dir = root_ / "index";
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    Json j = ReadJson(e.path());
    if (!j.contains("program_id")) continue;
    out.emplace_back(j.at("index").get<int>(), j.at("program_id").get<std::string>());
  }
  std::sort(out.begin(), out.end());
  return out;
}

TestProgram RunStore::LoadProgram(const std::string& program_id) const {
  fs::path dir = ProgramDir(program_id);
  Json side = ReadJson(dir / "program.json");
  fs::path src = dir / side.at("source_file").get<std::string>();
  TestProgram p = MakeProgram(ReadFile(src), src);
  if (!side["recipe"].is_null()) p.recipe = side["recipe"].get<GenerationRecipe>();
  return p;
}

std::optional<TestProgram> RunStore::LoadInjected(const std::string& program_id) const {
  fs::path dir = ProgramDir(program_id);
  if (!fs::exists(dir / "program_inj.json")) return std::nullopt;
  Json side = ReadJson(dir / "program_inj.json");
  fs::path src = dir / side.at("source_file").get<std::string>();
  TestProgram p = MakeProgram(ReadFile(src), src);
  if (!side["recipe"].is_null()) p.recipe = side["recipe"].get<GenerationRecipe>();
  p.injected_call = side.at("injected_call").get<OpaqueCallSite>();
  if (side.contains("line_map")) p.line_map = side["line_map"].get<LineMapping>();
  p.parent_id = side.value("parent_id", "");
  return p;
}

std::vector<Violation> RunStore::ProgramViolations(const std::string& program_id) const {
  fs::path f = ProgramDir(program_id) / "violations.json";
  if (!fs::exists(f)) return {};
  return ReadJson(f).at("violations").get<std::vector<Violation>>();
}

std::vector<Violation> RunStore::AllViolations() const {
  fs::path f = root_ / "violations.json";
  if (!fs::exists(f)) throw Error(ErrorCode::kMissingStage, "no violations.json in store");
  return ReadJson(f).at("violations").get<std::vector<Violation>>();
}

std::optional<DebugTrace> RunStore::LoadTrace(const std::string& program_id,
                                              const std::string& toolchain_id,
                                              const std::string& variant,
                                              OptLevel level) const {
  fs::path f = ProgramDir(program_id) / "traces" / toolchain_id /
               (variant + "-" + std::string(OptLevelName(level)) + ".json");
  if (!fs::exists(f)) return std::nullopt;
  return ReadJson(f).get<DebugTrace>();
}

CampaignConfig RunStore::LoadConfig() const {
  fs::path f = root_ / "campaign.json";
  if (!fs::exists(f)) throw Error(ErrorCode::kMissingStage, "no campaign.json in store");
  CampaignConfig c = CampaignConfig::FromJson(ReadJson(f), root_);
  c.store_root = root_;
  return c;
}

// ---- per-program pipeline ----

namespace {

struct StageErrors {
  Json entries = Json::array();

  void Add(const std::string& where, const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    entries.push_back({{"where", where},
                       {"code", err ? std::string(ErrorCodeName(err->code())) : "internal"},
                       {"message", e.what()}});
  }
  void Write(const fs::path& file) const {
    fs::create_directories(file.parent_path());
    WriteJsonAtomic(file, entries);
  }
};

class Pipeline {
 public:
  Pipeline(const CampaignConfig& config, const RunStore& store,
           std::map<std::string, fs::path> stubs)
      : config_(config), store_(store), stubs_(std::move(stubs)) {
    if (config_.assortments_path) assortments_ = LoadAssortments(*config_.assortments_path);
  }

  void RunProgram(int index) {
    std::optional<std::string> id = Generated(index);
    if (!id) return;
    if (!store_.HasStage(*id, Stage::kBuilt)) Build(*id);
    if (!store_.HasStage(*id, Stage::kTraced)) Trace(*id);
    if (!store_.HasStage(*id, Stage::kChecked)) Check(*id);
    if (config_.triage && !store_.HasStage(*id, Stage::kTriaged)) Triage(*id);
    if (config_.reduce && !store_.HasStage(*id, Stage::kReduced)) Reduce(*id);
  }

  std::atomic<long> builds{0};
  std::atomic<long> traces{0};

 private:
  const CampaignConfig& config_;
  const RunStore& store_;
  std::map<std::string, fs::path> stubs_;  // toolchain id -> stub object
  std::vector<std::vector<std::string>> assortments_;

  bool WantsC1() const { return config_.conjectures.count(ConjectureId::kC1) > 0; }

  std::vector<OptLevel> AllLevels() const {
    std::vector<OptLevel> out = {OptLevel::kO0};
    for (auto l : config_.levels) {
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
    return out;
  }

  fs::path BuildDir(const std::string& id, const ToolchainSpec& tc,
                    const std::string& variant, OptLevel level) const {
    return store_.ProgramDir(id) / "builds" / tc.Id() /
           (variant + "-" + std::string(OptLevelName(level)));
  }
  fs::path TraceFile(const std::string& id, const ToolchainSpec& tc,
                     const std::string& variant, OptLevel level) const {
    return store_.ProgramDir(id) / "traces" / tc.Id() /
           (variant + "-" + std::string(OptLevelName(level)) + ".json");
  }

  // Variants built at `level`: the plain program always, the injected one
  // at optimized levels when C1 is checked.
  std::vector<std::pair<std::string, TestProgram>> Variants(const std::string& id,
                                                            OptLevel level) const {
    std::vector<std::pair<std::string, TestProgram>> out;
    out.emplace_back("plain", store_.LoadProgram(id));
    if (WantsC1() && level != OptLevel::kO0) {
      if (auto inj = store_.LoadInjected(id)) out.emplace_back("inj", std::move(*inj));
    }
    return out;
  }

  std::optional<std::string> Generated(int index) {
    fs::path idx = store_.IndexFile(index);
    if (fs::exists(idx)) {
      Json j = ReadJson(idx);
      if (j.contains("program_id")) {
        std::string id = j["program_id"].get<std::string>();
        if (store_.HasStage(id, Stage::kGenerated)) return id;
      }
    }
    StageErrors errors;
    try {
      return Generate(index, errors);
    } catch (const std::exception& e) {
      errors.Add("generate", e);
      fs::create_directories(idx.parent_path());
      WriteJsonAtomic(idx, Json{{"index", index}, {"errors", errors.entries}});
      return std::nullopt;
    }
  }

  std::string Generate(int index, StageErrors& errors) {
    GenerationRecipe recipe;
    recipe.seed = config_.seed * 1000003ULL + static_cast<uint64_t>(index) * 1000ULL;
    recipe.max_source_lines = config_.max_source_lines;
    if (!assortments_.empty()) {
      recipe.option_set_id = index % static_cast<int>(assortments_.size());
      recipe.generator_options = assortments_[recipe.option_set_id];
    }
    GeneratorSettings gs;
    gs.generator_path = config_.generator_path;
    gs.base_args = config_.generator_args;
    gs.retry_budget = config_.retry_budget;
    gs.timeout = config_.generate_timeout;
    gs.check_toolchain = config_.toolchains.front();
    gs.out_dir = store_.root() / "work" / ("gen-" + std::to_string(index));
    ScreenSettings ss;
    ss.toolchains = config_.toolchains;
    ss.analyzer_path = config_.analyzer_path;
    ss.analyzer_args = config_.analyzer_args;
    ss.timeout = config_.compile_timeout;

    std::vector<std::pair<uint64_t, std::string>> rejected;
    std::optional<TestProgram> accepted;
    ScreenVerdict verdict;
    for (int attempt = 0; attempt <= config_.retry_budget && !accepted; ++attempt) {
      TestProgram p = GenerateProgram(recipe, gs);
      verdict = ScreenUndefinedBehavior(p, ss);
      if (verdict.clean) {
        accepted = std::move(p);
      } else {
        rejected.emplace_back(p.recipe->effective_seed,
                              "UB screen: " + verdict.findings.front().text);
        recipe.seed = p.recipe->effective_seed + 1;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::kRetriesExhausted, "every candidate failed the UB screen");
    }
    GenerationRecipe final_recipe = *accepted->recipe;
    final_recipe.seed = config_.seed * 1000003ULL + static_cast<uint64_t>(index) * 1000ULL;
    final_recipe.retries.insert(final_recipe.retries.begin(), rejected.begin(), rejected.end());

    std::string id = accepted->id;
    fs::path dir = store_.ProgramDir(id);
    fs::create_directories(dir);
    std::string name = "t" + ShortId(id) + ".c";
    WriteFileAtomic(dir / name, accepted->source_text);
    TestProgram program = MakeProgram(accepted->source_text, dir / name);
    program.recipe = final_recipe;
    WriteJsonAtomic(dir / "program.json", ProgramSidecar(program, verdict));
    fs::remove_all(gs.out_dir);

    if (WantsC1()) {
      InjectionSettings is;
      is.check_toolchain = config_.toolchains.front();
      try {
        TestProgram inj = InjectOpaqueCall(program, final_recipe.effective_seed, is);
        WriteJsonAtomic(dir / "program_inj.json", ProgramSidecar(inj, std::nullopt));
      } catch (const Error& e) {
        errors.Add("inject", e);
      }
    }
    errors.Write(dir / "errors" / "generated.json");
    fs::create_directories(store_.IndexFile(index).parent_path());
    WriteJsonAtomic(store_.IndexFile(index), Json{{"index", index}, {"program_id", id}});
    store_.MarkStage(id, Stage::kGenerated);
    return id;
  }

  void Build(const std::string& id) {
    StageErrors errors;
    for (const auto& tc : config_.toolchains) {
      for (OptLevel level : AllLevels()) {
        for (const auto& [variant, program] : Variants(id, level)) {
          BuildConfig cfg;
          cfg.opt_level = level;
          cfg.link_stub = variant == "inj";
          CompileSettings cs;
          cs.timeout = config_.compile_timeout;
          cs.out_dir = BuildDir(id, tc, variant, level);
          if (cfg.link_stub) cs.stub_object = stubs_.at(tc.Id());
          fs::remove(cs.out_dir / "meta.json");
          ++builds;
          try {
            Compile(program, tc, cfg, cs);
          } catch (const std::exception& e) {
            errors.Add("build " + tc.Id() + " " + variant + "-" +
                           std::string(OptLevelName(level)), e);
          }
        }
      }
    }
    errors.Write(store_.ProgramDir(id) / "errors" / "built.json");
    store_.MarkStage(id, Stage::kBuilt);
  }

  void Trace(const std::string& id) {
    StageErrors errors;
    for (const auto& tc : config_.toolchains) {
      for (OptLevel level : AllLevels()) {
        for (const auto& [variant, program] : Variants(id, level)) {
          fs::path meta = BuildDir(id, tc, variant, level) / "meta.json";
          fs::path out = TraceFile(id, tc, variant, level);
          fs::remove(out);
          if (!fs::exists(meta)) continue;
          std::string where = "trace " + tc.Id() + " " + variant + "-" +
                              std::string(OptLevelName(level));
          ++traces;
          try {
            BuiltArtifact art = ReadJson(meta).get<BuiltArtifact>();
            SteppableLineSet lines =
                ExtractSteppableLines(art.executable_path, {program.FileName()});
            TraceSettings ts;
            ts.timeout = config_.trace_timeout;
            DebugTrace t = CollectTrace(art, tc.debugger_path, lines, ts);
            t.program_id = program.id;
            fs::create_directories(out.parent_path());
            WriteJsonAtomic(out, Json(t));
            if (t.exit_status != TraceExit::kRanToCompletion) {
              errors.Add(where, Error(ErrorCode::kTraceTimeout,
                                      "partial trace: " +
                                          std::string(TraceExitName(t.exit_status))));
            }
          } catch (const std::exception& e) {
            errors.Add(where, e);
          }
        }
      }
    }
    errors.Write(store_.ProgramDir(id) / "errors" / "traced.json");
    store_.MarkStage(id, Stage::kTraced);
  }

  void Classify(std::vector<Violation>& vs, const ToolchainSpec& tc,
                const fs::path& build_dir, const DebugTrace& trace,
                StageErrors& errors) {
    if (!config_.classify_dies) return;
    BuiltArtifact art;
    try {
      art = ReadJson(build_dir / "meta.json").get<BuiltArtifact>();
    } catch (const std::exception& e) {
      errors.Add("classify", e);
      return;
    }
    for (auto& v : vs) {
      try {
        if (!tc.alt_debugger_paths.empty()) {
          TraceSettings ts;
          ts.timeout = config_.trace_timeout;
          v.validation = CrossValidate(art, v.file, v.line, v.variable,
                                       tc.alt_debugger_paths, ts);
        }
        auto die = LookupVarDie(art.executable_path, v.function, v.variable,
                                v.stop_pc, trace.load_bias);
        v.die_verdict = ClassifyDie(die, v.stop_pc - static_cast<uint64_t>(trace.load_bias),
                                    v.validation);
      } catch (const std::exception& e) {
        errors.Add("classify " + v.Key().ToString(), e);
      }
    }
  }

  void Check(const std::string& id) {
    StageErrors errors;
    std::vector<Violation> all;
    TestProgram plain = store_.LoadProgram(id);
    std::optional<SourceFacts> facts;
    try {
      facts = AnalyzeSource(plain);
    } catch (const std::exception& e) {
      errors.Add("facts", e);
    }
    if (facts) {
      WriteJsonAtomic(store_.ProgramDir(id) / "facts.json", FactsToJson(*facts));
    }
    for (const auto& tc : config_.toolchains) {
      for (OptLevel level : config_.levels) {
        if (level == OptLevel::kO0) continue;
        for (const auto& [variant, program] : Variants(id, level)) {
          fs::path tf = TraceFile(id, tc, variant, level);
          if (!fs::exists(tf)) continue;
          DebugTrace trace = ReadJson(tf).get<DebugTrace>();
          std::vector<Violation> vs;
          std::vector<SkipRecord> skips;
          if (variant == "inj") {
            vs = CheckC1(trace, *program.injected_call, &skips);
          } else if (facts) {
            if (config_.conjectures.count(ConjectureId::kC2)) {
              auto c2 = CheckC2(trace, *facts);
              vs.insert(vs.end(), c2.begin(), c2.end());
            }
            if (config_.conjectures.count(ConjectureId::kC3)) {
              auto c3 = CheckC3(trace, *facts);
              vs.insert(vs.end(), c3.begin(), c3.end());
            }
          }
          StampViolations(vs, trace, program);
          for (auto& v : vs) v.program_id = id;
          Classify(vs, tc, BuildDir(id, tc, variant, level), trace, errors);
          fs::path out = store_.ProgramDir(id) / "checks" /
                         (tc.Id() + "-" + variant + "-" +
                          std::string(OptLevelName(level)) + ".json");
          fs::create_directories(out.parent_path());
          WriteJsonAtomic(out, Json{{"schema", kStoreSchema},
                                    {"violations", vs},
                                    {"skips", skips}});
          all.insert(all.end(), vs.begin(), vs.end());
        }
      }
    }
    DedupeResult d = Dedupe(all);
    WriteJsonAtomic(store_.ProgramDir(id) / "violations.json",
                    Json{{"schema", kStoreSchema},
                         {"program_id", id},
                         {"violations", d.unique}});
    errors.Write(store_.ProgramDir(id) / "errors" / "checked.json");
    store_.MarkStage(id, Stage::kChecked);
  }

 public:
  // Shared with CmdTriage and CmdReduce.
  std::optional<std::pair<ToolchainSpec, OptLevel>> ConfigOf(const Violation& v) const {
    for (const auto& [tc_id, level] : v.configs) {
      for (const auto& tc : config_.toolchains) {
        if (tc.Id() == tc_id) return std::make_pair(tc, RequireOptLevel(level));
      }
    }
    return std::nullopt;
  }

  TestProgram ProgramFor(const Violation& v) const {
    if (v.conjecture == ConjectureId::kC1) {
      if (auto inj = store_.LoadInjected(v.program_id)) return *inj;
    }
    return store_.LoadProgram(v.program_id);
  }

  fs::path TriageFile(const Violation& v) const {
    return store_.ProgramDir(v.program_id) / "triage" / (KeyName(v.Key()) + ".json");
  }

  std::optional<CulpritAttribution> TriageOne(const Violation& v) {
    fs::path out = TriageFile(v);
    if (fs::exists(out)) return ReadJson(out).at("attribution").get<CulpritAttribution>();
    auto cfg = ConfigOf(v);
    if (!cfg) return std::nullopt;
    fs::path work = store_.ProgramDir(v.program_id) / "triage" / ("work-" + KeyName(v.Key()));
    PipelineProbe::Settings ps;
    ps.work_dir = work;
    ps.compile.timeout = config_.compile_timeout;
    ps.trace.timeout = config_.trace_timeout;
    if (v.conjecture == ConjectureId::kC1) ps.stub_object = stubs_.at(cfg->first.Id());
    ViolationKey key = v.Key();
    PipelineProbe probe(ProgramFor(v), cfg->first, key, ps);
    CulpritAttribution a = TriageViolation(probe, cfg->first, cfg->second, config_.triage_budget);
    WriteJsonAtomic(out, Json{{"schema", kStoreSchema},
                              {"key", key.ToString()},
                              {"toolchain", cfg->first.Id()},
                              {"opt_level", std::string(OptLevelName(cfg->second))},
                              {"attribution", a}});
    fs::remove_all(work);
    return a;
  }

  std::optional<fs::path> ReduceOne(const Violation& v, const fs::path& reducer,
                                    std::chrono::seconds wall_budget,
                                    const fs::path& cli_path) {
    fs::path tf = TriageFile(v);
    if (!fs::exists(tf)) return std::nullopt;
    CulpritAttribution a = ReadJson(tf).at("attribution").get<CulpritAttribution>();
    if (a.kind == CulpritAttribution::Kind::kUnattributed) return std::nullopt;
    auto cfg = ConfigOf(v);
    if (!cfg) return std::nullopt;
    TestProgram program = ProgramFor(v);
    InterestingnessSpec spec;
    spec.key = v.Key();
    spec.key.program_id = program.id;
    spec.construct = ConstructAt(program.source_text, v.line);
    spec.toolchain = cfg->first;
    spec.opt_level = cfg->second;
    spec.culprit = a;
    spec.compile_timeout = config_.compile_timeout;
    spec.trace_timeout = config_.trace_timeout;
    if (v.conjecture == ConjectureId::kC1) {
      spec.stub_object = stubs_.at(cfg->first.Id());
      spec.callee = program.injected_call->callee;
    }
    spec.cli_path = cli_path;
    ReductionSettings rs;
    rs.reducer_path = reducer;
    rs.reducer_args = config_.reducer_args;
    rs.wall_budget = wall_budget;
    rs.triage_budget = config_.triage_budget;
    fs::path dir = store_.ProgramDir(v.program_id) / "reduce" / KeyName(v.Key());
    ReductionResult r = RunReduction(program, spec, rs, dir);
    Json summary{{"iterations", r.iterations},
                 {"final_verification", r.final_verification},
                 {"verification_regressed", r.verification_regressed},
                 {"fuzzy_line", r.fuzzy_line},
                 {"matched_line", r.matched_line}};
    if (r.final_verification) {
      BundleInputs in = CollectBundleInputs(spec, r);
      r.bundle_path = EmitReportBundle(r, spec, in, dir);
      summary["bundle"] = r.bundle_path.string();
    }
    WriteJsonAtomic(dir / "result.json", summary);
    return r.bundle_path;
  }

 private:
  void Triage(const std::string& id) {
    StageErrors errors;
    for (const auto& v : store_.ProgramViolations(id)) {
      try {
        TriageOne(v);
      } catch (const std::exception& e) {
        errors.Add("triage " + v.Key().ToString(), e);
      }
    }
    errors.Write(store_.ProgramDir(id) / "errors" / "triaged.json");
    store_.MarkStage(id, Stage::kTriaged);
  }

  void Reduce(const std::string& id) {
    StageErrors errors;
    for (const auto& v : store_.ProgramViolations(id)) {
      try {
        ReduceOne(v, *config_.reducer_path, config_.reduce_wall_budget, config_.cli_path);
      } catch (const std::exception& e) {
        errors.Add("reduce " + v.Key().ToString(), e);
      }
    }
    errors.Write(store_.ProgramDir(id) / "errors" / "reduced.json");
    store_.MarkStage(id, Stage::kReduced);
  }
};

// Toolchains with probed versions, keeping configured extras.
std::vector<ToolchainSpec> ProbeAll(const std::vector<ToolchainSpec>& configured) {
  std::vector<ToolchainSpec> out;
  for (const auto& c : configured) {
    ToolchainSpec t = ProbeToolchain(c.family, c.compiler_path, c.debugger_path);
    t.alt_debugger_paths = c.alt_debugger_paths;
    t.flag_catalog_path = c.flag_catalog_path;
    t.include_dirs = c.include_dirs;
    out.push_back(std::move(t));
  }
  return out;
}

std::map<std::string, fs::path> StubObjects(const RunStore& store,
                                            const std::vector<ToolchainSpec>& tcs,
                                            long* builds) {
  std::map<std::string, fs::path> out;
  for (const auto& tc : tcs) {
    fs::path dir = store.root() / "stub" / tc.Id();
    fs::path obj = dir / "stub.o";
    if (!fs::exists(obj)) {
      obj = BuildStubObject(tc, dir);
      ++*builds;
    }
    out[tc.Id()] = obj;
  }
  return out;
}

void WriteStoreOutputs(const RunStore& store, const CampaignConfig& config,
                       const CampaignSummary& summary) {
  std::vector<Violation> all;
  for (const auto& [index, id] : store.Programs()) {
    auto vs = store.ProgramViolations(id);
    all.insert(all.end(), vs.begin(), vs.end());
  }
  std::sort(all.begin(), all.end(),
            [](const Violation& a, const Violation& b) { return a.Key() < b.Key(); });
  WriteJsonAtomic(store.root() / "violations.json",
                  Json{{"schema", kStoreSchema}, {"violations", all}});
  WriteJsonAtomic(store.root() / "summary.json", Json(summary));
  WriteFileAtomic(store.root() / "summary.txt", summary.Render());
  WriteFileAtomic(store.root() / "heatgrid.csv", HeatGridCsv(ConjectureCounts(store)));
  (void)config;
}

bool MatchesFilter(const Violation& v, const std::regex& re) {
  return std::regex_search(v.Key().ToString(), re);
}

std::regex CompileFilter(const std::string& filter) {
  try {
    return std::regex(filter.empty() ? std::string(".*") : filter);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kConfig, "bad filter '" + filter + "': " + e.what());
  }
}

}  // namespace

// ---- summary ----

std::vector<int> ConjectureCounts(const RunStore& store) {
  std::vector<int> out;
  for (const auto& [index, id] : store.Programs()) {
    std::set<ConjectureId> hit;
    for (const auto& v : store.ProgramViolations(id)) hit.insert(v.conjecture);
    out.push_back(static_cast<int>(hit.size()));
  }
  return out;
}

CampaignSummary Summarize(const RunStore& store, const CampaignConfig& config) {
  CampaignSummary s;
  std::map<std::string, ToolchainTable> tables;
  std::vector<std::string> levels;
  for (auto l : config.levels) {
    if (l != OptLevel::kO0) levels.emplace_back(OptLevelName(l));
  }
  for (const auto& tc : config.toolchains) {
    ToolchainTable& t = tables[tc.Id()];
    t.toolchain = tc.Id();
    t.levels = levels;
    for (auto c : config.conjectures) {
      t.unique[c] = 0;
      for (const auto& l : levels) t.per_level[c][l] = 0;
    }
  }
  for (const auto& [index, id] : store.Programs()) {
    ++s.programs;
    if (!store.HasStage(id, Stage::kChecked)) {
      ++s.programs_failed;
      continue;
    }
    fs::path errors = store.ProgramDir(id) / "errors";
    bool failed = false;
    if (fs::exists(errors)) {
      for (const auto& e : fs::directory_iterator(errors)) {
        if (!ReadJson(e.path()).empty()) failed = true;
      }
    }
    if (failed) ++s.programs_failed;
    std::vector<Violation> vs = store.ProgramViolations(id);
    bool has_inj = fs::exists(store.ProgramDir(id) / "program_inj.json");
    for (auto c : config.conjectures) {
      if (c == ConjectureId::kC1 && !has_inj) continue;
      ++s.checked_programs[c];
      bool any = std::any_of(vs.begin(), vs.end(),
                             [&](const Violation& v) { return v.conjecture == c; });
      if (!any) ++s.no_violation_programs[c];
    }
    for (const auto& v : vs) {
      std::map<std::string, std::set<std::string>> by_tc;
      for (const auto& [tc, level] : v.configs) by_tc[tc].insert(level);
      for (const auto& [tc, lv] : by_tc) {
        auto it = tables.find(tc);
        if (it == tables.end()) continue;
        ++it->second.unique[v.conjecture];
        for (const auto& l : lv) ++it->second.per_level[v.conjecture][l];
      }
    }
  }
  for (auto& [id, t] : tables) s.tables.push_back(std::move(t));
  return s;
}

std::string CampaignSummary::Render() const {
  std::ostringstream os;
  os << "programs: " << programs << " (" << programs_failed
     << " with recorded stage errors)\n\n";
  for (const auto& t : tables) {
    os << t.toolchain << "\n" << std::left << std::setw(6) << "";
    for (const auto& l : t.levels) os << std::right << std::setw(8) << l;
    os << std::setw(8) << "unique" << "\n";
    for (const auto& [c, per] : t.per_level) {
      os << std::left << std::setw(6) << ConjectureName(c);
      for (const auto& l : t.levels) os << std::right << std::setw(8) << per.at(l);
      os << std::setw(8) << t.unique.at(c) << "\n";
    }
    os << "\n";
  }
  os << "no violations in (";
  bool first = true;
  for (const auto& [c, n] : no_violation_programs) {
    os << (first ? "" : ", ") << ConjectureName(c) << " " << n << "/"
       << checked_programs.at(c);
    first = false;
  }
  os << ") programs\n";
  return os.str();
}

void to_json(Json& j, const CampaignSummary& s) {
  Json tables = Json::array();
  for (const auto& t : s.tables) {
    Json per = Json::object();
    Json uniq = Json::object();
    for (const auto& [c, m] : t.per_level) per[std::string(ConjectureName(c))] = m;
    for (const auto& [c, n] : t.unique) uniq[std::string(ConjectureName(c))] = n;
    tables.push_back({{"toolchain", t.toolchain},
                      {"levels", t.levels},
                      {"per_level", per},
                      {"unique", uniq}});
  }
  Json none = Json::object(), checked = Json::object();
  for (const auto& [c, n] : s.no_violation_programs) none[std::string(ConjectureName(c))] = n;
  for (const auto& [c, n] : s.checked_programs) checked[std::string(ConjectureName(c))] = n;
  j = Json{{"schema", kStoreSchema},
           {"programs", s.programs},
           {"programs_failed", s.programs_failed},
           {"tables", tables},
           {"no_violation_programs", none},
           {"checked_programs", checked}};
}

// ---- commands ----

CampaignSummary RunCampaign(const CampaignConfig& input,
                            const CampaignOptions& options) {
  input.Validate();
  input.CheckTools();
  CampaignConfig config = input;
  config.toolchains = ProbeAll(input.toolchains);
  RunStore store(config.store_root);
  fs::create_directories(store.root());
  Json stored = input.ToJson();
  stored["probed_toolchains"] = config.toolchains;
  WriteJsonAtomic(store.root() / "campaign.json", stored);

  long stub_builds = 0;
  Pipeline pipeline(config, store, StubObjects(store, config.toolchains, &stub_builds));
  pipeline.builds += stub_builds;

  std::atomic<int> next{0};
  std::atomic<int> finished{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (;;) {
      if (options.stop_after && finished.load() >= *options.stop_after) return;
      int index = next++;
      if (index >= config.program_count) return;
      try {
        pipeline.RunProgram(index);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(log_mu);
        std::cerr << "program " << index << ": " << e.what() << "\n";
      }
      int done = ++finished;
      if (!options.quiet) {
        std::lock_guard<std::mutex> lock(log_mu);
        std::cerr << "[" << done << "/" << config.program_count << "] program "
                  << index << " done\n";
      }
    }
  };
  std::vector<std::thread> pool;
  int jobs = std::min(config.jobs, config.program_count);
  for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  CampaignSummary summary = Summarize(store, config);
  summary.builds = pipeline.builds;
  summary.traces = pipeline.traces;
  WriteStoreOutputs(store, config, summary);
  fs::remove_all(store.root() / "work");
  return summary;
}

TriageCommandResult CmdTriage(const RunStore& store, const std::string& filter,
                              std::optional<int> jobs) {
  CampaignConfig config = store.LoadConfig();
  std::regex re = CompileFilter(filter);
  std::vector<Violation> selected;
  for (const auto& v : store.AllViolations()) {
    if (MatchesFilter(v, re)) selected.push_back(v);
  }
  TriageCommandResult result;
  if (selected.empty()) return result;
  long stub_builds = 0;
  Pipeline pipeline(config, store, StubObjects(store, config.toolchains, &stub_builds));

  std::vector<std::optional<CulpritAttribution>> found(selected.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < selected.size(); i = next++) {
      try {
        found[i] = pipeline.TriageOne(selected[i]);
      } catch (const std::exception& e) {
        std::cerr << "triage " << selected[i].Key().ToString() << ": " << e.what() << "\n";
      }
    }
  };
  std::vector<std::thread> pool;
  int n = std::max(1, std::min<int>(jobs.value_or(config.jobs), static_cast<int>(selected.size())));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::map<std::string, std::vector<std::pair<ViolationKey, CulpritAttribution>>> by_tc;
  for (size_t i = 0; i < selected.size(); ++i) {
    if (!found[i]) continue;
    ++result.triaged;
    auto cfg = pipeline.ConfigOf(selected[i]);
    by_tc[cfg->first.Id()].emplace_back(selected[i].Key(), *found[i]);
  }
  fs::path dir = store.root() / "triage";
  fs::create_directories(dir);
  for (const auto& [tc, items] : by_tc) {
    auto tables = GroupByCulprit(items);
    for (const auto& [conj, rows] : tables) {
      WriteFileAtomic(dir / ("groups-" + tc + "-" + std::string(ConjectureName(conj)) + ".csv"),
                      GroupTableCsv(rows));
    }
    WriteFileAtomic(dir / ("groups-" + tc + ".txt"), RenderGroupTables(tables, tc));
    result.tables[tc] = std::move(tables);
  }
  return result;
}

ReduceCommandResult CmdReduce(const RunStore& store, const std::string& filter,
                              const fs::path& reducer,
                              std::chrono::seconds wall_budget,
                              const fs::path& cli_path) {
  CampaignConfig config = store.LoadConfig();
  std::regex re = CompileFilter(filter);
  long stub_builds = 0;
  Pipeline pipeline(config, store, StubObjects(store, config.toolchains, &stub_builds));
  ReduceCommandResult r;
  for (const auto& v : store.AllViolations()) {
    if (!MatchesFilter(v, re)) continue;
    try {
      auto bundle = pipeline.ReduceOne(v, reducer, wall_budget, cli_path);
      if (bundle && !bundle->empty()) {
        ++r.reduced;
        r.bundles.push_back(*bundle);
      } else {
        ++r.skipped;
      }
    } catch (const std::exception& e) {
      std::cerr << "reduce " << v.Key().ToString() << ": " << e.what() << "\n";
      ++r.skipped;
    }
  }
  return r;
}

std::vector<MetricsRecord> CmdMetrics(const RunStore& store) {
  CampaignConfig config = store.LoadConfig();
  std::vector<MetricsRecord> records;
  for (const auto& [index, id] : store.Programs()) {
    if (!store.HasStage(id, Stage::kTraced)) continue;
    for (const auto& tc : config.toolchains) {
      std::optional<DebugTrace> o0;
      bool o0_loaded = false;
      for (OptLevel level : config.levels) {
        if (level == OptLevel::kO0) continue;
        auto opt = store.LoadTrace(id, tc.Id(), "plain", level);
        if (!opt) continue;
        if (!o0_loaded) {
          o0 = store.LoadTrace(id, tc.Id(), "plain", OptLevel::kO0);
          o0_loaded = true;
        }
        if (!o0) {
          throw Error(ErrorCode::kMissingStage,
                      "no O0 trace for program " + ShortId(id) + " under " + tc.Id());
        }
        try {
          records.push_back(ComputeMetrics(*opt, *o0));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kEmptyReference) throw;
        }
      }
    }
  }
  fs::path dir = store.root() / "metrics";
  fs::create_directories(dir);
  auto rows = Aggregate(records);
  WriteFileAtomic(dir / "metrics.csv", MetricsCsv(records));
  WriteFileAtomic(dir / "metrics_aggregate.csv", AggregateCsv(rows));
  WriteFileAtomic(dir / "metrics.dat", GnuplotData(rows));
  WriteFileAtomic(dir / "metrics.gp", GnuplotScript("metrics.dat"));
  WriteFileAtomic(dir / "heatgrid.csv", HeatGridCsv(ConjectureCounts(store)));
  return records;
}

CompareReport CmdCompare(const RunStore& a, const RunStore& b,
                         const std::string& label_a, const std::string& label_b) {
  std::set<std::string> ids_a, ids_b;
  for (const auto& [i, id] : a.Programs()) ids_a.insert(id);
  for (const auto& [i, id] : b.Programs()) ids_b.insert(id);
  if (ids_a != ids_b) {
    throw Error(ErrorCode::kCorpusMismatch,
                "stores ran different corpora (" + std::to_string(ids_a.size()) +
                    " vs " + std::to_string(ids_b.size()) + " programs)");
  }
  CompareReport r;
  r.label_a = label_a;
  r.label_b = label_b;
  std::set<std::string> keys_a, keys_b;
  for (auto c : {ConjectureId::kC1, ConjectureId::kC2, ConjectureId::kC3}) r.counts[c] = {0, 0};
  for (const auto& v : a.AllViolations()) {
    ++r.counts[v.conjecture].first;
    keys_a.insert(v.Key().ToString());
  }
  for (const auto& v : b.AllViolations()) {
    ++r.counts[v.conjecture].second;
    keys_b.insert(v.Key().ToString());
  }
  std::set_difference(keys_b.begin(), keys_b.end(), keys_a.begin(), keys_a.end(),
                      std::back_inserter(r.appeared));
  std::set_difference(keys_a.begin(), keys_a.end(), keys_b.begin(), keys_b.end(),
                      std::back_inserter(r.disappeared));
  r.heat_a = ConjectureCounts(a);
  r.heat_b = ConjectureCounts(b);
  return r;
}

std::string CompareReport::Render() const {
  std::ostringstream os;
  size_t w = std::max<size_t>({8, label_a.size() + 2, label_b.size() + 2});
  os << std::left << std::setw(6) << "" << std::right << std::setw(w) << label_a
     << std::setw(w) << label_b << std::setw(8) << "delta" << "\n";
  for (const auto& [c, n] : counts) {
    os << std::left << std::setw(6) << ConjectureName(c) << std::right << std::setw(w)
       << n.first << std::setw(w) << n.second << std::setw(8) << (n.second - n.first)
       << "\n";
  }
  os << "\nappeared (" << appeared.size() << "):\n";
  for (const auto& k : appeared) os << "  + " << k << "\n";
  os << "disappeared (" << disappeared.size() << "):\n";
  for (const auto& k : disappeared) os << "  - " << k << "\n";
  auto grid_a = HeatGrid(heat_a), grid_b = HeatGrid(heat_b);
  os << "\nheat grids (" << label_a << " | " << label_b << "):\n";
  for (size_t i = 0; i < std::max(grid_a.size(), grid_b.size()); ++i) {
    auto row = [](const std::vector<std::vector<int>>& g, size_t i) {
      std::string s;
      if (i < g.size()) {
        for (int v : g[i]) s += static_cast<char>('0' + v);
      }
      s.resize(25, ' ');
      return s;
    };
    os << "  " << row(grid_a, i) << " | " << row(grid_b, i) << "\n";
  }
  return os.str();
}

void to_json(Json& j, const CompareReport& r) {
  Json counts = Json::object();
  for (const auto& [c, n] : r.counts) {
    counts[std::string(ConjectureName(c))] = {{r.label_a, n.first},
                                              {r.label_b, n.second},
                                              {"delta", n.second - n.first}};
  }
  j = Json{{"schema", kStoreSchema},
           {"labels", {r.label_a, r.label_b}},
           {"counts", counts},
           {"appeared", r.appeared},
           {"disappeared", r.disappeared},
           {"heat_a", r.heat_a},
           {"heat_b", r.heat_b}};
}

std::vector<fs::path> CmdReport(const RunStore& store, const std::string& filter) {
  CampaignConfig config = store.LoadConfig();
  std::regex re = CompileFilter(filter);
  std::vector<fs::path> out;
  fs::path dir = store.root() / "reports";
  for (const auto& v : store.AllViolations()) {
    if (!MatchesFilter(v, re)) continue;
    bool c1 = v.conjecture == ConjectureId::kC1;
    TestProgram program = c1 && store.LoadInjected(v.program_id)
                              ? *store.LoadInjected(v.program_id)
                              : store.LoadProgram(v.program_id);
    std::ostringstream os;
    os << "violation " << v.Key().ToString() << "\n"
       << "program " << v.program_id << " (" << program.FileName() << ")\n"
       << "function " << v.function << ", line " << v.line << ", variable "
       << v.variable << "\n"
       << "observed " << AvailabilityName(v.observed.tag) << ", expected "
       << v.expected << "\n"
       << "configs:";
    for (const auto& [tc, level] : v.configs) os << " " << tc << "/" << level;
    os << "\n\n-- source --\n";
    auto lines = SplitLines(program.source_text);
    for (int l = std::max(1, v.line - 6);
         l <= std::min<int>(static_cast<int>(lines.size()), v.line + 6); ++l) {
      os << (l == v.line ? ">" : " ") << std::setw(5) << l << "  " << lines[l - 1] << "\n";
    }
    os << "\n-- trace at line " << v.line << " --\n";
    if (!v.configs.empty()) {
      const auto& [tc, level] = *v.configs.begin();
      auto t = store.LoadTrace(v.program_id, tc, c1 ? "inj" : "plain", RequireOptLevel(level));
      const LineRecord* rec = t ? t->Find(v.line) : nullptr;
      os << (rec ? Json(*rec).dump(2) : std::string("(no stored record)")) << "\n";
    }
    os << "\n-- DIE verdict --\n";
    if (v.die_verdict) {
      os << DieTagName(v.die_verdict->tag) << ": " << v.die_verdict->note << "\n";
    } else {
      os << "(not classified)\n";
    }
    os << "\n-- attribution --\n";
    fs::path tf = store.ProgramDir(v.program_id) / "triage" / (KeyName(v.Key()) + ".json");
    if (fs::exists(tf)) {
      os << ReadJson(tf).at("attribution").dump(2) << "\n";
    } else {
      os << "(not triaged)\n";
    }
    fs::path bundle = store.ProgramDir(v.program_id) / "reduce" / KeyName(v.Key()) / "report";
    os << "\n-- reduction --\n"
       << (fs::exists(bundle) ? bundle.string() : std::string("(not reduced)")) << "\n";
    fs::create_directories(dir);
    fs::path f = dir / (ShortId(v.program_id) + "-" + KeyName(v.Key()) + ".txt");
    WriteFileAtomic(f, os.str());
    out.push_back(f);
  }
  (void)config;
  return out;
}

}  // namespace debugholes
