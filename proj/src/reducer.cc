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

#include "debugholes/reducer.h"

#include <sys/stat.h>

#include <cctype>
#include <cstdlib>
#include <regex>
#include <sstream>

#include "debugholes/corpus.h"

namespace debugholes {

void InterestingnessSpec::Validate() const {
  if (culprit.kind == CulpritAttribution::Kind::kUnattributed) {
    throw Error(ErrorCode::kConfig, "interestingness needs an attributed culprit");
  }
  if (culprit.kind == CulpritAttribution::Kind::kClangPass && !culprit.clang_pass) {
    throw Error(ErrorCode::kConfig, "clang culprit without a pass");
  }
  if (culprit.kind == CulpritAttribution::Kind::kGccFlagSet && culprit.gcc_flags.empty()) {
    throw Error(ErrorCode::kConfig, "gcc culprit without flags");
  }
}

BuildConfig InterestingnessSpec::DisabledConfig() const {
  BuildConfig c;
  c.opt_level = opt_level;
  if (culprit.kind == CulpritAttribution::Kind::kClangPass) {
    c.extra_flags = {"-mllvm",
                     "-opt-bisect-limit=" + std::to_string(culprit.clang_pass->index - 1)};
  } else if (!culprit.ranked_flags.empty()) {
    c.extra_flags = culprit.ranked_flags;
  } else {
    c.extra_flags.assign(culprit.gcc_flags.begin(), culprit.gcc_flags.end());
  }
  return c;
}

std::string ConstructAt(const std::string& source, int line) {
  std::vector<std::string> lines = SplitLines(source);
  if (line < 1 || line > static_cast<int>(lines.size())) return "";
  std::string out;
  bool space = false;
  for (char ch : Trim(lines[line - 1])) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += ch;
  }
  return out;
}

std::optional<OpaqueCallSite> FindOpaqueCall(const c::TranslationUnit& tu,
                                             const std::string& callee) {
  for (const auto& fn : tu.functions) {
    std::optional<OpaqueCallSite> site;
    c::VisitStmts(fn.body, [&](const c::Stmt& s) {
      if (site || !s.expr) return;
      c::VisitExprs(*s.expr, [&](const c::Expr& e) {
        if (site || e.kind != c::Expr::Kind::kCall) return;
        if (e.kids[0].kind != c::Expr::Kind::kIdent || e.kids[0].text != callee) return;
        OpaqueCallSite cs;
        cs.line = e.line > 0 ? e.line : s.line;
        cs.callee = callee;
        cs.function = fn.name;
        for (size_t i = 1; i < e.kids.size(); ++i) {
          const c::Expr* arg = &e.kids[i];
          while (arg->kind == c::Expr::Kind::kCast) arg = &arg->kids[0];
          if (arg->kind == c::Expr::Kind::kIdent) cs.argument_vars.push_back(arg->text);
        }
        site = cs;
      });
    });
    if (site) return site;
  }
  return std::nullopt;
}

namespace {

PipelineProbe::Settings ProbeSettings(const InterestingnessSpec& spec,
                                      const fs::path& dir) {
  PipelineProbe::Settings ps;
  ps.work_dir = dir;
  ps.stub_object = spec.stub_object;
  ps.compile.timeout = spec.compile_timeout;
  ps.trace.timeout = spec.trace_timeout;
  return ps;
}

// Loads a candidate; for C1, re-locates the opaque call.
std::optional<TestProgram> LoadCandidate(const InterestingnessSpec& spec,
                                         const fs::path& path, std::string* why) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error&) {
    *why = "unreadable candidate";
    return std::nullopt;
  }
  TestProgram p = MakeProgram(text, fs::absolute(path));
  if (spec.key.conjecture == ConjectureId::kC1) {
    try {
      auto site = FindOpaqueCall(c::Parse(text), spec.callee);
      if (!site) {
        *why = "opaque call removed";
        return std::nullopt;
      }
      p.injected_call = site;
    } catch (const Error&) {
      *why = "outside the parser subset";
      return std::nullopt;
    }
  }
  return p;
}

}  // namespace

InterestingVerdict EvaluateCandidate(const InterestingnessSpec& spec,
                                     const fs::path& candidate) {
  InterestingVerdict v;
  auto program = LoadCandidate(spec, candidate, &v.reason);
  if (!program) return v;

  if (spec.require_ub_clean) {
    ScreenSettings ss;
    ss.toolchains = {spec.toolchain};
    ss.timeout = spec.compile_timeout;
    ScreenVerdict sv = ScreenUndefinedBehavior(*program, ss);
    if (!sv.clean) {
      v.reason = "fails the UB screen: " + sv.findings.front().text;
      return v;
    }
  }

  ScopedTempDir tmp("dhint");
  ViolationKey key = spec.key;
  key.program_id = program->id;
  PipelineProbe baseline(*program, spec.toolchain, key, ProbeSettings(spec, tmp.path()));
  BuildConfig base;
  base.opt_level = spec.opt_level;
  std::vector<Violation> found;
  try {
    found = baseline.Violations(base);
  } catch (const Error& e) {
    v.reason = std::string("baseline build failed: ") + e.what();
    return v;
  }
  // Same conjecture and variable; prefer the line carrying the original
  // construct, nearest to the original line number.
  int best = 0, best_dist = 0;
  bool best_exact = false;
  for (const auto& f : found) {
    if (f.conjecture != key.conjecture || f.variable != key.variable) continue;
    bool exact = ConstructAt(program->source_text, f.line) == spec.construct;
    int dist = std::abs(f.line - key.line);
    if (best == 0 || (exact && !best_exact) ||
        (exact == best_exact && dist < best_dist)) {
      best = f.line;
      best_dist = dist;
      best_exact = exact;
    }
  }
  if (best == 0) {
    v.reason = "violation absent at " + std::string(OptLevelName(spec.opt_level));
    return v;
  }
  v.matched_line = best;
  v.fuzzy_line = !best_exact;
  key.line = best;

  PipelineProbe disabled(*program, spec.toolchain, key, ProbeSettings(spec, tmp.path()));
  std::optional<bool> present = disabled.Present(spec.DisabledConfig());
  if (!present) {
    v.reason = "culprit-disabled build failed";
    return v;
  }
  if (*present) {
    v.reason = "violation persists with the culprit disabled";
    return v;
  }
  v.interesting = true;
  v.reason = "present at " + std::string(OptLevelName(spec.opt_level)) +
             ", absent with " + spec.DisabledConfig().Describe();
  return v;
}

fs::path MakeInterestingnessTest(const InterestingnessSpec& spec,
                                 const fs::path& dir,
                                 const std::string& file_name) {
  fs::create_directories(dir);
  fs::path spec_path = fs::absolute(dir / "spec.json");
  WriteJsonAtomic(spec_path, Json(spec));
  fs::path script = fs::absolute(dir / "interesting.sh");
  std::ostringstream os;
  os << "#!/bin/sh\n"
     << "# Interesting iff " << spec.key.ToString() << " reproduces and "
     << "vanishes with " << spec.DisabledConfig().Describe() << ".\n"
     << "exec " << ShellQuote(spec.cli_path.string()) << " interesting --spec "
     << ShellQuote(spec_path.string()) << ' ' << ShellQuote(file_name) << '\n';
  WriteFileAtomic(script, os.str());
  ::chmod(script.c_str(), 0755);
  return script;
}

ReductionResult RunReduction(const TestProgram& program,
                             const InterestingnessSpec& spec,
                             const ReductionSettings& settings,
                             const fs::path& work_dir) {
  spec.Validate();
  ReductionResult r;
  r.work_dir = fs::absolute(work_dir);
  fs::create_directories(r.work_dir);
  std::string name = program.FileName();
  r.reduced_path = r.work_dir / name;
  WriteFileAtomic(r.work_dir / ("orig_" + name), program.source_text);
  WriteFileAtomic(r.reduced_path, program.source_text);
  fs::path script = MakeInterestingnessTest(spec, r.work_dir, name);

  RunOptions opts;
  opts.cwd = r.work_dir;
  opts.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(
      spec.compile_timeout * 4 + spec.trace_timeout * 2 + std::chrono::seconds(30));
  ProcessResult pre = RunProcess({script.string()}, opts);
  if (pre.exit_status != 0) {
    throw Error(ErrorCode::kPreconditionFlaky,
                "original program is not interesting: " + Trim(pre.out + pre.err));
  }

  std::vector<std::string> argv = {settings.reducer_path.string()};
  argv.insert(argv.end(), settings.reducer_args.begin(), settings.reducer_args.end());
  argv.push_back(script.string());
  argv.push_back(name);
  opts.timeout = settings.wall_budget;
  ProcessResult red = RunProcess(argv, opts);
  WriteFileAtomic(r.work_dir / "reducer.log", red.out + red.err);
  if (!red.timed_out && red.exit_status != 0) {
    throw Error(ErrorCode::kReducerFailed,
                "reducer exited with " + std::to_string(red.exit_status) + ": " +
                    Trim(red.err));
  }
  static const std::regex kProgress(R"(\(\s*-?[0-9.]+ %, [0-9]+ bytes\))");
  r.iterations = static_cast<int>(std::distance(
      std::sregex_iterator(red.out.begin(), red.out.end(), kProgress),
      std::sregex_iterator()));

  r.reduced_source = ReadFile(r.reduced_path);
  InterestingVerdict fin = EvaluateCandidate(spec, r.reduced_path);
  r.final_verification = fin.interesting;
  r.fuzzy_line = fin.fuzzy_line;
  r.matched_line = fin.matched_line;

  if (r.final_verification && settings.retriage) {
    std::string why;
    auto reduced = LoadCandidate(spec, r.reduced_path, &why);
    ViolationKey key = spec.key;
    key.program_id = reduced->id;
    key.line = fin.matched_line;
    ScopedTempDir tmp("dhretriage");
    PipelineProbe probe(*reduced, spec.toolchain, key, ProbeSettings(spec, tmp.path()));
    r.retriage = TriageViolation(probe, spec.toolchain, spec.opt_level,
                                 settings.triage_budget);
    r.verification_regressed = r.retriage->Label() != spec.culprit.Label();
  }
  return r;
}

BundleInputs CollectBundleInputs(const InterestingnessSpec& spec,
                                 const ReductionResult& result) {
  BundleInputs in;
  std::string why;
  auto program = LoadCandidate(spec, result.reduced_path, &why);
  if (!program) throw Error(ErrorCode::kConfig, "reduced program unusable: " + why);
  BuildConfig base;
  base.opt_level = spec.opt_level;
  BuildConfig off = spec.DisabledConfig();
  base.link_stub = off.link_stub = program->injected_call.has_value();

  fs::path dir = result.work_dir / "bundle_builds";
  CompileSettings cs;
  cs.timeout = spec.compile_timeout;
  cs.stub_object = spec.stub_object;
  cs.out_dir = dir / "culprit_on";
  BuiltArtifact a = Compile(*program, spec.toolchain, base, cs);
  cs.out_dir = dir / "culprit_off";
  BuiltArtifact b = Compile(*program, spec.toolchain, off, cs);
  in.commands = {ShellJoin(CompileCommand(*program, spec.toolchain, base,
                                          spec.stub_object, a.executable_path)),
                 ShellJoin(CompileCommand(*program, spec.toolchain, off,
                                          spec.stub_object, b.executable_path))};
  in.debugger_id = DebuggerId(spec.toolchain.debugger_path);

  std::set<std::string> files = {program->FileName()};
  TraceSettings ts;
  ts.timeout = spec.trace_timeout;
  DebugTrace ta = CollectTrace(a, spec.toolchain.debugger_path,
                               ExtractSteppableLines(a.executable_path, files), ts);
  DebugTrace tb = CollectTrace(b, spec.toolchain.debugger_path,
                               ExtractSteppableLines(b.executable_path, files), ts);
  int line = result.matched_line;
  std::ostringstream excerpt;
  for (const auto& [label, t] : {std::pair{"culprit on", &ta}, std::pair{"culprit off", &tb}}) {
    const LineRecord* rec = t->Find(line);
    excerpt << label << ": ";
    excerpt << (rec ? Json(*rec).dump(2) : std::string("line not stepped")) << "\n";
  }
  in.trace_excerpt = excerpt.str();

  const LineRecord* rec = ta.Find(line);
  std::string function = rec ? rec->frame_function : "";
  if (rec) {
    in.validation = CrossValidate(a, program->FileName(), line, spec.key.variable,
                                  spec.toolchain.alt_debugger_paths, ts);
    uint64_t link_pc = rec->stop_pc - static_cast<uint64_t>(ta.load_bias);
    auto die = LookupVarDie(a.executable_path, function, spec.key.variable,
                            rec->stop_pc, ta.load_bias);
    in.verdict = ClassifyDie(die, link_pc, in.validation);
  }
  if (!in.validation.DebuggerSideCandidate() && !function.empty()) {
    in.die_diff = DiffDies(a, b, function, spec.key.variable);
  }
  return in;
}

fs::path EmitReportBundle(const ReductionResult& result,
                          const InterestingnessSpec& spec,
                          const BundleInputs& inputs, const fs::path& dir) {
  if (!result.final_verification) {
    throw Error(ErrorCode::kConfig, "report bundle requires a verified reduction");
  }
  fs::path report = dir / "report";
  fs::create_directories(report);
  std::string name = result.reduced_path.filename().string();
  WriteFileAtomic(report / name, result.reduced_source);
  WriteJsonAtomic(report / "spec.json", Json(spec));
  WriteJsonAtomic(report / "attribution.json", Json(spec.culprit));

  std::ostringstream versions;
  versions << "compiler: " << spec.toolchain.compiler_path.string() << " ("
           << spec.toolchain.Id() << ")\n"
           << spec.toolchain.version_string << "\n"
           << "debugger: " << spec.toolchain.debugger_path.string() << " ("
           << inputs.debugger_id << ")\n";
  WriteFileAtomic(report / "versions.txt", versions.str());
  WriteFileAtomic(report / "commands.txt", JoinLines(inputs.commands));
  WriteFileAtomic(report / "trace.txt", inputs.trace_excerpt);

  std::ostringstream die;
  if (inputs.verdict) {
    die << "verdict: " << DieTagName(inputs.verdict->tag) << " ("
        << inputs.verdict->note << ")\n";
  }
  die << "cross-validation: confirmed=" << inputs.validation.confirmed_in.size()
      << " refuted=" << inputs.validation.refuted_in.size()
      << " skipped=" << inputs.validation.skipped.size() << "\n";
  if (inputs.die_diff) {
    die << "\n" << inputs.die_diff->Render();
    WriteFileAtomic(report / "asm.diff", inputs.die_diff->asm_diff);
  } else {
    die << "no DIE section: the loss looks debugger-side\n";
  }
  WriteFileAtomic(report / "die.txt", die.str());
  bool same_code = inputs.die_diff && inputs.die_diff->same_code;
  WriteFileAtomic(report / "same_code", same_code ? "true\n" : "false\n");

  std::ostringstream replay;
  replay << "#!/bin/sh\n"
         << "# Exit 0 when the violation still reproduces with its culprit.\n"
         << "cd \"$(dirname \"$0\")\" && exec "
         << ShellQuote(spec.cli_path.string()) << " interesting --spec spec.json "
         << ShellQuote(name) << '\n';
  WriteFileAtomic(report / "replay.sh", replay.str());
  ::chmod((report / "replay.sh").c_str(), 0755);

  std::ostringstream readme;
  readme << "Violation " << spec.key.ToString() << " ("
         << ConjectureName(spec.key.conjecture) << ")\n"
         << "level: " << OptLevelName(spec.opt_level)
         << ", culprit: " << spec.culprit.Label() << "\n"
         << "violating line in " << name << ": " << result.matched_line
         << (result.fuzzy_line ? " (matched fuzzily, construct changed)" : "") << "\n"
         << (result.verification_regressed
                 ? "LABEL: verification regressed, re-triage found " +
                       result.retriage->Label() + "\n"
                 : "")
         << "\nFiles:\n"
         << "  " << name << "  reduced program\n"
         << "  versions.txt     compiler and debugger versions\n"
         << "  commands.txt     compile commands, culprit on then off\n"
         << "  trace.txt        debugger records at the violating line\n"
         << "  attribution.json culprit attribution\n"
         << "  die.txt          DIE verdict and DIE diff\n"
         << "  asm.diff         normalized assembly diff\n"
         << "  same_code        whether both builds emit the same code\n"
         << "  replay.sh        re-runs the two-build check\n";
  WriteFileAtomic(report / "README", readme.str());
  return report;
}

void to_json(Json& j, const InterestingnessSpec& s) {
  j = Json{{"schema", 1},
           {"key",
            {{"program_id", s.key.program_id},
             {"conjecture", std::string(ConjectureName(s.key.conjecture))},
             {"line", s.key.line},
             {"variable", s.key.variable}}},
           {"construct", s.construct},
           {"toolchain", s.toolchain},
           {"opt_level", std::string(OptLevelName(s.opt_level))},
           {"culprit", s.culprit},
           {"require_ub_clean", s.require_ub_clean},
           {"compile_timeout", s.compile_timeout.count()},
           {"trace_timeout", s.trace_timeout.count()},
           {"callee", s.callee},
           {"cli_path", s.cli_path.string()}};
  j["stub_object"] = s.stub_object ? Json(s.stub_object->string()) : Json(nullptr);
}

void from_json(const Json& j, InterestingnessSpec& s) {
  const Json& k = j.at("key");
  s.key.program_id = k.value("program_id", "");
  s.key.conjecture = RequireConjecture(k.at("conjecture").get<std::string>());
  s.key.line = k.at("line").get<int>();
  s.key.variable = k.at("variable").get<std::string>();
  s.construct = j.value("construct", "");
  s.toolchain = j.at("toolchain").get<ToolchainSpec>();
  s.opt_level = RequireOptLevel(j.at("opt_level").get<std::string>());
  s.culprit = j.at("culprit").get<CulpritAttribution>();
  s.require_ub_clean = j.value("require_ub_clean", true);
  s.compile_timeout = std::chrono::seconds(j.value("compile_timeout", 60));
  s.trace_timeout = std::chrono::seconds(j.value("trace_timeout", 60));
  s.callee = j.value("callee", "dh_opaque_sink");
  s.cli_path = j.value("cli_path", "");
  s.stub_object.reset();
  if (j.contains("stub_object") && !j["stub_object"].is_null()) {
    s.stub_object = fs::path(j["stub_object"].get<std::string>());
  }
}

}  // namespace debugholes
