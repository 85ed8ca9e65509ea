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

#include "debugholes/corpus.h"

#include <algorithm>
#include <map>
#include <random>
#include <regex>
#include <set>

#include "debugholes/buildmatrix.h"
#include "debugholes/subprocess.h"

namespace debugholes {

const FunctionFacts* TestProgram::FindFunction(const std::string& name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const FunctionFacts* TestProgram::FunctionAtLine(int line) const {
  for (const auto& f : functions) {
    if (line >= f.body_begin && line <= f.body_end) return &f;
  }
  return nullptr;
}

namespace {

void CollectLocals(const c::Stmt& s, int scope_end, FunctionFacts& out) {
  using K = c::Stmt::Kind;
  if (s.kind == K::kDecl) {
    for (const auto& d : s.decls) {
      if (d.type.is_function || d.type.is_extern) continue;
      out.locals.push_back(
          {d.name, d.type, d.line, scope_end, d.init.has_value()});
    }
    return;
  }
  if (s.kind == K::kCompound) {
    for (const auto& c : s.children) CollectLocals(c, s.end_line, out);
    return;
  }
  if (s.kind == K::kFor) {
    for (const auto& d : s.decls) {
      out.locals.push_back(
          {d.name, d.type, d.line, s.end_line, d.init.has_value()});
    }
  }
  for (const auto& c : s.children) CollectLocals(c, scope_end, out);
}

}  // namespace

std::vector<FunctionFacts> ExtractFunctionFacts(const c::TranslationUnit& tu) {
  std::vector<FunctionFacts> out;
  for (const auto& f : tu.functions) {
    FunctionFacts facts;
    facts.name = f.name;
    facts.body_begin = f.body_begin;
    facts.body_end = f.body_end;
    CollectLocals(f.body, f.body_end, facts);
    out.push_back(std::move(facts));
  }
  return out;
}

TestProgram MakeProgram(std::string source_text, fs::path source_path) {
  TestProgram p;
  p.id = Sha256Hex(source_text);
  p.source_text = std::move(source_text);
  p.source_path = std::move(source_path);
  try {
    p.functions = ExtractFunctionFacts(c::Parse(p.source_text));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnsupportedSyntax) throw;
  }
  return p;
}

std::vector<std::vector<std::string>> LoadAssortments(const fs::path& path) {
  Json j = ReadJson(path);
  std::vector<std::vector<std::string>> out;
  for (const auto& set : j.at("assortments")) {
    out.push_back(set.get<std::vector<std::string>>());
  }
  return out;
}

TestProgram GenerateProgram(GenerationRecipe recipe,
                            const GeneratorSettings& settings) {
  if (!fs::exists(settings.generator_path)) {
    throw Error(ErrorCode::kGeneratorFailed,
                "generator not found: " + settings.generator_path.string());
  }
  recipe.retries.clear();
  uint64_t seed = recipe.seed;
  for (int attempt = 0; attempt <= settings.retry_budget; ++attempt, ++seed) {
    std::vector<std::string> argv = {settings.generator_path.string()};
    argv.insert(argv.end(), settings.base_args.begin(),
                settings.base_args.end());
    argv.push_back("--seed");
    argv.push_back(std::to_string(seed));
    argv.insert(argv.end(), recipe.generator_options.begin(),
                recipe.generator_options.end());
    RunOptions opts;
    opts.timeout = settings.timeout;
    ProcessResult r = RunProcess(argv, opts);
    if (r.timed_out) {
      throw Error(ErrorCode::kGeneratorFailed,
                  "timeout: " + ShellJoin(argv));
    }
    if (r.exit_status != 0) {
      throw Error(ErrorCode::kGeneratorFailed,
                  "exit " + std::to_string(r.exit_status) + ": " +
                      ShellJoin(argv) + "\n" + r.err);
    }
    size_t lines = std::count(r.out.begin(), r.out.end(), '\n');
    if (static_cast<int>(lines) > recipe.max_source_lines) {
      recipe.retries.emplace_back(seed,
                                  "too long (" + std::to_string(lines) + ")");
      continue;
    }
    std::string id = Sha256Hex(r.out);
    fs::create_directories(settings.out_dir);
    fs::path path = settings.out_dir / ("t" + id.substr(0, 12) + ".c");
    WriteFileAtomic(path, r.out);
    if (settings.check_toolchain) {
      ProcessResult cr =
          CompileOnly(path, *settings.check_toolchain, OptLevel::kO0, {"-w"});
      if (cr.exit_status != 0) {
        recipe.retries.emplace_back(seed, "does not compile at -O0");
        fs::remove(path);
        continue;
      }
    }
    recipe.effective_seed = seed;
    TestProgram p = MakeProgram(std::move(r.out), path);
    p.recipe = recipe;
    return p;
  }
  throw Error(ErrorCode::kRetriesExhausted,
              "no acceptable program after " +
                  std::to_string(settings.retry_budget) + " retries from seed " +
                  std::to_string(recipe.seed));
}

// ---- undefined-behavior screening ----

namespace {

const std::set<std::string>& BlockingWarnings() {
  static const std::set<std::string> kFlags = {
      "-Wuninitialized",        "-Wmaybe-uninitialized",
      "-Wsometimes-uninitialized", "-Wsequence-point",
      "-Wunsequenced",          "-Wdiv-by-zero",
      "-Wdivision-by-zero",     "-Warray-bounds",
      "-Waggressive-loop-optimizations", "-Wshift-count-overflow",
      "-Wshift-count-negative", "-Wshift-negative-value",
      "-Wshift-overflow",       "-Woverflow",
      "-Winteger-overflow",     "-Wreturn-type",
      "-Wreturn-local-addr",    "-Wreturn-stack-address",
      "-Wnull-dereference",     "-Wstringop-overflow",
      "-Wint-conversion",       "-Wincompatible-pointer-types",
      "-Wimplicit-function-declaration", "-Wtautological-compare"};
  return kFlags;
}

}  // namespace

ScreenVerdict ScreenUndefinedBehavior(const TestProgram& program,
                                      const ScreenSettings& settings) {
  ScreenVerdict verdict;
  static const std::regex kDiag(R"(^([^:]*):(\d+):(\d+): (warning|error): (.*?)(?: \[(-W[^\]=,]+)[^\]]*\])?$)");
  for (const auto& tc : settings.toolchains) {
    std::vector<std::string> extra = {"-Wall", "-Wextra",
                                      "-fdiagnostics-color=never"};
    if (tc.family == CompilerFamily::kClang) {
      extra.push_back("-Wconditional-uninitialized");
    }
    ProcessResult r = CompileOnly(program.source_path, tc, OptLevel::kO1,
                                  extra, settings.timeout);
    for (const auto& line : SplitLines(r.err)) {
      std::smatch m;
      if (!std::regex_match(line, m, kDiag)) continue;
      bool is_error = m[4] == "error";
      std::string flag = m[6].matched ? m[6].str() : "";
      if (!is_error && !BlockingWarnings().count(flag)) continue;
      verdict.findings.push_back({tc.Id(), line, true});
    }
    if (r.exit_status != 0 && verdict.findings.empty()) {
      verdict.findings.push_back({tc.Id(), "compilation failed", true});
    }
  }
  if (settings.analyzer_path) {
    const fs::path& analyzer = *settings.analyzer_path;
    if (!fs::exists(analyzer)) {
      verdict.analyzer_skipped = true;
      verdict.findings.push_back(
          {analyzer.filename().string(),
           "skipped: analyzer not installed at " + analyzer.string(), false});
    } else {
      std::vector<std::string> argv = {analyzer.string()};
      argv.insert(argv.end(), settings.analyzer_args.begin(),
                  settings.analyzer_args.end());
      argv.push_back(program.source_path.string());
      RunOptions opts;
      opts.timeout = settings.timeout;
      ProcessResult r = RunProcess(argv, opts);
      if (r.exit_status != 0 || r.timed_out) {
        std::string text = Trim(r.err.empty() ? r.out : r.err);
        if (r.timed_out) text = "timeout";
        verdict.findings.push_back(
            {analyzer.filename().string(), text, true});
      }
    }
  }
  verdict.clean = std::none_of(verdict.findings.begin(),
                               verdict.findings.end(),
                               [](const Finding& f) { return f.blocking; });
  return verdict;
}

// ---- opaque-call injection ----

namespace {

struct ScopedVar {
  const c::VarDecl* decl;
  int order;  // declaration order within the function
};

struct Site {
  int line;
  std::string function;
  std::vector<ScopedVar> eligible;  // in declaration order
};

// Names assigned by `e` (plain identifiers on the left of an assignment
// or under ++/--).
void AssignedNames(const c::Expr& e, std::set<std::string>& out) {
  c::VisitExprs(e, [&](const c::Expr& x) {
    const c::Expr* target = nullptr;
    if (x.kind == c::Expr::Kind::kAssign) target = &x.kids[0];
    if ((x.kind == c::Expr::Kind::kUnary &&
         (x.text == "++" || x.text == "--")) ||
        x.kind == c::Expr::Kind::kPostfix) {
      target = &x.kids[0];
    }
    if (target && target->kind == c::Expr::Kind::kIdent) {
      out.insert(target->text);
    }
  });
}

class SiteCollector {
 public:
  explicit SiteCollector(const std::string& function) : function_(function) {}

  std::vector<Site> sites;

  void Block(const c::Stmt& block) {
    scopes_.emplace_back();
    assigned_.emplace_back();
    for (const auto& item : block.children) {
      using K = c::Stmt::Kind;
      if (item.kind == K::kDecl) {
        for (const auto& d : item.decls) {
          if (d.type.is_function || d.type.is_extern) continue;
          scopes_.back().push_back({&d, order_++});
          if (d.init) AssignedNames(*d.init, assigned_.back());
        }
        continue;
      }
      if (item.starts_line && item.kind != K::kLabel &&
          item.kind != K::kCase && item.kind != K::kDefault &&
          item.kind != K::kEmpty && item.kind != K::kCompound) {
        Site site{item.line, function_, Eligible()};
        if (!site.eligible.empty()) sites.push_back(std::move(site));
      }
      // Definite assignments at this block level.
      if (item.kind == K::kExpr && item.expr) {
        AssignedNames(*item.expr, assigned_.back());
      }
      if (item.kind == K::kFor && item.init) {
        AssignedNames(*item.init, assigned_.back());
      }
      Descend(item);
    }
    scopes_.pop_back();
    assigned_.pop_back();
  }

 private:
  std::string function_;
  std::vector<std::vector<ScopedVar>> scopes_;
  std::vector<std::set<std::string>> assigned_;
  int order_ = 0;

  void Descend(const c::Stmt& s) {
    using K = c::Stmt::Kind;
    if (s.kind == K::kCompound) {
      Block(s);
      return;
    }
    if (s.kind == K::kFor && !s.decls.empty()) {
      scopes_.emplace_back();
      assigned_.emplace_back();
      for (const auto& d : s.decls) {
        scopes_.back().push_back({&d, order_++});
        if (d.init) AssignedNames(*d.init, assigned_.back());
      }
      for (const auto& c : s.children) Descend(c);
      scopes_.pop_back();
      assigned_.pop_back();
      return;
    }
    for (const auto& c : s.children) Descend(c);
  }

  bool Initialized(const ScopedVar& v) const {
    if (v.decl->init) return true;
    for (const auto& set : assigned_) {
      if (set.count(v.decl->name)) return true;
    }
    return false;
  }

  std::vector<ScopedVar> Eligible() const {
    std::set<std::string> seen;
    std::vector<ScopedVar> out;
    // Innermost scope first so shadowed outer declarations are skipped.
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      for (auto v = it->rbegin(); v != it->rend(); ++v) {
        const c::VarDecl& d = *v->decl;
        if (!seen.insert(d.name).second) continue;
        if (!d.type.IsScalar() || d.type.is_static) continue;
        if (!Initialized(*v)) continue;
        out.push_back(*v);
      }
    }
    std::sort(out.begin(), out.end(),
              [](const ScopedVar& a, const ScopedVar& b) {
                return a.order < b.order;
              });
    return out;
  }
};

std::string ArgumentText(const c::VarDecl& d) {
  const c::TypeInfo& t = d.type;
  if (t.IsPointer()) return "(int)(long)" + d.name;
  if (t.base == "int" || t.base == "signed int" || t.base == "signed") {
    return d.name;
  }
  return "(int)" + d.name;
}

std::string Prototype(const std::string& callee, int arity) {
  std::string out = "void " + callee + "(";
  for (int i = 0; i < arity; ++i) {
    if (i) out += ", ";
    out += "int";
  }
  return out + ");";
}

}  // namespace

TestProgram InjectOpaqueCall(const TestProgram& program, uint64_t seed,
                             const InjectionSettings& settings) {
  if (program.injected_call) {
    throw Error(ErrorCode::kConfig, "program already carries an injected call");
  }
  c::TranslationUnit tu = c::Parse(program.source_text);
  std::vector<Site> sites;
  for (const auto& f : tu.functions) {
    SiteCollector collector(f.name);
    collector.Block(f.body);
    for (auto& s : collector.sites) sites.push_back(std::move(s));
  }
  if (sites.empty()) {
    throw Error(ErrorCode::kNoEligibleSite,
                "no statement boundary with an initialized scalar local");
  }

  std::vector<std::string> lines = SplitLines(program.source_text);
  std::mt19937_64 rng(seed);
  fs::path out_path = program.source_path.parent_path() /
                      (program.source_path.stem().string() + "_inj.c");
  std::string last_log;
  for (int attempt = 0; attempt < 5 && !sites.empty(); ++attempt) {
    std::uniform_int_distribution<size_t> pick(0, sites.size() - 1);
    size_t index = pick(rng);
    const Site site = sites[index];
    sites.erase(sites.begin() + static_cast<long>(index));

    std::vector<ScopedVar> chosen = site.eligible;
    if (static_cast<int>(chosen.size()) > settings.arity) {
      chosen.erase(chosen.begin(), chosen.end() - settings.arity);
    }
    OpaqueCallSite call;
    call.line = site.line;
    call.callee = settings.callee;
    call.function = site.function;
    std::string args;
    for (const auto& v : chosen) {
      call.argument_vars.push_back(v.decl->name);
      if (!args.empty()) args += ", ";
      args += ArgumentText(*v.decl);
    }
    for (int i = static_cast<int>(chosen.size()); i < settings.arity; ++i) {
      args += ", 0";
    }

    const std::string& target = lines[static_cast<size_t>(site.line - 1)];
    std::string indent = target.substr(0, target.find_first_not_of(" \t"));
    std::string proto = Prototype(settings.callee, settings.arity);
    std::vector<std::string> out_lines = lines;
    std::string call_text = settings.callee + "(" + args + ");";
    // The prototype shares an existing top-level line so that no original
    // line before the insertion point moves.
    int proto_line = tu.toplevel_lines.empty() ? 0 : tu.toplevel_lines.front();
    if (proto_line > 0 && proto_line < site.line) {
      auto& l = out_lines[static_cast<size_t>(proto_line - 1)];
      size_t col = l.find_first_not_of(" \t");
      l.insert(col == std::string::npos ? 0 : col, proto + " ");
      out_lines.insert(out_lines.begin() + (site.line - 1), indent + call_text);
    } else {
      out_lines.insert(out_lines.begin() + (site.line - 1),
                       indent + "{ extern " + proto + " " + call_text + " }");
    }
    std::string text = JoinLines(out_lines);
    WriteFileAtomic(out_path, text);
    if (settings.check_toolchain) {
      ProcessResult r = CompileOnly(out_path, *settings.check_toolchain,
                                    OptLevel::kO0, {"-w"});
      if (r.exit_status != 0) {
        last_log = r.err;
        continue;
      }
    }
    TestProgram injected = MakeProgram(std::move(text), out_path);
    injected.injected_call = call;
    injected.recipe = program.recipe;
    injected.parent_id = program.id;
    injected.line_map = LineMapping{site.line, 1};
    return injected;
  }
  throw Error(ErrorCode::kPostInjectionCompileFailure,
              "injected program does not compile after 5 attempts\n" +
                  last_log);
}

std::string EmitStubModule(int arity, const std::string& callee) {
  std::string params, fmt, args;
  for (int i = 0; i < arity; ++i) {
    if (i) {
      params += ", ";
      fmt += " ";
      args += ", ";
    }
    params += "int a" + std::to_string(i);
    fmt += "%d";
    args += "a" + std::to_string(i);
  }
  std::string out;
  out += "/* Opaque sink: compiled separately so callers cannot see it. */\n";
  out += "#include <stdio.h>\n\n";
  out += "void " + callee + "(" + params + ") {\n";
  out += "  printf(\"" + fmt + "\\n\", " + args + ");\n";
  out += "}\n";
  return out;
}

// ---- JSON ----

void to_json(Json& j, const GenerationRecipe& r) {
  Json retries = Json::array();
  for (const auto& [seed, why] : r.retries) {
    retries.push_back({{"seed", seed}, {"reason", why}});
  }
  j = Json{{"seed", r.seed},
           {"option_set_id", r.option_set_id},
           {"generator_options", r.generator_options},
           {"max_source_lines", r.max_source_lines},
           {"effective_seed", r.effective_seed},
           {"retries", retries}};
}

void from_json(const Json& j, GenerationRecipe& r) {
  r.seed = j.at("seed").get<uint64_t>();
  r.option_set_id = j.at("option_set_id").get<int>();
  r.generator_options = j.at("generator_options").get<std::vector<std::string>>();
  r.max_source_lines = j.value("max_source_lines", 600);
  r.effective_seed = j.value("effective_seed", r.seed);
  r.retries.clear();
  for (const auto& e : j.value("retries", Json::array())) {
    r.retries.emplace_back(e.at("seed").get<uint64_t>(),
                           e.at("reason").get<std::string>());
  }
}

void to_json(Json& j, const OpaqueCallSite& s) {
  j = Json{{"line", s.line},
           {"callee", s.callee},
           {"argument_vars", s.argument_vars},
           {"function", s.function}};
}

void from_json(const Json& j, OpaqueCallSite& s) {
  s.line = j.at("line").get<int>();
  s.callee = j.at("callee").get<std::string>();
  s.argument_vars = j.at("argument_vars").get<std::vector<std::string>>();
  s.function = j.value("function", "");
}

void to_json(Json& j, const LineMapping& m) {
  j = Json{{"insertion_line", m.insertion_line},
           {"inserted_lines", m.inserted_lines}};
}

void from_json(const Json& j, LineMapping& m) {
  m.insertion_line = j.at("insertion_line").get<int>();
  m.inserted_lines = j.at("inserted_lines").get<int>();
}

void to_json(Json& j, const ScreenVerdict& v) {
  Json findings = Json::array();
  for (const auto& f : v.findings) {
    findings.push_back(
        {{"tool", f.tool}, {"text", f.text}, {"blocking", f.blocking}});
  }
  j = Json{{"clean", v.clean},
           {"analyzer_skipped", v.analyzer_skipped},
           {"findings", findings}};
}

void from_json(const Json& j, ScreenVerdict& v) {
  v.clean = j.at("clean").get<bool>();
  v.analyzer_skipped = j.value("analyzer_skipped", false);
  v.findings.clear();
  for (const auto& f : j.at("findings")) {
    v.findings.push_back({f.at("tool").get<std::string>(),
                          f.at("text").get<std::string>(),
                          f.value("blocking", true)});
  }
}

Json ProgramSidecar(const TestProgram& program,
                    const std::optional<ScreenVerdict>& verdict) {
  Json j;
  j["id"] = program.id;
  j["recipe"] = program.recipe ? Json(*program.recipe) : Json(nullptr);
  j["injected_call"] =
      program.injected_call ? Json(*program.injected_call) : Json(nullptr);
  j["screen_verdict"] = verdict ? Json(*verdict) : Json(nullptr);
  if (program.line_map) j["line_map"] = *program.line_map;
  if (!program.parent_id.empty()) j["parent_id"] = program.parent_id;
  j["source_file"] = program.FileName();
  return j;
}

}  // namespace debugholes
