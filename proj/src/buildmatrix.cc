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

#include "debugholes/buildmatrix.h"

#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "debugholes/corpus.h"

namespace debugholes {

std::string ToolchainSpec::Id() const {
  std::string v = version_string.empty() ? "unknown" : version_string;
  return std::string(FamilyName(family)) + "-" + v;
}

namespace {

std::string LevelFlag(OptLevel level) {
  return "-" + std::string(OptLevelName(level));
}

std::string ProbeVersion(CompilerFamily family, const fs::path& compiler) {
  std::vector<std::vector<std::string>> attempts;
  if (family == CompilerFamily::kGcc) {
    attempts.push_back({compiler.string(), "-dumpfullversion"});
  }
  attempts.push_back({compiler.string(), "-dumpversion"});
  RunOptions opts;
  opts.timeout = std::chrono::seconds(20);
  for (const auto& argv : attempts) {
    ProcessResult r = RunProcess(argv, opts);
    std::string v = Trim(r.out);
    if (r.exit_status == 0 && !v.empty() && v.find('\n') == std::string::npos) {
      return v;
    }
  }
  throw Error(ErrorCode::kToolUnavailable,
              "cannot probe version of " + compiler.string());
}

constexpr char kAliasProbe[] =
    "int g[16];\n"
    "int f(int n) {\n"
    "  int s = 0;\n"
    "  for (int i = 0; i < n; i++) s += g[i & 15] * i;\n"
    "  return s;\n"
    "}\n"
    "int main(void) { return f(7) & 1; }\n";

}  // namespace

ToolchainSpec ProbeToolchain(CompilerFamily family, fs::path compiler_path,
                             fs::path debugger_path) {
  ToolchainSpec t;
  t.family = family;
  t.compiler_path = std::move(compiler_path);
  t.debugger_path = std::move(debugger_path);
  t.version_string = ProbeVersion(family, t.compiler_path);
  if (family == CompilerFamily::kClang) {
    ScopedTempDir dir("dhprobe");
    fs::path src = dir.path() / "probe.c";
    WriteFileAtomic(src, kAliasProbe);
    TestProgram p = MakeProgram(kAliasProbe, src);
    try {
      BuildConfig og;
      og.opt_level = OptLevel::kOg;
      BuildConfig o1;
      o1.opt_level = OptLevel::kO1;
      t.og_aliases_o1 =
          ExtractAssembly(p, t, og) == ExtractAssembly(p, t, o1);
    } catch (const Error&) {
      t.og_aliases_o1 = false;
    }
  }
  return t;
}

void BuildConfig::Validate() const {
  if (std::find(debug_flags.begin(), debug_flags.end(), "-g") ==
      debug_flags.end()) {
    throw Error(ErrorCode::kConfig, "debug_flags must include -g");
  }
  if (opt_level != OptLevel::kO0) return;
  for (const auto& f : extra_flags) {
    if (StartsWith(f, "-fno-") || StartsWith(f, "-mllvm")) {
      throw Error(ErrorCode::kConfig,
                  "O0 config carries optimization-disabling flag " + f);
    }
  }
}

std::string BuildConfig::Hash() const {
  Json j = *this;
  return Sha256Hex(j.dump()).substr(0, 16);
}

std::string BuildConfig::Describe() const {
  std::string out = LevelFlag(opt_level);
  for (const auto& f : extra_flags) out += " " + f;
  return out;
}

std::vector<std::string> CompileCommand(const TestProgram& program,
                                        const ToolchainSpec& toolchain,
                                        const BuildConfig& config,
                                        const std::optional<fs::path>& stub,
                                        const fs::path& output) {
  std::vector<std::string> argv = {toolchain.compiler_path.string(),
                                   LevelFlag(config.opt_level)};
  argv.insert(argv.end(), config.debug_flags.begin(), config.debug_flags.end());
  argv.insert(argv.end(), config.extra_flags.begin(), config.extra_flags.end());
  for (const auto& inc : toolchain.include_dirs) {
    argv.push_back("-I" + inc.string());
  }
  argv.push_back("-w");
  argv.push_back(program.source_path.string());
  if (config.link_stub && stub) argv.push_back(stub->string());
  argv.push_back("-o");
  argv.push_back(output.string());
  return argv;
}

namespace {

bool LooksLikeLinkError(const std::string& err) {
  return err.find("undefined reference") != std::string::npos ||
         err.find("ld returned") != std::string::npos ||
         err.find("linker command failed") != std::string::npos ||
         err.find("cannot find -l") != std::string::npos;
}

}  // namespace

BuiltArtifact Compile(const TestProgram& program,
                      const ToolchainSpec& toolchain, const BuildConfig& config,
                      const CompileSettings& settings) {
  config.Validate();
  if (config.link_stub && !settings.stub_object) {
    throw Error(ErrorCode::kConfig, "link_stub set but no stub object given");
  }
  fs::create_directories(settings.out_dir);
  BuiltArtifact a;
  a.program_id = program.id;
  a.toolchain_id = toolchain.Id();
  a.config = config;
  a.executable_path = settings.out_dir / "a.out";

  std::vector<std::string> argv = CompileCommand(
      program, toolchain, config, settings.stub_object, a.executable_path);
  RunOptions opts;
  opts.timeout = settings.timeout;
  ProcessResult r = RunProcess(argv, opts);
  a.exit_status = r.exit_status;
  a.build_log = "$ " + ShellJoin(argv) + "\n" + r.out + r.err;
  if (r.timed_out) a.build_log += "\n[timeout]\n";
  WriteFileAtomic(settings.out_dir / "build.log", a.build_log);
  if (r.timed_out) {
    throw Error(ErrorCode::kCompileTimeout, ShellJoin(argv));
  }
  if (r.exit_status != 0) {
    ErrorCode code = LooksLikeLinkError(r.err) ? ErrorCode::kLinkFailed
                                               : ErrorCode::kCompileFailed;
    throw Error(code, a.build_log);
  }
  if (settings.with_assembly) {
    std::string norm =
        ExtractAssembly(program, toolchain, config, settings.timeout);
    WriteFileAtomic(settings.out_dir / "asm.s", norm);
    a.asm_hash = Sha256Hex(norm);
  }
  WriteJsonAtomic(settings.out_dir / "meta.json", Json(a));
  return a;
}

std::string ExtractAssembly(const TestProgram& program,
                            const ToolchainSpec& toolchain,
                            const BuildConfig& config,
                            std::chrono::seconds timeout) {
  ScopedTempDir dir("dhasm");
  fs::path out = dir.path() / "out.s";
  BuildConfig c = config;
  c.link_stub = false;
  std::vector<std::string> argv =
      CompileCommand(program, toolchain, c, std::nullopt, out);
  argv.insert(argv.end() - 2, "-S");
  RunOptions opts;
  opts.timeout = timeout;
  ProcessResult r = RunProcess(argv, opts);
  if (r.timed_out) throw Error(ErrorCode::kCompileTimeout, ShellJoin(argv));
  if (r.exit_status != 0) {
    throw Error(ErrorCode::kCompileFailed, ShellJoin(argv) + "\n" + r.err);
  }
  return NormalizeAssembly(ReadFile(out));
}

namespace {

// Removes a trailing '#' comment, honoring string literals.
std::string StripComment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (in_string) {
      if (ch == '\\') {
        ++i;
      } else if (ch == '"') {
        in_string = false;
      }
    } else if (ch == '"') {
      in_string = true;
    } else if (ch == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

bool IsDebugSection(const std::string& directive) {
  static const std::regex kSection(R"(^\.(section|pushsection)\s+\.(debug_|zdebug_|note\.GNU-stack|comment))");
  return std::regex_search(directive, kSection);
}

bool IsIgnoredDirective(const std::string& s) {
  static const char* kPrefixes[] = {".loc",   ".file", ".cfi_",  ".ident",
                                    ".uleb128", ".sleb128", ".addrsig"};
  for (const char* p : kPrefixes) {
    if (StartsWith(s, p)) return true;
  }
  return false;
}

}  // namespace

std::string NormalizeAssembly(std::string_view raw) {
  std::vector<std::string> kept;
  bool in_debug_section = false;
  for (const auto& original : SplitLines(raw)) {
    std::string line = Trim(StripComment(original));
    if (line.empty()) continue;
    if (StartsWith(line, ".section") || StartsWith(line, ".pushsection") ||
        line == ".text" || line == ".data" || line == ".bss" ||
        StartsWith(line, ".popsection") || StartsWith(line, ".previous")) {
      in_debug_section = IsDebugSection(line);
      if (StartsWith(line, ".popsection") || StartsWith(line, ".previous")) {
        in_debug_section = false;
      }
      if (in_debug_section) continue;
    }
    if (in_debug_section) continue;
    if (IsIgnoredDirective(line)) continue;
    // Collapse inner whitespace runs so tab/space choice does not matter.
    std::string collapsed;
    bool space = false;
    for (char ch : line) {
      if (ch == ' ' || ch == '\t') {
        space = true;
        continue;
      }
      if (space && !collapsed.empty()) collapsed += ' ';
      space = false;
      collapsed += ch;
    }
    kept.push_back(collapsed);
  }

  // Debug-only labels (.Ltext0, .LVL*, .LBB*, ...) are defined but never
  // referenced from the remaining code; drop them, then renumber the rest.
  static const std::regex kLabelRef(R"(\.L[A-Za-z_0-9$.]+)");
  std::map<std::string, int> uses;
  for (const auto& l : kept) {
    bool is_def = !l.empty() && l.back() == ':';
    std::string body = is_def ? "" : l;
    for (std::sregex_iterator it(body.begin(), body.end(), kLabelRef), end;
         it != end; ++it) {
      ++uses[it->str()];
    }
  }
  std::vector<std::string> filtered;
  for (const auto& l : kept) {
    if (StartsWith(l, ".L") && l.back() == ':') {
      std::string name = l.substr(0, l.size() - 1);
      if (!uses.count(name)) continue;
    }
    filtered.push_back(l);
  }
  std::map<std::string, std::string> renamed;
  std::string out;
  for (const auto& l : filtered) {
    std::string line;
    size_t last = 0;
    for (std::sregex_iterator it(l.begin(), l.end(), kLabelRef), end;
         it != end; ++it) {
      line += l.substr(last, static_cast<size_t>(it->position()) - last);
      auto [pos, inserted] = renamed.emplace(
          it->str(), ".L" + std::to_string(renamed.size()));
      line += pos->second;
      last = static_cast<size_t>(it->position() + it->length());
    }
    line += l.substr(last);
    out += line;
    out += '\n';
  }
  return out;
}

std::vector<std::string> EnumerateOptFlags(const ToolchainSpec& toolchain,
                                           OptLevel level) {
  if (level == OptLevel::kO0) return {};
  std::string level_name(OptLevelName(level));
  if (toolchain.family == CompilerFamily::kGcc) {
    RunOptions opts;
    opts.timeout = std::chrono::seconds(30);
    ProcessResult r = RunProcess({toolchain.compiler_path.string(), "-Q",
                                  "--help=optimizers", LevelFlag(level)},
                                 opts);
    if (r.exit_status == 0) {
      static const std::regex kRow(R"(^\s+-f([A-Za-z0-9_\-]+)\s+\[enabled\]\s*$)");
      std::vector<std::string> flags;
      for (const auto& line : SplitLines(r.out)) {
        std::smatch m;
        if (std::regex_match(line, m, kRow)) {
          flags.push_back("-fno-" + m[1].str());
        }
      }
      if (!flags.empty()) return flags;
    }
  }
  if (toolchain.flag_catalog_path && fs::exists(*toolchain.flag_catalog_path)) {
    Json j = ReadJson(*toolchain.flag_catalog_path);
    const Json& levels = j.at("levels");
    if (!levels.contains(level_name)) return {};
    std::vector<std::string> out;
    for (const auto& f : levels.at(level_name)) {
      std::string s = f.get<std::string>();
      out.push_back(StartsWith(s, "-fno-") ? s : "-fno-" + s.substr(2));
    }
    return out;
  }
  throw Error(ErrorCode::kCatalogUnavailable,
              "no flag dump facility or catalog for " + toolchain.Id());
}

fs::path BuildStubObject(const ToolchainSpec& toolchain, const fs::path& dir,
                         int arity, const std::string& callee) {
  fs::create_directories(dir);
  fs::path src = dir / "stub.c";
  fs::path obj = dir / "stub.o";
  WriteFileAtomic(src, EmitStubModule(arity, callee));
  RunOptions opts;
  opts.timeout = std::chrono::seconds(60);
  std::vector<std::string> argv = {toolchain.compiler_path.string(), "-O0",
                                   "-c", src.string(), "-o", obj.string()};
  ProcessResult r = RunProcess(argv, opts);
  if (r.exit_status != 0) {
    throw Error(ErrorCode::kCompileFailed, ShellJoin(argv) + "\n" + r.err);
  }
  return obj;
}

ProcessResult CompileOnly(const fs::path& source,
                          const ToolchainSpec& toolchain, OptLevel level,
                          const std::vector<std::string>& extra_args,
                          std::chrono::seconds timeout) {
  std::vector<std::string> argv = {toolchain.compiler_path.string(),
                                   LevelFlag(level)};
  argv.insert(argv.end(), extra_args.begin(), extra_args.end());
  for (const auto& inc : toolchain.include_dirs) {
    argv.push_back("-I" + inc.string());
  }
  argv.insert(argv.end(), {"-c", source.string(), "-o", "/dev/null"});
  RunOptions opts;
  opts.timeout = timeout;
  return RunProcess(argv, opts);
}

// ---- JSON ----

void to_json(Json& j, const ToolchainSpec& t) {
  std::vector<std::string> alts;
  for (const auto& p : t.alt_debugger_paths) alts.push_back(p.string());
  std::vector<std::string> incs;
  for (const auto& p : t.include_dirs) incs.push_back(p.string());
  j = Json{{"family", std::string(FamilyName(t.family))},
           {"compiler_path", t.compiler_path.string()},
           {"version_string", t.version_string},
           {"debugger_path", t.debugger_path.string()},
           {"alt_debugger_paths", alts},
           {"include_dirs", incs},
           {"og_aliases_o1", t.og_aliases_o1}};
  j["flag_catalog_path"] = t.flag_catalog_path
                               ? Json(t.flag_catalog_path->string())
                               : Json(nullptr);
}

void from_json(const Json& j, ToolchainSpec& t) {
  t.family = RequireFamily(j.at("family").get<std::string>());
  t.compiler_path = j.at("compiler_path").get<std::string>();
  t.version_string = j.value("version_string", "");
  t.debugger_path = j.value("debugger_path", "");
  t.alt_debugger_paths.clear();
  for (const auto& p : j.value("alt_debugger_paths", Json::array())) {
    t.alt_debugger_paths.emplace_back(p.get<std::string>());
  }
  t.include_dirs.clear();
  for (const auto& p : j.value("include_dirs", Json::array())) {
    t.include_dirs.emplace_back(p.get<std::string>());
  }
  t.og_aliases_o1 = j.value("og_aliases_o1", false);
  if (j.contains("flag_catalog_path") && !j["flag_catalog_path"].is_null()) {
    t.flag_catalog_path = j["flag_catalog_path"].get<std::string>();
  } else {
    t.flag_catalog_path.reset();
  }
}

void to_json(Json& j, const BuildConfig& c) {
  j = Json{{"opt_level", std::string(OptLevelName(c.opt_level))},
           {"extra_flags", c.extra_flags},
           {"debug_flags", c.debug_flags},
           {"link_stub", c.link_stub}};
}

void from_json(const Json& j, BuildConfig& c) {
  c.opt_level = RequireOptLevel(j.at("opt_level").get<std::string>());
  c.extra_flags = j.value("extra_flags", std::vector<std::string>{});
  c.debug_flags = j.value("debug_flags", std::vector<std::string>{"-g"});
  c.link_stub = j.value("link_stub", false);
}

void to_json(Json& j, const BuiltArtifact& a) {
  j = Json{{"executable_path", a.executable_path.string()},
           {"exit_status", a.exit_status},
           {"asm_hash", a.asm_hash},
           {"program_id", a.program_id},
           {"toolchain_id", a.toolchain_id},
           {"config", a.config},
           {"build_log", a.build_log}};
}

void from_json(const Json& j, BuiltArtifact& a) {
  a.executable_path = j.at("executable_path").get<std::string>();
  a.exit_status = j.at("exit_status").get<int>();
  a.asm_hash = j.value("asm_hash", "");
  a.program_id = j.at("program_id").get<std::string>();
  a.toolchain_id = j.at("toolchain_id").get<std::string>();
  a.config = j.at("config").get<BuildConfig>();
  a.build_log = j.value("build_log", "");
}

}  // namespace debugholes
