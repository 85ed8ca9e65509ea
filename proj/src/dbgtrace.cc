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

#include "debugholes/dbgtrace.h"

#include <deque>
#include <mutex>
#include <regex>

#include "debugholes/dwarf_reader.h"
#include "debugholes/elf_reader.h"
#include "debugholes/subprocess.h"

namespace debugholes {

std::string_view AvailabilityName(Availability a) {
  switch (a) {
    case Availability::kAvailableWithValue: return "AvailableWithValue";
    case Availability::kVisibleOptimizedOut: return "VisibleOptimizedOut";
    case Availability::kNotVisible: return "NotVisible";
  }
  return "NotVisible";
}

Availability ParseAvailability(std::string_view name) {
  for (Availability a : {Availability::kAvailableWithValue,
                         Availability::kVisibleOptimizedOut,
                         Availability::kNotVisible}) {
    if (AvailabilityName(a) == name) return a;
  }
  throw Error(ErrorCode::kConfig, "unknown availability state " + std::string(name));
}

std::string_view TraceExitName(TraceExit e) {
  switch (e) {
    case TraceExit::kRanToCompletion: return "RanToCompletion";
    case TraceExit::kTimeout: return "Timeout";
    case TraceExit::kCrashed: return "Crashed";
  }
  return "Crashed";
}

AvailabilityState NormalizeValue(const std::string& rendered) {
  std::string v = Trim(rendered);
  if (v == "<optimized out>" || v == "<variable not available>" ||
      StartsWith(v, "<no location, value may have been optimized out>")) {
    return {Availability::kVisibleOptimizedOut, std::nullopt};
  }
  return {Availability::kAvailableWithValue, MaskAddresses(v)};
}

AvailabilityState LineRecord::Observe(const std::string& variable) const {
  auto it = observations.find(variable);
  if (it == observations.end()) return {};
  return it->second;
}

const LineRecord* DebugTrace::Find(int line) const {
  for (const auto& r : records) {
    if (r.line == line) return &r;
  }
  return nullptr;
}

SteppableLineSet ExtractSteppableLines(const fs::path& executable,
                                       const std::set<std::string>& files) {
  dwarf::DwarfData data = dwarf::DwarfData::Load(executable);
  SteppableLineSet out;
  bool any_rows = false;
  for (const auto& unit : data.units()) {
    for (const auto& row : data.LineTable(unit)) {
      any_rows = true;
      if (row.end_sequence || !row.is_stmt || row.line <= 0 ||
          row.address == 0) {
        continue;
      }
      std::string base = fs::path(row.path).filename().string();
      if (files.count(base)) out.lines.insert({base, row.line});
    }
  }
  if (!any_rows) {
    throw Error(ErrorCode::kMalformedDwarf,
                "no line table in " + executable.string());
  }
  return out;
}

std::map<std::string, AvailabilityState> ParseInfoLocals(
    const std::vector<std::string>& lines) {
  static const std::regex kVar(R"(^([A-Za-z_][A-Za-z_0-9]*) = (.*)$)");
  std::map<std::string, AvailabilityState> out;
  std::vector<std::pair<std::string, std::string>> raw;
  for (const auto& line : lines) {
    std::smatch m;
    if (std::regex_match(line, m, kVar)) {
      raw.emplace_back(m[1].str(), m[2].str());
    } else if (!raw.empty() && !line.empty() && line != "No locals." &&
               line != "No arguments." &&
               !StartsWith(line, "No symbol table")) {
      raw.back().second += " " + Trim(line);
    }
  }
  // Innermost declarations come first; shadowed outer ones are ignored.
  for (const auto& [name, value] : raw) {
    out.emplace(name, NormalizeValue(value));
  }
  return out;
}

std::string DebuggerId(const fs::path& debugger) {
  static std::mutex mu;
  static std::map<std::string, std::string> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(debugger.string());
  if (it != cache.end()) return it->second;
  RunOptions opts;
  opts.timeout = std::chrono::seconds(20);
  ProcessResult r = RunProcess({debugger.string(), "--version"}, opts);
  if (r.exit_status != 0) {
    throw Error(ErrorCode::kToolUnavailable,
                "cannot run " + debugger.string() + " --version");
  }
  std::string first = SplitLines(r.out).empty() ? "" : SplitLines(r.out)[0];
  static const std::regex kVersion(R"((\d+\.\d+(?:\.\d+)?))");
  std::string version = "unknown";
  for (std::sregex_iterator m(first.begin(), first.end(), kVersion), end;
       m != end; ++m) {
    version = m->str();
  }
  std::string name =
      debugger.filename().string().find("lldb") != std::string::npos ? "lldb"
                                                                      : "gdb";
  std::string id = name + "-" + version;
  cache[debugger.string()] = id;
  return id;
}

namespace {

bool IsLldb(const fs::path& debugger) {
  return debugger.filename().string().find("lldb") != std::string::npos;
}

// ---- gdb machine interface ----

class MiParser {
 public:
  explicit MiParser(std::string_view s) : s_(s) {}

  // Parses `name=value,...` up to the end of input.
  Json Results() {
    Json obj = Json::object();
    while (pos_ < s_.size()) {
      auto [name, value] = Result();
      obj[name] = std::move(value);
      if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
    }
    return obj;
  }

  std::string CString() {
    std::string out;
    if (pos_ >= s_.size() || s_[pos_] != '"') return out;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char ch = s_[pos_++];
      if (ch == '\\' && pos_ < s_.size()) {
        char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': break;
          case '0': case '1': case '2': case '3': {
            int v = e - '0';
            for (int i = 0; i < 2 && pos_ < s_.size() && s_[pos_] >= '0' &&
                            s_[pos_] <= '7';
                 ++i) {
              v = v * 8 + (s_[pos_++] - '0');
            }
            out += static_cast<char>(v);
            break;
          }
          default: out += e;
        }
      } else {
        out += ch;
      }
    }
    ++pos_;
    return out;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;

  std::pair<std::string, Json> Result() {
    size_t eq = s_.find('=', pos_);
    if (eq == std::string_view::npos) {
      pos_ = s_.size();
      return {"", nullptr};
    }
    std::string name(s_.substr(pos_, eq - pos_));
    pos_ = eq + 1;
    return {name, Value()};
  }

  Json Value() {
    if (pos_ >= s_.size()) return nullptr;
    char ch = s_[pos_];
    if (ch == '"') return CString();
    if (ch == '{') {
      ++pos_;
      Json obj = Json::object();
      while (pos_ < s_.size() && s_[pos_] != '}') {
        auto [name, value] = Result();
        obj[name] = std::move(value);
        if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      }
      ++pos_;
      return obj;
    }
    if (ch == '[') {
      ++pos_;
      Json arr = Json::array();
      while (pos_ < s_.size() && s_[pos_] != ']') {
        char c = s_[pos_];
        if (c == '"' || c == '{' || c == '[') {
          arr.push_back(Value());
        } else {
          auto [name, value] = Result();
          arr.push_back(Json{{name, std::move(value)}});
        }
        if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      }
      ++pos_;
      return arr;
    }
    pos_ = s_.size();
    return nullptr;
  }
};

struct MiReply {
  std::string klass;  // "done", "error", "running", ...
  Json results;
  std::vector<std::string> console;  // decoded ~"..." stream text
};

class TimedOut : public std::exception {};

class GdbSession {
 public:
  GdbSession(const fs::path& gdb, const fs::path& exe,
             std::chrono::steady_clock::time_point deadline)
      : proc_({gdb.string(), "--interpreter=mi2", "-nx", "-q", exe.string()},
              exe.parent_path()),
        deadline_(deadline) {
    WaitPrompt();
  }

  ~GdbSession() {
    proc_.Kill();
    proc_.Wait();
  }

  MiReply Command(const std::string& cmd) {
    proc_.WriteLine(cmd);
    MiReply reply;
    std::string console;
    while (true) {
      std::string line = Next();
      if (line.empty()) continue;
      if (line[0] == '^') {
        size_t comma = line.find(',');
        reply.klass = line.substr(1, comma == std::string::npos ? std::string::npos
                                                                : comma - 1);
        if (comma != std::string::npos) {
          reply.results = MiParser(std::string_view(line).substr(comma + 1)).Results();
        }
        break;
      }
      HandleOutOfBand(line, &console);
    }
    WaitPrompt(&console);
    reply.console = SplitLines(console);
    return reply;
  }

  // Next *stopped record.
  Json WaitStopped() {
    while (stopped_.empty()) {
      std::string line = Next();
      if (line == "(gdb)") continue;
      HandleOutOfBand(line, nullptr);
    }
    Json j = std::move(stopped_.front());
    stopped_.pop_front();
    return j;
  }

 private:
  InteractiveProcess proc_;
  std::chrono::steady_clock::time_point deadline_;
  std::deque<Json> stopped_;

  std::string Next() {
    auto line = proc_.ReadLine(deadline_);
    if (!line) {
      if (proc_.eof()) {
        throw Error(ErrorCode::kDebuggerCrashed, "gdb exited unexpectedly");
      }
      throw TimedOut();
    }
    if (!line->empty() && line->back() == '\r') line->pop_back();
    return *line;
  }

  void WaitPrompt(std::string* console = nullptr) {
    while (true) {
      std::string line = Next();
      if (line == "(gdb)" || line == "(gdb) ") return;
      HandleOutOfBand(line, console);
    }
  }

  void HandleOutOfBand(const std::string& line, std::string* console) {
    if (StartsWith(line, "*stopped")) {
      size_t comma = line.find(',');
      stopped_.push_back(comma == std::string::npos
                             ? Json::object()
                             : MiParser(std::string_view(line).substr(comma + 1))
                                   .Results());
    } else if (StartsWith(line, "~") && console) {
      *console += MiParser(std::string_view(line).substr(1)).CString();
    }
  }
};

DebugTrace CollectGdb(const BuiltArtifact& artifact, const fs::path& gdb,
                      const SteppableLineSet& lines,
                      const TraceSettings& settings, DebugTrace trace) {
  auto deadline = std::chrono::steady_clock::now() + settings.timeout;
  std::optional<uint64_t> main_link;
  try {
    main_link = ElfFile::Load(artifact.executable_path).SymbolAddress("main");
  } catch (const Error&) {
  }
  std::set<std::pair<std::string, int>> wanted;
  for (const auto& l : lines.lines) {
    if (!settings.only_lines || settings.only_lines->count(l.second)) {
      wanted.insert(l);
    }
  }
  try {
    GdbSession gdb_session(gdb, artifact.executable_path, deadline);
    for (const char* setup :
         {"-gdb-set confirm off", "-gdb-set pagination off",
          "-gdb-set width 0", "-gdb-set height 0",
          "-gdb-set print pretty off", "-gdb-set print elements 64",
          "-gdb-set startup-with-shell off",
          "-gdb-set disable-randomization on",
          "-inferior-tty-set /dev/null"}) {
      gdb_session.Command(setup);
    }
    int inserted = 0;
    for (const auto& [file, line] : wanted) {
      MiReply r = gdb_session.Command("-break-insert -t " + file + ":" +
                                      std::to_string(line));
      if (r.klass == "done") ++inserted;
    }
    if (inserted == 0 && !wanted.empty()) {
      throw Error(ErrorCode::kBreakpointSetupFailed,
                  "no breakpoint could be inserted in " +
                      artifact.executable_path.string());
    }
    MiReply run = gdb_session.Command("-exec-run");
    if (run.klass == "error") {
      throw Error(ErrorCode::kDebuggerCrashed,
                  "gdb could not start the program: " +
                      run.results.value("msg", std::string()));
    }
    std::set<std::pair<std::string, int>> seen;
    bool bias_known = false;
    while (true) {
      Json stop = gdb_session.WaitStopped();
      std::string reason = stop.value("reason", "");
      if (reason == "exited-normally" || reason == "exited") {
        trace.exit_status = TraceExit::kRanToCompletion;
        break;
      }
      if (reason == "signal-received" || reason == "exited-signalled") {
        trace.exit_status = TraceExit::kCrashed;
        break;
      }
      if (reason == "breakpoint-hit" && stop.contains("frame")) {
        const Json& frame = stop["frame"];
        std::string file =
            fs::path(frame.value("file", std::string())).filename().string();
        int line = std::stoi(frame.value("line", std::string("0")));
        std::pair<std::string, int> key{file, line};
        if (wanted.count(key) && seen.insert(key).second) {
          LineRecord rec;
          rec.file = file;
          rec.line = line;
          rec.stop_pc = std::stoull(frame.value("addr", std::string("0")), nullptr, 16);
          rec.frame_function = frame.value("func", "");
          MiReply locals =
              gdb_session.Command("-interpreter-exec console \"info locals\"");
          MiReply args =
              gdb_session.Command("-interpreter-exec console \"info args\"");
          // Locals first: an inner block may shadow a parameter.
          std::vector<std::string> vars = locals.console;
          vars.insert(vars.end(), args.console.begin(), args.console.end());
          rec.observations = ParseInfoLocals(vars);
          trace.records.push_back(std::move(rec));
          if (!bias_known && main_link) {
            MiReply v =
                gdb_session.Command("-data-evaluate-expression \"(long)&main\"");
            if (v.klass == "done") {
              trace.load_bias = std::stoll(v.results.value("value", std::string("0"))) -
                                static_cast<int64_t>(*main_link);
            }
            bias_known = true;
          }
        }
      }
      gdb_session.Command("-exec-continue");
    }
  } catch (const TimedOut&) {
    trace.exit_status = TraceExit::kTimeout;
  }
  return trace;
}

// ---- lldb batch mode ----

DebugTrace CollectLldb(const BuiltArtifact& artifact, const fs::path& lldb,
                       const SteppableLineSet& lines,
                       const TraceSettings& settings, DebugTrace trace) {
  ScopedTempDir dir("dhlldb");
  std::string script = "settings set auto-confirm true\n";
  for (const auto& [file, line] : lines.lines) {
    if (settings.only_lines && !settings.only_lines->count(line)) continue;
    script += "breakpoint set --one-shot true --file " + file + " --line " +
              std::to_string(line) + "\n";
  }
  script +=
      "target stop-hook add --auto-continue true --one-liner \"frame info\" "
      "--one-liner \"frame variable\" --one-liner \"expression -- (long)&main\"\n";
  script += "run\n";
  WriteFileAtomic(dir.path() / "cmds.lldb", script);
  RunOptions opts;
  opts.timeout = settings.timeout;
  opts.cwd = artifact.executable_path.parent_path();
  ProcessResult r = RunProcess(
      {lldb.string(), "--batch", "--no-lldbinit", "-s",
       (dir.path() / "cmds.lldb").string(), "-k", "process kill",
       artifact.executable_path.string()},
      opts);
  trace.records = ParseLldbSession(r.out);
  static const std::regex kBias(R"(^\(long\) \$\d+ = (-?\d+)\s*$)");
  std::optional<uint64_t> main_link;
  try {
    main_link = ElfFile::Load(artifact.executable_path).SymbolAddress("main");
  } catch (const Error&) {
  }
  for (const auto& line : SplitLines(r.out)) {
    std::smatch m;
    if (main_link && std::regex_match(line, m, kBias)) {
      trace.load_bias = std::stoll(m[1].str()) - static_cast<int64_t>(*main_link);
      break;
    }
  }
  if (r.timed_out) {
    trace.exit_status = TraceExit::kTimeout;
  } else if (r.out.find("stop reason = signal") != std::string::npos) {
    trace.exit_status = TraceExit::kCrashed;
  } else if (r.out.find(" exited with status") == std::string::npos) {
    throw Error(ErrorCode::kDebuggerCrashed,
                "lldb session ended without the process exiting\n" + r.err);
  }
  return trace;
}

}  // namespace

std::vector<LineRecord> ParseLldbSession(const std::string& output) {
  static const std::regex kFrame(
      R"(frame #0: (0x[0-9a-fA-F]+) [^`]*`([A-Za-z_][A-Za-z_0-9]*)[^ ]* at ([^:\s]+):(\d+)(?::\d+)?)");
  static const std::regex kVar(R"(^\((.+?)\) ([A-Za-z_][A-Za-z_0-9]*) = (.*)$)");
  std::vector<LineRecord> records;
  std::set<std::pair<std::string, int>> seen;
  LineRecord* current = nullptr;
  std::set<std::string> current_names;
  for (const auto& raw : SplitLines(output)) {
    std::string line = Trim(raw);
    std::smatch m;
    if (std::regex_search(line, m, kFrame)) {
      std::string file = fs::path(m[3].str()).filename().string();
      int l = std::stoi(m[4].str());
      if (seen.insert({file, l}).second) {
        LineRecord rec;
        rec.file = file;
        rec.line = l;
        rec.stop_pc = std::stoull(m[1].str(), nullptr, 16);
        rec.frame_function = m[2].str();
        records.push_back(std::move(rec));
        current = &records.back();
        current_names.clear();
      } else if (!current || current->file != file || current->line != l) {
        current = nullptr;
      }
      continue;
    }
    if (current && std::regex_match(line, m, kVar)) {
      std::string name = m[2].str();
      if (current_names.insert(name).second) {
        current->observations[name] = NormalizeValue(m[3].str());
      }
    }
  }
  return records;
}

DebugTrace CollectTrace(const BuiltArtifact& artifact, const fs::path& debugger,
                        const SteppableLineSet& lines,
                        const TraceSettings& settings) {
  if (!fs::exists(debugger)) {
    throw Error(ErrorCode::kToolUnavailable,
                "debugger not found: " + debugger.string());
  }
  DebugTrace trace;
  trace.program_id = artifact.program_id;
  trace.toolchain_id = artifact.toolchain_id;
  trace.config = artifact.config;
  trace.debugger_id = DebuggerId(debugger);
  if (IsLldb(debugger)) {
    return CollectLldb(artifact, debugger, lines, settings, std::move(trace));
  }
  return CollectGdb(artifact, debugger, lines, settings, std::move(trace));
}

ValidationOutcome CrossValidate(const BuiltArtifact& artifact,
                                const std::string& file, int line,
                                const std::string& variable,
                                const std::vector<fs::path>& alternates,
                                const TraceSettings& settings) {
  ValidationOutcome out;
  SteppableLineSet only;
  only.lines.insert({file, line});
  TraceSettings s = settings;
  s.only_lines = std::set<int>{line};
  for (const auto& dbg : alternates) {
    if (!fs::exists(dbg)) {
      out.skipped.push_back(dbg.string() + ": not installed");
      continue;
    }
    try {
      DebugTrace t = CollectTrace(artifact, dbg, only, s);
      const LineRecord* rec = t.Find(line);
      if (!rec) {
        out.skipped.push_back(t.debugger_id + ": line not reached");
        continue;
      }
      if (rec->Observe(variable).tag == Availability::kAvailableWithValue) {
        out.refuted_in.push_back(t.debugger_id);
      } else {
        out.confirmed_in.push_back(t.debugger_id);
      }
    } catch (const Error& e) {
      out.skipped.push_back(dbg.string() + ": " + e.what());
    }
  }
  return out;
}

// ---- JSON ----

void to_json(Json& j, const AvailabilityState& s) {
  j = Json{{"state", std::string(AvailabilityName(s.tag))}};
  if (s.value_text) j["value"] = *s.value_text;
}

void from_json(const Json& j, AvailabilityState& s) {
  s.tag = ParseAvailability(j.at("state").get<std::string>());
  s.value_text.reset();
  if (j.contains("value")) s.value_text = j["value"].get<std::string>();
}

void to_json(Json& j, const LineRecord& r) {
  Json vars = Json::object();
  for (const auto& [name, state] : r.observations) vars[name] = state;
  j = Json{{"file", r.file},
           {"line", r.line},
           {"pc", r.stop_pc},
           {"frame", r.frame_function},
           {"vars", vars}};
}

void from_json(const Json& j, LineRecord& r) {
  r.file = j.at("file").get<std::string>();
  r.line = j.at("line").get<int>();
  r.stop_pc = j.value("pc", uint64_t{0});
  r.frame_function = j.value("frame", "");
  r.observations.clear();
  for (const auto& [name, state] : j.at("vars").items()) {
    r.observations[name] = state.get<AvailabilityState>();
  }
}

void to_json(Json& j, const DebugTrace& t) {
  j = Json{{"schema", 1},
           {"program_id", t.program_id},
           {"toolchain_id", t.toolchain_id},
           {"config", t.config},
           {"debugger_id", t.debugger_id},
           {"exit_status", std::string(TraceExitName(t.exit_status))},
           {"load_bias", t.load_bias},
           {"records", t.records}};
}

void from_json(const Json& j, DebugTrace& t) {
  if (j.value("schema", 0) != 1) {
    throw Error(ErrorCode::kConfig, "unsupported trace schema");
  }
  t.program_id = j.value("program_id", "");
  t.toolchain_id = j.value("toolchain_id", "");
  if (j.contains("config")) t.config = j["config"].get<BuildConfig>();
  t.debugger_id = j.value("debugger_id", "");
  std::string status = j.value("exit_status", "RanToCompletion");
  t.exit_status = status == "Timeout"   ? TraceExit::kTimeout
                  : status == "Crashed" ? TraceExit::kCrashed
                                        : TraceExit::kRanToCompletion;
  t.load_bias = j.value("load_bias", int64_t{0});
  t.records = j.at("records").get<std::vector<LineRecord>>();
}

void to_json(Json& j, const ValidationOutcome& v) {
  j = Json{{"confirmed_in", v.confirmed_in},
           {"refuted_in", v.refuted_in},
           {"skipped", v.skipped}};
}

void from_json(const Json& j, ValidationOutcome& v) {
  v.confirmed_in = j.value("confirmed_in", std::vector<std::string>{});
  v.refuted_in = j.value("refuted_in", std::vector<std::string>{});
  v.skipped = j.value("skipped", std::vector<std::string>{});
}

}  // namespace debugholes
