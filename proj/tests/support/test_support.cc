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

#include "test_support.h"

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "debugholes/reducer.h"

namespace debugholes::testing {

fs::path FixturePath(std::string_view relative) {
  return fs::path(DEBUGHOLES_TEST_FIXTURES) / relative;
}

fs::path BuiltTool(std::string_view name) {
  return fs::path(DEBUGHOLES_BUILD_DIR) / name;
}

std::optional<fs::path> FindOnPath(std::string_view name) {
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    fs::path p = fs::path(dir) / name;
    if (!dir.empty() && ::access(p.c_str(), X_OK) == 0) return p;
  }
  return std::nullopt;
}

bool HaveGccAndGdb() { return FindOnPath("gcc") && FindOnPath("gdb"); }

ToolchainSpec HostGcc() {
  static const ToolchainSpec spec =
      ProbeToolchain(CompilerFamily::kGcc, *FindOnPath("gcc"), *FindOnPath("gdb"));
  return spec;
}

// ---- conjecture fixtures ----

CheckerFixture LoadCheckerFixture(const fs::path& path) {
  Json j = ReadJson(path);
  CheckerFixture f;
  f.name = path.stem().string();
  f.about = j.value("about", "");
  std::string text = JoinLines(j.at("source").get<std::vector<std::string>>());
  f.program = MakeProgram(text, fs::path("/fixtures") / (f.name + ".c"));
  if (j.contains("callee") && !j["callee"].is_null()) {
    f.callee = j["callee"].get<std::string>();
  }
  f.trace.program_id = f.program.id;
  f.trace.toolchain_id = "fixture";
  f.trace.config.opt_level = RequireOptLevel(j.value("level", "O1"));
  for (const auto& r : j.at("records")) {
    LineRecord rec;
    rec.file = f.program.FileName();
    rec.line = r.at(0).get<int>();
    rec.frame_function = r.at(1).get<std::string>();
    rec.stop_pc = 0x1000 + static_cast<uint64_t>(rec.line) * 0x10;
    for (const auto& [name, rendered] : r.at(2).items()) {
      rec.observations[name] = NormalizeValue(rendered.get<std::string>());
    }
    f.trace.records.push_back(std::move(rec));
  }
  for (const auto& e : j.at("expected")) {
    f.expected.insert({e.at(0).get<std::string>(), e.at(1).get<int>(),
                       e.at(2).get<std::string>()});
  }
  return f;
}

std::vector<fs::path> CheckerFixturePaths() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(FixturePath("conjectures"))) {
    if (e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<ViolationTriple> Triples(const std::vector<Violation>& vs) {
  std::set<ViolationTriple> out;
  for (const auto& v : vs) {
    out.insert({std::string(ConjectureName(v.conjecture)), v.line, v.variable});
  }
  return out;
}

std::set<ViolationTriple> RunCheckers(const CheckerFixture& fixture) {
  SourceFacts facts = AnalyzeSource(fixture.program);
  std::vector<Violation> all;
  if (fixture.callee) {
    auto site = FindOpaqueCall(c::Parse(fixture.program.source_text), *fixture.callee);
    if (site) {
      auto v = CheckC1(fixture.trace, *site);
      all.insert(all.end(), v.begin(), v.end());
    }
  }
  auto c2 = CheckC2(fixture.trace, facts);
  auto c3 = CheckC3(fixture.trace, facts);
  all.insert(all.end(), c2.begin(), c2.end());
  all.insert(all.end(), c3.begin(), c3.end());
  return Triples(all);
}

// ---- C3 oracle ----

SyntheticC3Case RandomC3Case(std::mt19937_64& rng, int max_lines, int max_vars) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  SyntheticC3Case c;
  int lines = pick(2, max_lines);
  int vars = pick(1, max_vars);
  const char* functions[] = {"main", "helper"};
  for (int v = 0; v < vars; ++v) {
    VarInstances vi;
    vi.function = functions[pick(0, 3) == 0 ? 1 : 0];
    vi.variable = "v" + std::to_string(v);
    int scope_end = pick(1, lines);
    int defs = pick(1, 4);
    std::set<int> at;
    for (int d = 0; d < defs; ++d) at.insert(pick(1, scope_end));
    for (int line : at) vi.instances.push_back({line, scope_end});
    c.facts.var_instances.push_back(std::move(vi));
  }
  int records = pick(0, 60);
  for (int r = 0; r < records; ++r) {
    LineRecord rec;
    rec.file = "synthetic.c";
    rec.line = pick(1, lines);
    rec.frame_function = functions[pick(0, 4) == 0 ? 1 : 0];
    for (int v = 0; v < vars; ++v) {
      switch (pick(0, 2)) {
        case 0: break;  // not listed
        case 1: rec.observations["v" + std::to_string(v)] = NormalizeValue("<optimized out>"); break;
        default: rec.observations["v" + std::to_string(v)] = NormalizeValue(std::to_string(v)); break;
      }
    }
    c.trace.records.push_back(std::move(rec));
  }
  return c;
}

std::set<ViolationTriple> BruteForceC3(const DebugTrace& trace,
                                       const SourceFacts& facts) {
  std::set<ViolationTriple> out;
  const auto& recs = trace.records;
  for (const auto& vi : facts.var_instances) {
    for (size_t k = 0; k < vi.instances.size(); ++k) {
      int lo = vi.instances[k].assign_line;
      int hi = vi.instances[k].scope_end_line;
      if (k + 1 < vi.instances.size()) hi = std::min(hi, vi.instances[k + 1].assign_line - 1);
      // Pass number of each in-window record; -1 outside. A pass ends at
      // any record of the same function outside the window.
      std::vector<int> pass(recs.size(), -1);
      int current = 0;
      for (size_t i = 0; i < recs.size(); ++i) {
        if (recs[i].frame_function != vi.function) continue;
        if (recs[i].line > lo && recs[i].line <= hi) {
          pass[i] = current;
        } else {
          ++current;
        }
      }
      auto rank = [&](size_t i) { return Rank(recs[i].Observe(vi.variable).tag); };
      bool found = false;
      for (size_t j = 0; j < recs.size() && !found; ++j) {
        if (pass[j] < 0) continue;
        for (size_t i = 0; i < j; ++i) {
          if (pass[i] == pass[j] && recs[i].line < recs[j].line && rank(i) < rank(j)) {
            out.insert({"C3", recs[j].line, vi.variable});
            found = true;
            break;
          }
        }
      }
    }
  }
  return out;
}

// ---- planted culprits ----

std::string PlantedSource(const std::string& marker) {
  return "/* " + marker + " */\n"
         "volatile int a;\n"
         "int b[10][2];\n"
         "int main() {\n"
         "  int i = 0, j, k;\n"
         "  for (; i < 10; i++) {\n"
         "    j = k = 0;\n"
         "    for (; k < 1; k++)\n"
         "      a = b[i][(j)*k];\n"
         "  }\n"
         "}\n";
}

TestProgram WriteProgram(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  WriteFileAtomic(path, text);
  return MakeProgram(text, fs::absolute(path));
}

ToolchainSpec FakeGcc(const fs::path& catalog) {
  ToolchainSpec t = ProbeToolchain(CompilerFamily::kGcc, FixturePath("bin/fake-gcc"),
                                   *FindOnPath("gdb"));
  t.flag_catalog_path = catalog;
  return t;
}

ToolchainSpec FakeClang() {
  return ProbeToolchain(CompilerFamily::kClang, FixturePath("bin/fake-clang"),
                        *FindOnPath("gdb"));
}

void WriteCatalog(const fs::path& path, const std::vector<std::string>& flags) {
  fs::create_directories(path.parent_path());
  WriteJsonAtomic(path, Json{{"schema", 1}, {"levels", {{"O1", flags}}}});
}

}  // namespace debugholes::testing
