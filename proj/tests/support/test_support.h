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

// Shared helpers for unit and acceptance tests: fixture loading, the
// independent oracles, and the fake-toolchain harness.

#ifndef DEBUGHOLES_TESTS_SUPPORT_TEST_SUPPORT_H_
#define DEBUGHOLES_TESTS_SUPPORT_TEST_SUPPORT_H_

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "debugholes/conjectures.h"
#include "debugholes/dwarfscope.h"
#include "debugholes/toolchain.h"
#include "debugholes/triage.h"

namespace debugholes::testing {

fs::path FixturePath(std::string_view relative);
// Binaries built next to the tests (minigen, debugholes, dwarf_fixture).
fs::path BuiltTool(std::string_view name);
std::optional<fs::path> FindOnPath(std::string_view name);

// gcc and gdb on PATH, the pair the end-to-end tests run against.
bool HaveGccAndGdb();
ToolchainSpec HostGcc();

// ---- conjecture fixtures ----

// (conjecture, line, variable)
using ViolationTriple = std::tuple<std::string, int, std::string>;

struct CheckerFixture {
  std::string name;
  std::string about;
  TestProgram program;
  std::optional<std::string> callee;
  DebugTrace trace;
  std::set<ViolationTriple> expected;
};

CheckerFixture LoadCheckerFixture(const fs::path& path);
std::vector<fs::path> CheckerFixturePaths();
// Runs every applicable checker the way a campaign would.
std::set<ViolationTriple> RunCheckers(const CheckerFixture& fixture);

// ---- C3 oracle ----

struct SyntheticC3Case {
  DebugTrace trace;
  SourceFacts facts;
};

// <= max_lines source lines, <= max_vars variables, random reassignment
// boundaries, one or two functions interleaved.
SyntheticC3Case RandomC3Case(std::mt19937_64& rng, int max_lines = 50,
                             int max_vars = 10);
// All pairs (i, j), i before j in the trace, in the same pass through the
// instance window, line_i < line_j and rank_i < rank_j; the first such j per
// instance is reported.
std::set<ViolationTriple> BruteForceC3(const DebugTrace& trace,
                                       const SourceFacts& facts);
std::set<ViolationTriple> Triples(const std::vector<Violation>& vs);

// ---- planted culprits ----

// The array-subscript listing with a culprit marker on its first line; the
// C2 loss of `j` sits on line kPlantedLine.
inline constexpr int kPlantedLine = 9;
std::string PlantedSource(const std::string& marker);
TestProgram WriteProgram(const fs::path& path, const std::string& text);

// Fake toolchains wrapping the host gcc (see tests/fixtures/bin).
ToolchainSpec FakeGcc(const fs::path& catalog);
ToolchainSpec FakeClang();
// {levels: {O1: flags}} written to `path`.
void WriteCatalog(const fs::path& path, const std::vector<std::string>& flags);

}  // namespace debugholes::testing

#endif  // DEBUGHOLES_TESTS_SUPPORT_TEST_SUPPORT_H_
