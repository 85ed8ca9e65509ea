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

// Test-program generation, undefined-behavior screening and opaque-call
// injection.

#ifndef DEBUGHOLES_CORPUS_H_
#define DEBUGHOLES_CORPUS_H_

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "debugholes/program.h"
#include "debugholes/toolchain.h"

namespace debugholes {

// Generator option assortments shipped as data (data/assortments.json).
std::vector<std::vector<std::string>> LoadAssortments(
    const fs::path& path = DataPath("assortments.json"));

struct GeneratorSettings {
  fs::path generator_path;
  std::vector<std::string> base_args;  // before the per-recipe options
  int retry_budget = 10;
  std::chrono::seconds timeout{60};
  // Compiler used for the -O0 acceptance check; skipped when unset.
  std::optional<ToolchainSpec> check_toolchain;
  fs::path out_dir;  // where program sources are written
};

// Runs `generator --seed S <options>` and returns the program. Retries with
// seed+1, seed+2, ... while the output is too long or fails to compile.
TestProgram GenerateProgram(GenerationRecipe recipe,
                            const GeneratorSettings& settings);

struct Finding {
  std::string tool;
  std::string text;
  bool blocking = true;
};

struct ScreenVerdict {
  bool clean = true;
  bool analyzer_skipped = false;
  std::vector<Finding> findings;
};

struct ScreenSettings {
  std::vector<ToolchainSpec> toolchains;
  std::optional<fs::path> analyzer_path;
  std::vector<std::string> analyzer_args;
  std::chrono::seconds timeout{60};
};

// Never modifies the program. Compiler diagnostics from the UB-relevant
// warning set are blocking; the analyzer is blocking only when installed.
ScreenVerdict ScreenUndefinedBehavior(const TestProgram& program,
                                      const ScreenSettings& settings);

struct InjectionSettings {
  std::string callee = "dh_opaque_sink";
  int arity = 8;
  // When set, the injected source must compile at -O0; otherwise another
  // site is tried (up to 5 attempts).
  std::optional<ToolchainSpec> check_toolchain;
};

TestProgram InjectOpaqueCall(const TestProgram& program, uint64_t seed,
                             const InjectionSettings& settings = {});

// C translation unit defining the opaque callee with `arity` int
// parameters, all printed by a single printf.
std::string EmitStubModule(int arity = 8,
                           const std::string& callee = "dh_opaque_sink");

// Sidecar written next to each program: {id, recipe, injected_call,
// screen_verdict}.
Json ProgramSidecar(const TestProgram& program,
                    const std::optional<ScreenVerdict>& verdict);

void to_json(Json& j, const ScreenVerdict& v);
void from_json(const Json& j, ScreenVerdict& v);

}  // namespace debugholes

#endif  // DEBUGHOLES_CORPUS_H_
