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

// Compiling programs across toolchains, levels and flags; assembly
// normalization; per-level optimization flag catalogs.

#ifndef DEBUGHOLES_BUILDMATRIX_H_
#define DEBUGHOLES_BUILDMATRIX_H_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "debugholes/program.h"
#include "debugholes/subprocess.h"
#include "debugholes/toolchain.h"

namespace debugholes {

struct BuiltArtifact {
  fs::path executable_path;
  std::string build_log;
  int exit_status = 0;
  std::string asm_hash;  // empty when assembly was not requested
  std::string program_id;
  std::string toolchain_id;
  BuildConfig config;
};

struct CompileSettings {
  std::chrono::seconds timeout{60};
  fs::path out_dir;  // receives a.out, build.log, asm.s, meta.json
  bool with_assembly = true;
  std::optional<fs::path> stub_object;  // linked iff config.link_stub
};

// Produces a linked executable. Throws kCompileFailed, kCompileTimeout or
// kLinkFailed; build.log is written before throwing.
BuiltArtifact Compile(const TestProgram& program,
                      const ToolchainSpec& toolchain, const BuildConfig& config,
                      const CompileSettings& settings);

// The argv Compile uses (without the output path substitution).
std::vector<std::string> CompileCommand(const TestProgram& program,
                                        const ToolchainSpec& toolchain,
                                        const BuildConfig& config,
                                        const std::optional<fs::path>& stub,
                                        const fs::path& output);

// Normalized assembly for the program under `config`.
std::string ExtractAssembly(const TestProgram& program,
                            const ToolchainSpec& toolchain,
                            const BuildConfig& config,
                            std::chrono::seconds timeout = std::chrono::seconds(60));

// Strips comments, debug directives, debug sections and debug-only labels,
// then renumbers local .L labels by first appearance.
std::string NormalizeAssembly(std::string_view raw);

// `-fno-*` negations of boolean optimization flags enabled at `level`,
// probed from `-Q --help=optimizers` or read from the catalog file.
std::vector<std::string> EnumerateOptFlags(const ToolchainSpec& toolchain,
                                           OptLevel level);

// Compiles the opaque stub once into `dir` and returns the object path.
fs::path BuildStubObject(const ToolchainSpec& toolchain, const fs::path& dir,
                         int arity = 8,
                         const std::string& callee = "dh_opaque_sink");

// `cc -O<level> -c -o /dev/null` with extra args; used by corpus checks.
ProcessResult CompileOnly(const fs::path& source,
                          const ToolchainSpec& toolchain, OptLevel level,
                          const std::vector<std::string>& extra_args,
                          std::chrono::seconds timeout = std::chrono::seconds(60));

void to_json(Json& j, const BuiltArtifact& a);
void from_json(const Json& j, BuiltArtifact& a);

}  // namespace debugholes

#endif  // DEBUGHOLES_BUILDMATRIX_H_
