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

#ifndef DEBUGHOLES_TOOLCHAIN_H_
#define DEBUGHOLES_TOOLCHAIN_H_

#include <optional>
#include <string>
#include <vector>

#include "debugholes/common.h"
#include "debugholes/util.h"

namespace debugholes {

struct ToolchainSpec {
  CompilerFamily family = CompilerFamily::kGcc;
  fs::path compiler_path;
  std::string version_string;  // probed, never configured
  fs::path debugger_path;
  std::vector<fs::path> alt_debugger_paths;
  std::optional<fs::path> flag_catalog_path;
  std::vector<fs::path> include_dirs;  // generator runtime headers
  // Set when the probe found Og and O1 to produce identical code.
  bool og_aliases_o1 = false;

  // Stable identifier such as "gcc-11.4.0".
  std::string Id() const;
};

// Probes the compiler version (and, for clang, the Og/O1 alias) and returns
// the filled spec. Throws kToolUnavailable when the compiler cannot run.
ToolchainSpec ProbeToolchain(CompilerFamily family, fs::path compiler_path,
                             fs::path debugger_path);

struct BuildConfig {
  OptLevel opt_level = OptLevel::kO0;
  std::vector<std::string> extra_flags;
  std::vector<std::string> debug_flags = {"-g"};
  bool link_stub = false;

  // Throws kConfig when an O0 config carries optimization-disabling flags.
  void Validate() const;
  // Short digest over every field, used for store paths.
  std::string Hash() const;
  std::string Describe() const;  // "-O2 -fno-tree-ccp"
};

void to_json(Json& j, const ToolchainSpec& t);
void from_json(const Json& j, ToolchainSpec& t);
void to_json(Json& j, const BuildConfig& c);
void from_json(const Json& j, BuildConfig& c);

}  // namespace debugholes

#endif  // DEBUGHOLES_TOOLCHAIN_H_
