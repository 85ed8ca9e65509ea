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

#ifndef DEBUGHOLES_PROGRAM_H_
#define DEBUGHOLES_PROGRAM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "debugholes/cparse.h"
#include "debugholes/util.h"

namespace debugholes {

struct GenerationRecipe {
  uint64_t seed = 0;
  int option_set_id = 0;
  std::vector<std::string> generator_options;
  int max_source_lines = 600;
  // Seed that produced the accepted source; differs from `seed` after
  // retries. `retries` lists every rejected seed with the reason.
  uint64_t effective_seed = 0;
  std::vector<std::pair<uint64_t, std::string>> retries;
};

struct LocalVar {
  std::string name;
  c::TypeInfo type;
  int decl_line = 0;
  int scope_end_line = 0;
  bool has_initializer = false;
};

struct FunctionFacts {
  std::string name;
  int body_begin = 0;
  int body_end = 0;
  std::vector<LocalVar> locals;
};

struct OpaqueCallSite {
  int line = 0;  // 1-based, in injected-file coordinates
  std::string callee;
  std::vector<std::string> argument_vars;
  std::string function;  // enclosing function of the call
};

// Original-to-injected line mapping for a single insertion.
struct LineMapping {
  int insertion_line = 0;  // original line the new text was inserted before
  int inserted_lines = 0;

  int ToInjected(int original) const {
    return original >= insertion_line ? original + inserted_lines : original;
  }
  // Returns 0 for lines that only exist in the injected file.
  int ToOriginal(int injected) const {
    if (injected < insertion_line) return injected;
    if (injected < insertion_line + inserted_lines) return 0;
    return injected - inserted_lines;
  }
};

struct TestProgram {
  std::string id;  // sha256 of source_text
  std::string source_text;
  fs::path source_path;
  std::vector<FunctionFacts> functions;
  std::optional<OpaqueCallSite> injected_call;
  std::optional<GenerationRecipe> recipe;
  std::optional<LineMapping> line_map;
  std::string parent_id;  // id of the program this one was derived from

  std::string FileName() const { return source_path.filename().string(); }
  const FunctionFacts* FindFunction(const std::string& name) const;
  // Function whose body spans `line`.
  const FunctionFacts* FunctionAtLine(int line) const;
};

// Builds a TestProgram from source text; fills `functions` when the source
// is inside the parser subset (left empty otherwise).
TestProgram MakeProgram(std::string source_text, fs::path source_path);

// Locals of every function, with the scope each declaration lives in.
std::vector<FunctionFacts> ExtractFunctionFacts(const c::TranslationUnit& tu);

void to_json(Json& j, const GenerationRecipe& r);
void from_json(const Json& j, GenerationRecipe& r);
void to_json(Json& j, const OpaqueCallSite& s);
void from_json(const Json& j, OpaqueCallSite& s);
void to_json(Json& j, const LineMapping& m);
void from_json(const Json& j, LineMapping& m);

}  // namespace debugholes

#endif  // DEBUGHOLES_PROGRAM_H_
