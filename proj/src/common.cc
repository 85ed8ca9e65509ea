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

#include "debugholes/common.h"

#include <array>
#include <utility>

namespace debugholes {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kGeneratorFailed: return "GeneratorFailed";
    case ErrorCode::kRetriesExhausted: return "RetriesExhausted";
    case ErrorCode::kToolUnavailable: return "ToolUnavailable";
    case ErrorCode::kNoEligibleSite: return "NoEligibleSite";
    case ErrorCode::kPostInjectionCompileFailure:
      return "PostInjectionCompileFailure";
    case ErrorCode::kCompileFailed: return "CompileFailed";
    case ErrorCode::kCompileTimeout: return "CompileTimeout";
    case ErrorCode::kLinkFailed: return "LinkFailed";
    case ErrorCode::kCatalogUnavailable: return "CatalogUnavailable";
    case ErrorCode::kMalformedDwarf: return "MalformedDwarf";
    case ErrorCode::kDebuggerCrashed: return "DebuggerCrashed";
    case ErrorCode::kTraceTimeout: return "TraceTimeout";
    case ErrorCode::kBreakpointSetupFailed: return "BreakpointSetupFailed";
    case ErrorCode::kUnsupportedSyntax: return "UnsupportedSyntax";
    case ErrorCode::kReverifyFailed: return "ReverifyFailed";
    case ErrorCode::kBudgetExhausted: return "BudgetExhausted";
    case ErrorCode::kNonMonotonic: return "NonMonotonic";
    case ErrorCode::kPreconditionFlaky: return "PreconditionFlaky";
    case ErrorCode::kReducerFailed: return "ReducerFailed";
    case ErrorCode::kVerificationRegressed: return "VerificationRegressed";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kNoCommonLines: return "NoCommonLines";
    case ErrorCode::kCorpusMismatch: return "CorpusMismatch";
    case ErrorCode::kMissingStage: return "MissingStage";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

namespace {

constexpr std::array<std::pair<OptLevel, std::string_view>, 7> kLevels = {{
    {OptLevel::kO0, "O0"},
    {OptLevel::kOg, "Og"},
    {OptLevel::kO1, "O1"},
    {OptLevel::kO2, "O2"},
    {OptLevel::kO3, "O3"},
    {OptLevel::kOs, "Os"},
    {OptLevel::kOz, "Oz"},
}};

}  // namespace

std::string_view OptLevelName(OptLevel level) {
  for (const auto& [l, name] : kLevels) {
    if (l == level) return name;
  }
  return "O?";
}

std::optional<OptLevel> ParseOptLevel(std::string_view text) {
  if (!text.empty() && text.front() == '-') text.remove_prefix(1);
  for (const auto& [l, name] : kLevels) {
    if (name == text) return l;
  }
  return std::nullopt;
}

std::string_view FamilyName(CompilerFamily family) {
  return family == CompilerFamily::kGcc ? "gcc" : "clang";
}

std::optional<CompilerFamily> ParseFamily(std::string_view text) {
  if (text == "gcc") return CompilerFamily::kGcc;
  if (text == "clang") return CompilerFamily::kClang;
  return std::nullopt;
}

std::string_view ConjectureName(ConjectureId id) {
  switch (id) {
    case ConjectureId::kC1: return "C1";
    case ConjectureId::kC2: return "C2";
    case ConjectureId::kC3: return "C3";
  }
  return "C?";
}

std::optional<ConjectureId> ParseConjecture(std::string_view text) {
  if (text == "C1") return ConjectureId::kC1;
  if (text == "C2") return ConjectureId::kC2;
  if (text == "C3") return ConjectureId::kC3;
  return std::nullopt;
}

OptLevel RequireOptLevel(std::string_view text) {
  if (auto l = ParseOptLevel(text)) return *l;
  throw Error(ErrorCode::kConfig, "unknown optimization level " + std::string(text));
}

CompilerFamily RequireFamily(std::string_view text) {
  if (auto f = ParseFamily(text)) return *f;
  throw Error(ErrorCode::kConfig, "unknown compiler family " + std::string(text));
}

ConjectureId RequireConjecture(std::string_view text) {
  if (auto c = ParseConjecture(text)) return *c;
  throw Error(ErrorCode::kConfig, "unknown conjecture " + std::string(text));
}

}  // namespace debugholes
