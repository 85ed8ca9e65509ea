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

#ifndef DEBUGHOLES_COMMON_H_
#define DEBUGHOLES_COMMON_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace debugholes {

enum class ErrorCode {
  kGeneratorFailed,
  kRetriesExhausted,
  kToolUnavailable,
  kNoEligibleSite,
  kPostInjectionCompileFailure,
  kCompileFailed,
  kCompileTimeout,
  kLinkFailed,
  kCatalogUnavailable,
  kMalformedDwarf,
  kDebuggerCrashed,
  kTraceTimeout,
  kBreakpointSetupFailed,
  kUnsupportedSyntax,
  kReverifyFailed,
  kBudgetExhausted,
  kNonMonotonic,
  kPreconditionFlaky,
  kReducerFailed,
  kVerificationRegressed,
  kEmptyReference,
  kNoCommonLines,
  kCorpusMismatch,
  kMissingStage,
  kConfig,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// The single exception type thrown by the library. The code is the
// contract; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

enum class OptLevel { kO0, kOg, kO1, kO2, kO3, kOs, kOz };

std::string_view OptLevelName(OptLevel level);  // "O0", "Og", ...
// Accepts "O2" and "-O2".
std::optional<OptLevel> ParseOptLevel(std::string_view text);

enum class CompilerFamily { kGcc, kClang };

std::string_view FamilyName(CompilerFamily family);
std::optional<CompilerFamily> ParseFamily(std::string_view text);

enum class ConjectureId { kC1, kC2, kC3 };

std::string_view ConjectureName(ConjectureId id);
std::optional<ConjectureId> ParseConjecture(std::string_view text);

// Throwing variants (kConfig) for data read from files.
OptLevel RequireOptLevel(std::string_view text);
CompilerFamily RequireFamily(std::string_view text);
ConjectureId RequireConjecture(std::string_view text);

}  // namespace debugholes

#endif  // DEBUGHOLES_COMMON_H_
