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

#ifndef DEBUGHOLES_UTIL_H_
#define DEBUGHOLES_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace debugholes {

namespace fs = std::filesystem;
using Json = nlohmann::json;

std::string Sha256Hex(std::string_view data);

std::string ReadFile(const fs::path& path);
// Writes to a sibling temp file and renames it into place, so readers never
// observe a partial file.
void WriteFileAtomic(const fs::path& path, std::string_view content);
void WriteJsonAtomic(const fs::path& path, const Json& value);
Json ReadJson(const fs::path& path);

std::vector<std::string> SplitLines(std::string_view text);
std::string JoinLines(const std::vector<std::string>& lines);
std::string Trim(std::string_view s);
bool StartsWith(std::string_view s, std::string_view prefix);

// Replaces every 0x-prefixed hex literal with "<addr>".
std::string MaskAddresses(std::string_view text);

// Directory removed recursively on destruction.
class ScopedTempDir {
 public:
  explicit ScopedTempDir(std::string_view prefix = "dh");
  ~ScopedTempDir();
  ScopedTempDir(const ScopedTempDir&) = delete;
  ScopedTempDir& operator=(const ScopedTempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// Resolves a data file shipped with the project (assortments, catalogs).
fs::path DataPath(std::string_view name);

}  // namespace debugholes

#endif  // DEBUGHOLES_UTIL_H_
