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

// Minimal reader for little-endian ELF64 files: section headers and the
// static symbol table.

#ifndef DEBUGHOLES_ELF_READER_H_
#define DEBUGHOLES_ELF_READER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "debugholes/util.h"

namespace debugholes {

struct ElfSection {
  std::string name;
  uint32_t type = 0;
  uint64_t flags = 0;
  uint64_t addr = 0;
  uint64_t offset = 0;
  uint64_t size = 0;
};

class ElfFile {
 public:
  // Throws kMalformedDwarf when the file is not a readable ELF64 image.
  static ElfFile Load(const fs::path& path);
  static ElfFile FromBytes(std::string bytes);

  const std::vector<ElfSection>& sections() const { return sections_; }
  const ElfSection* FindSection(std::string_view name) const;
  // Contents of the named section; empty when absent or SHT_NOBITS.
  // Throws kMalformedDwarf for compressed sections.
  std::string_view SectionData(std::string_view name) const;
  std::optional<uint64_t> SymbolAddress(std::string_view name) const;
  bool IsPositionIndependent() const { return type_ == 3; }  // ET_DYN

 private:
  std::string bytes_;
  uint16_t type_ = 0;
  std::vector<ElfSection> sections_;
};

}  // namespace debugholes

#endif  // DEBUGHOLES_ELF_READER_H_
