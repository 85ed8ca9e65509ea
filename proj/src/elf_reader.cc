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

#include "debugholes/elf_reader.h"

#include <cstring>

#include "debugholes/common.h"

namespace debugholes {

namespace {

constexpr uint32_t kShtSymtab = 2;
constexpr uint32_t kShtNobits = 8;
constexpr uint64_t kShfCompressed = 0x800;

template <typename T>
T Read(const std::string& bytes, uint64_t offset) {
  if (offset + sizeof(T) > bytes.size() || offset + sizeof(T) < offset) {
    throw Error(ErrorCode::kMalformedDwarf, "ELF read out of bounds");
  }
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  return v;
}

std::string CString(const std::string& bytes, uint64_t offset) {
  if (offset >= bytes.size()) {
    throw Error(ErrorCode::kMalformedDwarf, "ELF string out of bounds");
  }
  size_t end = bytes.find('\0', offset);
  if (end == std::string::npos) end = bytes.size();
  return bytes.substr(offset, end - offset);
}

}  // namespace

ElfFile ElfFile::Load(const fs::path& path) {
  std::string bytes;
  try {
    bytes = ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedDwarf, e.what());
  }
  return FromBytes(std::move(bytes));
}

ElfFile ElfFile::FromBytes(std::string bytes) {
  ElfFile elf;
  elf.bytes_ = std::move(bytes);
  const std::string& b = elf.bytes_;
  if (b.size() < 64 || b.compare(0, 4, "\x7f" "ELF") != 0) {
    throw Error(ErrorCode::kMalformedDwarf, "not an ELF file");
  }
  if (b[4] != 2 || b[5] != 1) {
    throw Error(ErrorCode::kMalformedDwarf, "only little-endian ELF64 is supported");
  }
  elf.type_ = Read<uint16_t>(b, 16);
  uint64_t shoff = Read<uint64_t>(b, 40);
  uint16_t shentsize = Read<uint16_t>(b, 58);
  uint16_t shnum = Read<uint16_t>(b, 60);
  uint16_t shstrndx = Read<uint16_t>(b, 62);
  if (shoff == 0 || shnum == 0 || shentsize < 64 || shstrndx >= shnum) {
    throw Error(ErrorCode::kMalformedDwarf, "no section headers");
  }
  std::vector<uint32_t> name_offsets;
  for (uint16_t i = 0; i < shnum; ++i) {
    uint64_t h = shoff + uint64_t{i} * shentsize;
    ElfSection s;
    name_offsets.push_back(Read<uint32_t>(b, h));
    s.type = Read<uint32_t>(b, h + 4);
    s.flags = Read<uint64_t>(b, h + 8);
    s.addr = Read<uint64_t>(b, h + 16);
    s.offset = Read<uint64_t>(b, h + 24);
    s.size = Read<uint64_t>(b, h + 32);
    if (s.type != kShtNobits && s.offset + s.size > b.size()) {
      throw Error(ErrorCode::kMalformedDwarf, "section extends past end of file");
    }
    elf.sections_.push_back(s);
  }
  uint64_t strtab = elf.sections_[shstrndx].offset;
  for (size_t i = 0; i < elf.sections_.size(); ++i) {
    elf.sections_[i].name = CString(b, strtab + name_offsets[i]);
  }
  return elf;
}

const ElfSection* ElfFile::FindSection(std::string_view name) const {
  for (const auto& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string_view ElfFile::SectionData(std::string_view name) const {
  const ElfSection* s = FindSection(name);
  if (!s || s->type == kShtNobits) return {};
  if (s->flags & kShfCompressed) {
    throw Error(ErrorCode::kMalformedDwarf,
                "compressed section " + std::string(name) + " is not supported");
  }
  return std::string_view(bytes_).substr(s->offset, s->size);
}

std::optional<uint64_t> ElfFile::SymbolAddress(std::string_view name) const {
  for (size_t i = 0; i < sections_.size(); ++i) {
    const ElfSection& sym = sections_[i];
    if (sym.type != kShtSymtab) continue;
    // sh_link of the symbol table names its string table.
    uint64_t shoff = Read<uint64_t>(bytes_, 40);
    uint16_t shentsize = Read<uint16_t>(bytes_, 58);
    uint32_t strndx = Read<uint32_t>(bytes_, shoff + i * shentsize + 40);
    if (strndx >= sections_.size()) continue;
    uint64_t str = sections_[strndx].offset;
    for (uint64_t off = sym.offset; off + 24 <= sym.offset + sym.size;
         off += 24) {
      uint32_t name_off = Read<uint32_t>(bytes_, off);
      if (name_off == 0) continue;
      if (CString(bytes_, str + name_off) == name) {
        return Read<uint64_t>(bytes_, off + 8);
      }
    }
  }
  return std::nullopt;
}

}  // namespace debugholes
