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

// DWARF 4/5 reader: the DIE tree of .debug_info, location and range lists,
// and the line-number program. Split DWARF is rejected.

#ifndef DEBUGHOLES_DWARF_READER_H_
#define DEBUGHOLES_DWARF_READER_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "debugholes/elf_reader.h"

namespace debugholes::dwarf {

// Tags and attributes this project looks at.
inline constexpr uint16_t kTagFormalParameter = 0x05;
inline constexpr uint16_t kTagLexicalBlock = 0x0b;
inline constexpr uint16_t kTagCompileUnit = 0x11;
inline constexpr uint16_t kTagInlinedSubroutine = 0x1d;
inline constexpr uint16_t kTagSubprogram = 0x2e;
inline constexpr uint16_t kTagVariable = 0x34;

inline constexpr uint16_t kAtLocation = 0x02;
inline constexpr uint16_t kAtName = 0x03;
inline constexpr uint16_t kAtStmtList = 0x10;
inline constexpr uint16_t kAtLowPc = 0x11;
inline constexpr uint16_t kAtHighPc = 0x12;
inline constexpr uint16_t kAtCompDir = 0x1b;
inline constexpr uint16_t kAtConstValue = 0x1c;
inline constexpr uint16_t kAtInline = 0x20;
inline constexpr uint16_t kAtAbstractOrigin = 0x31;
inline constexpr uint16_t kAtDeclLine = 0x3b;
inline constexpr uint16_t kAtDeclaration = 0x3c;
inline constexpr uint16_t kAtSpecification = 0x47;
inline constexpr uint16_t kAtType = 0x49;
inline constexpr uint16_t kAtEntryPc = 0x52;
inline constexpr uint16_t kAtRanges = 0x55;
inline constexpr uint16_t kAtStrOffsetsBase = 0x72;
inline constexpr uint16_t kAtAddrBase = 0x73;
inline constexpr uint16_t kAtRnglistsBase = 0x74;
inline constexpr uint16_t kAtDwoName = 0x76;
inline constexpr uint16_t kAtLoclistsBase = 0x8c;
inline constexpr uint16_t kAtGnuDwoName = 0x2130;

struct AddrRange {
  uint64_t lo = 0;
  uint64_t hi = 0;  // exclusive
  bool operator==(const AddrRange& o) const { return lo == o.lo && hi == o.hi; }
};

struct LocEntry {
  uint64_t lo = 0;
  uint64_t hi = 0;
  std::string expr;
};

struct Attr {
  enum class Class {
    kAddress,
    kConstant,
    kSigned,
    kString,
    kBlock,  // block and exprloc forms
    kRef,    // u holds the absolute .debug_info offset
    kSecOffset,
    kFlag,
    kLocListIndex,
    kRngListIndex,
    kOther
  };
  uint16_t name = 0;
  uint16_t form = 0;
  Class cls = Class::kOther;
  uint64_t u = 0;
  int64_t s = 0;
  std::string str;  // kString and kBlock payloads
};

struct Die {
  uint64_t offset = 0;
  uint16_t tag = 0;
  std::vector<Attr> attrs;
  int parent = -1;
  std::vector<int> children;
  int unit = 0;

  const Attr* Find(uint16_t name) const;
};

struct Unit {
  uint64_t offset = 0;
  uint16_t version = 0;
  uint8_t unit_type = 1;
  uint8_t addr_size = 8;
  uint8_t offset_size = 4;
  uint64_t base_address = 0;
  uint64_t str_offsets_base = 8;
  uint64_t addr_base = 8;
  uint64_t rnglists_base = 0;
  uint64_t loclists_base = 0;
  std::optional<uint64_t> stmt_list;
  std::string name;
  std::string comp_dir;
  int root = -1;
};

struct LineRow {
  uint64_t address = 0;
  std::string path;  // directory joined with file name
  int line = 0;
  bool is_stmt = true;
  bool end_sequence = false;
};

class DwarfData {
 public:
  // Throws kMalformedDwarf when .debug_info is missing or unreadable and for
  // split-DWARF units.
  static DwarfData Load(const ElfFile& elf);
  static DwarfData Load(const fs::path& executable);

  const std::vector<Unit>& units() const { return units_; }
  const std::vector<Die>& dies() const { return dies_; }
  const Die& die(int index) const { return dies_[static_cast<size_t>(index)]; }
  int IndexAt(uint64_t offset) const;  // -1 when no DIE starts there

  // Target of DW_AT_abstract_origin or DW_AT_specification, or -1.
  int Origin(const Die& d) const;
  // DW_AT_name, following origin links.
  std::string Name(const Die& d) const;
  // Attribute on the DIE or, failing that, along its origin chain.
  const Attr* FindInherited(const Die& d, uint16_t name) const;

  // Code ranges from low/high pc or DW_AT_ranges; empty when the DIE has
  // none.
  std::vector<AddrRange> PcRanges(const Die& d) const;
  // Location entries for a DW_AT_location that is a list. Entries carry
  // absolute (unrelocated) addresses.
  std::vector<LocEntry> LocationList(const Die& d) const;
  // True when DW_AT_location is a single expression (valid over the whole
  // enclosing scope).
  bool HasLocationExpression(const Die& d) const;

  std::vector<LineRow> LineTable(const Unit& unit) const;

 private:
  std::shared_ptr<const ElfFile> elf_;  // owns the bytes the views point into
  std::string_view info_, abbrev_, str_, line_str_, str_offsets_, addr_,
      loc_, loclists_, ranges_, rnglists_, line_;
  std::vector<Unit> units_;
  std::vector<Die> dies_;
  std::map<uint64_t, int> by_offset_;

  void ParseUnits();
  uint64_t ReadAddrIndex(const Unit& u, uint64_t index) const;
  std::vector<AddrRange> ReadRanges(const Unit& u, const Attr& a) const;
};

// Membership of `pc` in the union of half-open ranges.
bool Covers(const std::vector<AddrRange>& ranges, uint64_t pc);

}  // namespace debugholes::dwarf

#endif  // DEBUGHOLES_DWARF_READER_H_
