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

#include "debugholes/dwarf_reader.h"

#include <cstring>
#include <unordered_map>

#include "debugholes/common.h"

namespace debugholes::dwarf {

namespace {

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedDwarf, what);
}

// Bounds-checked little-endian cursor.
class Cursor {
 public:
  Cursor(std::string_view data, uint64_t pos = 0) : data_(data), pos_(pos) {
    if (pos > data.size()) Malformed("offset past end of section");
  }

  uint64_t pos() const { return pos_; }
  bool done() const { return pos_ >= data_.size(); }
  void Seek(uint64_t pos) {
    if (pos > data_.size()) Malformed("seek past end of section");
    pos_ = pos;
  }

  uint64_t Fixed(int n) {
    Need(static_cast<uint64_t>(n));
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= uint64_t{static_cast<uint8_t>(data_[pos_ + i])} << (8 * i);
    }
    pos_ += static_cast<uint64_t>(n);
    return v;
  }
  uint8_t U8() { return static_cast<uint8_t>(Fixed(1)); }
  uint16_t U16() { return static_cast<uint16_t>(Fixed(2)); }
  uint32_t U32() { return static_cast<uint32_t>(Fixed(4)); }
  uint64_t U64() { return Fixed(8); }

  uint64_t Uleb() {
    uint64_t v = 0;
    int shift = 0;
    while (true) {
      uint8_t b = U8();
      if (shift < 64) v |= uint64_t{b & 0x7fu} << shift;
      shift += 7;
      if (!(b & 0x80)) return v;
    }
  }
  int64_t Sleb() {
    int64_t v = 0;
    int shift = 0;
    uint8_t b;
    do {
      b = U8();
      if (shift < 64) v |= int64_t{b & 0x7f} << shift;
      shift += 7;
    } while (b & 0x80);
    if (shift < 64 && (b & 0x40)) v |= -(int64_t{1} << shift);
    return v;
  }
  std::string CStr() {
    size_t end = data_.find('\0', pos_);
    if (end == std::string_view::npos) Malformed("unterminated string");
    std::string s(data_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return s;
  }
  std::string Bytes(uint64_t n) {
    Need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void Skip(uint64_t n) {
    Need(n);
    pos_ += n;
  }

 private:
  void Need(uint64_t n) const {
    if (n > data_.size() || pos_ > data_.size() - n) {
      Malformed("read past end of section");
    }
  }

  std::string_view data_;
  uint64_t pos_;
};

std::string StrAt(std::string_view section, uint64_t offset) {
  if (offset >= section.size()) Malformed("string offset out of range");
  size_t end = section.find('\0', offset);
  if (end == std::string_view::npos) Malformed("unterminated string");
  return std::string(section.substr(offset, end - offset));
}

struct AttrSpec {
  uint16_t name;
  uint16_t form;
  int64_t implicit_const;
};

struct Abbrev {
  uint16_t tag = 0;
  bool has_children = false;
  std::vector<AttrSpec> specs;
};

using AbbrevTable = std::unordered_map<uint64_t, Abbrev>;

AbbrevTable ParseAbbrevs(std::string_view section, uint64_t offset) {
  AbbrevTable table;
  Cursor c(section, offset);
  while (true) {
    uint64_t code = c.Uleb();
    if (code == 0) break;
    Abbrev a;
    a.tag = static_cast<uint16_t>(c.Uleb());
    a.has_children = c.U8() != 0;
    while (true) {
      uint16_t name = static_cast<uint16_t>(c.Uleb());
      uint16_t form = static_cast<uint16_t>(c.Uleb());
      int64_t ic = form == 0x21 ? c.Sleb() : 0;
      if (name == 0 && form == 0) break;
      a.specs.push_back({name, form, ic});
    }
    table[code] = std::move(a);
  }
  return table;
}

// Raw attribute decoding; index forms are resolved by the caller once the
// unit's base attributes are known.
Attr ReadAttr(Cursor& c, const AttrSpec& spec, const Unit& u) {
  Attr a;
  a.name = spec.name;
  a.form = spec.form;
  uint16_t form = spec.form;
  if (form == 0x16) form = static_cast<uint16_t>(c.Uleb());  // indirect
  using C = Attr::Class;
  switch (form) {
    case 0x01: a.cls = C::kAddress; a.u = c.Fixed(u.addr_size); break;
    case 0x03: a.cls = C::kBlock; a.str = c.Bytes(c.U16()); break;
    case 0x04: a.cls = C::kBlock; a.str = c.Bytes(c.U32()); break;
    case 0x05: a.cls = C::kConstant; a.u = c.U16(); break;
    case 0x06: a.cls = C::kConstant; a.u = c.U32(); break;
    case 0x07: a.cls = C::kConstant; a.u = c.U64(); break;
    case 0x08: a.cls = C::kString; a.str = c.CStr(); break;
    case 0x09: a.cls = C::kBlock; a.str = c.Bytes(c.Uleb()); break;
    case 0x0a: a.cls = C::kBlock; a.str = c.Bytes(c.U8()); break;
    case 0x0b: a.cls = C::kConstant; a.u = c.U8(); break;
    case 0x0c: a.cls = C::kFlag; a.u = c.U8(); break;
    case 0x0d: a.cls = C::kSigned; a.s = c.Sleb(); a.u = static_cast<uint64_t>(a.s); break;
    case 0x0e: a.cls = C::kString; a.u = c.Fixed(u.offset_size); break;  // strp
    case 0x0f: a.cls = C::kConstant; a.u = c.Uleb(); break;
    case 0x10: a.cls = C::kRef; a.u = c.Fixed(u.version <= 2 ? u.addr_size : u.offset_size); break;
    case 0x11: a.cls = C::kRef; a.u = u.offset + c.U8(); break;
    case 0x12: a.cls = C::kRef; a.u = u.offset + c.U16(); break;
    case 0x13: a.cls = C::kRef; a.u = u.offset + c.U32(); break;
    case 0x14: a.cls = C::kRef; a.u = u.offset + c.U64(); break;
    case 0x15: a.cls = C::kRef; a.u = u.offset + c.Uleb(); break;
    case 0x17: a.cls = C::kSecOffset; a.u = c.Fixed(u.offset_size); break;
    case 0x18: a.cls = C::kBlock; a.str = c.Bytes(c.Uleb()); break;
    case 0x19: a.cls = C::kFlag; a.u = 1; break;
    case 0x1a: a.cls = C::kString; a.u = c.Uleb(); break;  // strx
    case 0x1b: a.cls = C::kAddress; a.u = c.Uleb(); break;  // addrx
    case 0x1c: a.cls = C::kOther; a.u = c.U32(); break;
    case 0x1d: a.cls = C::kOther; a.u = c.Fixed(u.offset_size); break;
    case 0x1e: a.cls = C::kBlock; a.str = c.Bytes(16); break;
    case 0x1f: a.cls = C::kString; a.u = c.Fixed(u.offset_size); break;  // line_strp
    case 0x20: a.cls = C::kOther; a.u = c.U64(); break;
    case 0x21: a.cls = C::kSigned; a.s = spec.implicit_const; a.u = static_cast<uint64_t>(a.s); break;
    case 0x22: a.cls = C::kLocListIndex; a.u = c.Uleb(); break;
    case 0x23: a.cls = C::kRngListIndex; a.u = c.Uleb(); break;
    case 0x24: a.cls = C::kOther; a.u = c.U64(); break;
    case 0x25: a.cls = C::kString; a.u = c.U8(); break;
    case 0x26: a.cls = C::kString; a.u = c.U16(); break;
    case 0x27: a.cls = C::kString; a.u = c.Fixed(3); break;
    case 0x28: a.cls = C::kString; a.u = c.U32(); break;
    case 0x29: a.cls = C::kAddress; a.u = c.U8(); break;
    case 0x2a: a.cls = C::kAddress; a.u = c.U16(); break;
    case 0x2b: a.cls = C::kAddress; a.u = c.Fixed(3); break;
    case 0x2c: a.cls = C::kAddress; a.u = c.U32(); break;
    case 0x1f01: a.cls = C::kAddress; a.u = c.Uleb(); break;  // GNU_addr_index
    case 0x1f02: a.cls = C::kString; a.u = c.Uleb(); break;   // GNU_str_index
    case 0x1f20: a.cls = C::kOther; a.u = c.Fixed(u.offset_size); break;
    case 0x1f21: a.cls = C::kOther; a.u = c.Fixed(u.offset_size); break;
    default:
      Malformed("unknown attribute form 0x" + std::to_string(form));
  }
  a.form = form;
  return a;
}

bool IsStrIndexForm(uint16_t f) {
  return f == 0x1a || (f >= 0x25 && f <= 0x28) || f == 0x1f02;
}
bool IsAddrIndexForm(uint16_t f) {
  return f == 0x1b || (f >= 0x29 && f <= 0x2c) || f == 0x1f01;
}

}  // namespace

const Attr* Die::Find(uint16_t name) const {
  for (const auto& a : attrs) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

DwarfData DwarfData::Load(const fs::path& executable) {
  return Load(ElfFile::Load(executable));
}

DwarfData DwarfData::Load(const ElfFile& elf) {
  DwarfData d;
  d.elf_ = std::make_shared<const ElfFile>(elf);
  const ElfFile& e = *d.elf_;
  d.info_ = e.SectionData(".debug_info");
  if (d.info_.empty()) Malformed("no .debug_info section");
  if (e.FindSection(".debug_info.dwo")) Malformed("split DWARF is not supported");
  d.abbrev_ = e.SectionData(".debug_abbrev");
  d.str_ = e.SectionData(".debug_str");
  d.line_str_ = e.SectionData(".debug_line_str");
  d.str_offsets_ = e.SectionData(".debug_str_offsets");
  d.addr_ = e.SectionData(".debug_addr");
  d.loc_ = e.SectionData(".debug_loc");
  d.loclists_ = e.SectionData(".debug_loclists");
  d.ranges_ = e.SectionData(".debug_ranges");
  d.rnglists_ = e.SectionData(".debug_rnglists");
  d.line_ = e.SectionData(".debug_line");
  d.ParseUnits();
  return d;
}

void DwarfData::ParseUnits() {
  Cursor c(info_);
  std::unordered_map<uint64_t, AbbrevTable> abbrev_cache;
  while (!c.done()) {
    Unit u;
    u.offset = c.pos();
    uint64_t length = c.U32();
    if (length == 0xffffffff) {
      u.offset_size = 8;
      length = c.U64();
    } else if (length >= 0xfffffff0) {
      Malformed("reserved unit length");
    }
    uint64_t end = c.pos() + length;
    if (end > info_.size()) Malformed("unit extends past .debug_info");
    u.version = c.U16();
    if (u.version < 2 || u.version > 5) {
      Malformed("unsupported DWARF version " + std::to_string(u.version));
    }
    uint64_t abbrev_offset;
    if (u.version >= 5) {
      u.unit_type = c.U8();
      u.addr_size = c.U8();
      abbrev_offset = c.Fixed(u.offset_size);
      if (u.unit_type == 4 || u.unit_type == 5) {
        Malformed("split DWARF is not supported");
      }
      if (u.unit_type == 2 || u.unit_type == 6) {  // type units
        c.Skip(8);
        c.Skip(u.offset_size);
      }
    } else {
      abbrev_offset = c.Fixed(u.offset_size);
      u.addr_size = c.U8();
    }
    if (u.addr_size != 4 && u.addr_size != 8) Malformed("bad address size");
    auto it = abbrev_cache.find(abbrev_offset);
    if (it == abbrev_cache.end()) {
      it = abbrev_cache.emplace(abbrev_offset, ParseAbbrevs(abbrev_, abbrev_offset))
               .first;
    }
    const AbbrevTable& abbrevs = it->second;

    int unit_index = static_cast<int>(units_.size());
    size_t first_die = dies_.size();
    std::vector<int> stack;
    while (c.pos() < end) {
      uint64_t offset = c.pos();
      uint64_t code = c.Uleb();
      if (code == 0) {
        if (!stack.empty()) stack.pop_back();
        continue;
      }
      auto ab = abbrevs.find(code);
      if (ab == abbrevs.end()) Malformed("unknown abbreviation code");
      Die die;
      die.offset = offset;
      die.tag = ab->second.tag;
      die.unit = unit_index;
      die.parent = stack.empty() ? -1 : stack.back();
      for (const auto& spec : ab->second.specs) {
        die.attrs.push_back(ReadAttr(c, spec, u));
      }
      int index = static_cast<int>(dies_.size());
      if (die.parent >= 0) dies_[static_cast<size_t>(die.parent)].children.push_back(index);
      by_offset_[offset] = index;
      bool has_children = ab->second.has_children;
      dies_.push_back(std::move(die));
      if (u.root < 0) u.root = index;
      if (has_children) stack.push_back(index);
      if (stack.empty()) {
        // Only the unit DIE lives at top level; skip any padding.
        if (u.root != index) break;
      }
    }
    c.Seek(end);
    if (u.root < 0) {
      units_.push_back(u);
      continue;
    }

    // Unit-level bases, then resolve index forms in every DIE of the unit.
    const Die& root = dies_[static_cast<size_t>(u.root)];
    if (root.Find(kAtDwoName) || root.Find(kAtGnuDwoName)) {
      Malformed("split DWARF is not supported");
    }
    if (const Attr* a = root.Find(kAtStrOffsetsBase)) u.str_offsets_base = a->u;
    if (const Attr* a = root.Find(kAtAddrBase)) u.addr_base = a->u;
    if (const Attr* a = root.Find(kAtRnglistsBase)) u.rnglists_base = a->u;
    if (const Attr* a = root.Find(kAtLoclistsBase)) u.loclists_base = a->u;
    if (const Attr* a = root.Find(kAtStmtList)) u.stmt_list = a->u;
    units_.push_back(u);
    Unit& unit = units_.back();
    for (size_t i = first_die; i < dies_.size(); ++i) {
      for (auto& a : dies_[i].attrs) {
        if (a.cls == Attr::Class::kString && a.str.empty()) {
          if (IsStrIndexForm(a.form)) {
            Cursor sc(str_offsets_, unit.str_offsets_base + a.u * unit.offset_size);
            a.str = StrAt(str_, sc.Fixed(unit.offset_size));
          } else if (a.form == 0x0e) {
            a.str = StrAt(str_, a.u);
          } else if (a.form == 0x1f) {
            a.str = StrAt(line_str_, a.u);
          }
        } else if (a.cls == Attr::Class::kAddress && IsAddrIndexForm(a.form)) {
          a.u = ReadAddrIndex(unit, a.u);
          a.form = 0x01;
        }
      }
    }
    const Die& r = dies_[static_cast<size_t>(unit.root)];
    if (const Attr* a = r.Find(kAtLowPc)) unit.base_address = a->u;
    if (const Attr* a = r.Find(kAtName)) unit.name = a->str;
    if (const Attr* a = r.Find(kAtCompDir)) unit.comp_dir = a->str;
  }
}

uint64_t DwarfData::ReadAddrIndex(const Unit& u, uint64_t index) const {
  Cursor c(addr_, u.addr_base + index * u.addr_size);
  return c.Fixed(u.addr_size);
}

int DwarfData::IndexAt(uint64_t offset) const {
  auto it = by_offset_.find(offset);
  return it == by_offset_.end() ? -1 : it->second;
}

int DwarfData::Origin(const Die& d) const {
  const Attr* a = d.Find(kAtAbstractOrigin);
  if (!a) a = d.Find(kAtSpecification);
  if (!a || a->cls != Attr::Class::kRef) return -1;
  return IndexAt(a->u);
}

const Attr* DwarfData::FindInherited(const Die& d, uint16_t name) const {
  const Die* cur = &d;
  for (int depth = 0; cur && depth < 16; ++depth) {
    if (const Attr* a = cur->Find(name)) return a;
    int o = Origin(*cur);
    cur = o >= 0 ? &die(o) : nullptr;
  }
  return nullptr;
}

std::string DwarfData::Name(const Die& d) const {
  const Attr* a = FindInherited(d, kAtName);
  return a ? a->str : std::string();
}

std::vector<AddrRange> DwarfData::ReadRanges(const Unit& u,
                                             const Attr& a) const {
  std::vector<AddrRange> out;
  if (u.version < 5) {
    Cursor c(ranges_, a.u);
    uint64_t base = u.base_address;
    uint64_t max = u.addr_size == 8 ? ~uint64_t{0} : 0xffffffffu;
    while (true) {
      uint64_t lo = c.Fixed(u.addr_size);
      uint64_t hi = c.Fixed(u.addr_size);
      if (lo == 0 && hi == 0) break;
      if (lo == max) {
        base = hi;
        continue;
      }
      if (hi > lo) out.push_back({base + lo, base + hi});
    }
    return out;
  }
  uint64_t offset = a.u;
  if (a.cls == Attr::Class::kRngListIndex) {
    Cursor ic(rnglists_, u.rnglists_base + a.u * u.offset_size);
    offset = u.rnglists_base + ic.Fixed(u.offset_size);
  }
  Cursor c(rnglists_, offset);
  uint64_t base = u.base_address;
  while (true) {
    uint8_t kind = c.U8();
    uint64_t lo = 0, hi = 0;
    switch (kind) {
      case 0: return out;
      case 1: base = ReadAddrIndex(u, c.Uleb()); continue;
      case 2: lo = ReadAddrIndex(u, c.Uleb()); hi = ReadAddrIndex(u, c.Uleb()); break;
      case 3: lo = ReadAddrIndex(u, c.Uleb()); hi = lo + c.Uleb(); break;
      case 4: lo = base + c.Uleb(); hi = base + c.Uleb(); break;
      case 5: base = c.Fixed(u.addr_size); continue;
      case 6: lo = c.Fixed(u.addr_size); hi = c.Fixed(u.addr_size); break;
      case 7: lo = c.Fixed(u.addr_size); hi = lo + c.Uleb(); break;
      default: Malformed("unknown range list entry");
    }
    if (hi > lo) out.push_back({lo, hi});
  }
}

std::vector<AddrRange> DwarfData::PcRanges(const Die& d) const {
  const Unit& u = units_[static_cast<size_t>(d.unit)];
  if (const Attr* r = d.Find(kAtRanges)) return ReadRanges(u, *r);
  const Attr* lo = d.Find(kAtLowPc);
  const Attr* hi = d.Find(kAtHighPc);
  if (!lo || !hi) return {};
  uint64_t end = hi->cls == Attr::Class::kAddress ? hi->u : lo->u + hi->u;
  if (end <= lo->u) return {};
  return {{lo->u, end}};
}

bool DwarfData::HasLocationExpression(const Die& d) const {
  const Attr* a = d.Find(kAtLocation);
  return a && a->cls == Attr::Class::kBlock;
}

std::vector<LocEntry> DwarfData::LocationList(const Die& d) const {
  const Attr* a = d.Find(kAtLocation);
  if (!a || a->cls == Attr::Class::kBlock) return {};
  const Unit& u = units_[static_cast<size_t>(d.unit)];
  std::vector<LocEntry> out;
  if (u.version < 5) {
    Cursor c(loc_, a->u);
    uint64_t base = u.base_address;
    uint64_t max = u.addr_size == 8 ? ~uint64_t{0} : 0xffffffffu;
    while (true) {
      uint64_t lo = c.Fixed(u.addr_size);
      uint64_t hi = c.Fixed(u.addr_size);
      if (lo == 0 && hi == 0) break;
      if (lo == max) {
        base = hi;
        continue;
      }
      std::string expr = c.Bytes(c.U16());
      if (hi > lo) out.push_back({base + lo, base + hi, std::move(expr)});
    }
    return out;
  }
  uint64_t offset = a->u;
  if (a->cls == Attr::Class::kLocListIndex) {
    Cursor ic(loclists_, u.loclists_base + a->u * u.offset_size);
    offset = u.loclists_base + ic.Fixed(u.offset_size);
  }
  Cursor c(loclists_, offset);
  uint64_t base = u.base_address;
  while (true) {
    uint8_t kind = c.U8();
    uint64_t lo = 0, hi = 0;
    switch (kind) {
      case 0: return out;
      case 1: base = ReadAddrIndex(u, c.Uleb()); continue;
      case 2: lo = ReadAddrIndex(u, c.Uleb()); hi = ReadAddrIndex(u, c.Uleb()); break;
      case 3: lo = ReadAddrIndex(u, c.Uleb()); hi = lo + c.Uleb(); break;
      case 4: lo = base + c.Uleb(); hi = base + c.Uleb(); break;
      case 5: lo = 0; hi = ~uint64_t{0}; break;  // default location
      case 6: base = c.Fixed(u.addr_size); continue;
      case 7: lo = c.Fixed(u.addr_size); hi = c.Fixed(u.addr_size); break;
      case 8: lo = c.Fixed(u.addr_size); hi = lo + c.Uleb(); break;
      default: Malformed("unknown location list entry");
    }
    std::string expr = c.Bytes(c.Uleb());
    if (hi > lo) out.push_back({lo, hi, std::move(expr)});
  }
}

namespace {

std::string JoinPath(const std::string& dir, const std::string& file) {
  if (file.empty() || file[0] == '/' || dir.empty()) return file;
  return dir.back() == '/' ? dir + file : dir + "/" + file;
}

struct EntryFormat {
  uint64_t content;
  uint64_t form;
};

}  // namespace

std::vector<LineRow> DwarfData::LineTable(const Unit& unit) const {
  std::vector<LineRow> rows;
  if (!unit.stmt_list) return rows;
  Cursor c(line_, *unit.stmt_list);
  int offset_size = 4;
  uint64_t length = c.U32();
  if (length == 0xffffffff) {
    offset_size = 8;
    length = c.U64();
  }
  uint64_t end = c.pos() + length;
  uint16_t version = c.U16();
  if (version < 2 || version > 5) Malformed("unsupported line table version");
  uint8_t addr_size = unit.addr_size;
  if (version >= 5) {
    addr_size = c.U8();
    c.U8();  // segment selector size
  }
  uint64_t header_length = c.Fixed(offset_size);
  uint64_t program_start = c.pos() + header_length;
  uint8_t min_inst = c.U8();
  uint8_t max_ops = version >= 4 ? c.U8() : 1;
  (void)max_ops;
  bool default_is_stmt = c.U8() != 0;
  int8_t line_base = static_cast<int8_t>(c.U8());
  uint8_t line_range = c.U8();
  uint8_t opcode_base = c.U8();
  if (line_range == 0) Malformed("line_range is zero");
  std::vector<uint8_t> std_lengths;
  for (int i = 1; i < opcode_base; ++i) std_lengths.push_back(c.U8());

  std::vector<std::string> dirs;
  std::vector<std::string> files;  // full paths, indexed as the program does
  if (version < 5) {
    dirs.push_back(unit.comp_dir);
    while (true) {
      std::string d = c.CStr();
      if (d.empty()) break;
      dirs.push_back(JoinPath(unit.comp_dir, d));
    }
    files.push_back("");  // file indices start at 1
    while (true) {
      std::string f = c.CStr();
      if (f.empty()) break;
      uint64_t dir = c.Uleb();
      c.Uleb();
      c.Uleb();
      files.push_back(JoinPath(dir < dirs.size() ? dirs[dir] : "", f));
    }
  } else {
    auto read_entries = [&](bool is_file) {
      std::vector<EntryFormat> formats(c.U8());
      for (auto& f : formats) {
        f.content = c.Uleb();
        f.form = c.Uleb();
      }
      uint64_t count = c.Uleb();
      for (uint64_t i = 0; i < count; ++i) {
        std::string path;
        uint64_t dir_index = 0;
        for (const auto& f : formats) {
          std::string s;
          uint64_t v = 0;
          switch (f.form) {
            case 0x08: s = c.CStr(); break;
            case 0x0e: s = StrAt(str_, c.Fixed(offset_size)); break;
            case 0x1f: s = StrAt(line_str_, c.Fixed(offset_size)); break;
            case 0x0b: v = c.U8(); break;
            case 0x05: v = c.U16(); break;
            case 0x06: v = c.U32(); break;
            case 0x07: v = c.U64(); break;
            case 0x0f: v = c.Uleb(); break;
            case 0x1e: c.Skip(16); break;
            case 0x09: c.Skip(c.Uleb()); break;
            default: Malformed("unsupported line table entry form");
          }
          if (f.content == 1) path = s;
          if (f.content == 2) dir_index = v;
        }
        if (is_file) {
          files.push_back(
              JoinPath(dir_index < dirs.size() ? dirs[dir_index] : "", path));
        } else {
          dirs.push_back(dirs.empty() ? path : JoinPath(dirs[0], path));
        }
      }
    };
    read_entries(false);
    read_entries(true);
  }

  c.Seek(program_start);
  auto reset = [&](LineRow& r, uint64_t& file) {
    r = LineRow{};
    r.line = 1;
    r.is_stmt = default_is_stmt;
    file = 1;
  };
  LineRow state;
  uint64_t file = 1;
  reset(state, file);
  auto emit = [&] {
    LineRow r = state;
    r.path = file < files.size() ? files[file] : "";
    rows.push_back(std::move(r));
  };
  while (c.pos() < end) {
    uint8_t op = c.U8();
    if (op >= opcode_base) {
      int adj = op - opcode_base;
      state.address += static_cast<uint64_t>(adj / line_range) * min_inst;
      state.line += line_base + adj % line_range;
      emit();
      continue;
    }
    switch (op) {
      case 0: {
        uint64_t len = c.Uleb();
        uint64_t next = c.pos() + len;
        if (len == 0) break;
        uint8_t sub = c.U8();
        if (sub == 1) {
          state.end_sequence = true;
          emit();
          reset(state, file);
        } else if (sub == 2) {
          state.address = c.Fixed(addr_size);
        }
        c.Seek(next);
        break;
      }
      case 1: emit(); break;
      case 2: state.address += c.Uleb() * min_inst; break;
      case 3: state.line += static_cast<int>(c.Sleb()); break;
      case 4: file = c.Uleb(); break;
      case 5: c.Uleb(); break;
      case 6: state.is_stmt = !state.is_stmt; break;
      case 7: break;
      case 8: state.address += static_cast<uint64_t>((255 - opcode_base) / line_range) * min_inst; break;
      case 9: state.address += c.U16(); break;
      case 10: case 11: break;
      case 12: c.Uleb(); break;
      default:
        for (int i = 0; i < std_lengths[static_cast<size_t>(op - 1)]; ++i) c.Uleb();
    }
  }
  return rows;
}

bool Covers(const std::vector<AddrRange>& ranges, uint64_t pc) {
  for (const auto& r : ranges) {
    if (pc >= r.lo && pc < r.hi) return true;
  }
  return false;
}

}  // namespace debugholes::dwarf
