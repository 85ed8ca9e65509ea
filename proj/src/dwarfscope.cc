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

#include "debugholes/dwarfscope.h"

#include <algorithm>
#include <cstdio>

#include "debugholes/textdiff.h"

namespace debugholes {

using dwarf::AddrRange;
using dwarf::Die;
using dwarf::DwarfData;

std::string_view ScopeKindName(ScopeKind k) {
  switch (k) {
    case ScopeKind::kSubprogram: return "Subprogram";
    case ScopeKind::kInlinedSubroutine: return "InlinedSubroutine";
    case ScopeKind::kLexicalBlock: return "LexicalBlock";
  }
  return "Subprogram";
}

std::string_view DieTagName(DieTag t) {
  switch (t) {
    case DieTag::kMissing: return "Missing";
    case DieTag::kHollow: return "Hollow";
    case DieTag::kIncomplete: return "Incomplete";
    case DieTag::kIncorrect: return "Incorrect";
    case DieTag::kComplete: return "Complete";
  }
  return "Complete";
}

DieTag ParseDieTag(std::string_view name) {
  for (DieTag t : {DieTag::kMissing, DieTag::kHollow, DieTag::kIncomplete,
                   DieTag::kIncorrect, DieTag::kComplete}) {
    if (DieTagName(t) == name) return t;
  }
  throw Error(ErrorCode::kConfig, "unknown DIE verdict " + std::string(name));
}

namespace {

bool IsVar(const Die& d) {
  return d.tag == dwarf::kTagVariable || d.tag == dwarf::kTagFormalParameter;
}

struct Match {
  int die = -1;
  int depth = -1;
  ScopeKind kind = ScopeKind::kSubprogram;
  std::vector<AddrRange> scope_ranges;
};

// Innermost declaration of `variable` visible at `pc` below `scope`.
// Blocks without code ranges are transparent; inlined callees are skipped.
void Search(const DwarfData& dw, int scope, int depth, ScopeKind kind,
            const std::vector<AddrRange>& scope_ranges,
            const std::string& variable, uint64_t pc, Match& best) {
  for (int child : dw.die(scope).children) {
    const Die& c = dw.die(child);
    if (IsVar(c)) {
      if (depth > best.depth && dw.Name(c) == variable) {
        best = {child, depth, kind, scope_ranges};
      }
    } else if (c.tag == dwarf::kTagLexicalBlock) {
      std::vector<AddrRange> r = dw.PcRanges(c);
      if (r.empty()) {
        Search(dw, child, depth, kind, scope_ranges, variable, pc, best);
      } else if (dwarf::Covers(r, pc)) {
        Search(dw, child, depth + 1, ScopeKind::kLexicalBlock, r, variable, pc,
               best);
      }
    }
  }
}

// Same search in the abstract tree, ignoring PCs.
int SearchAbstract(const DwarfData& dw, int scope, const std::string& variable) {
  for (int child : dw.die(scope).children) {
    const Die& c = dw.die(child);
    if (IsVar(c) && dw.Name(c) == variable) return child;
    if (c.tag == dwarf::kTagLexicalBlock) {
      int found = SearchAbstract(dw, child, variable);
      if (found >= 0) return found;
    }
  }
  return -1;
}

int Depth(const DwarfData& dw, int index) {
  int d = 0;
  while (index >= 0) {
    index = dw.die(index).parent;
    ++d;
  }
  return d;
}

std::vector<AddrRange> LocationRanges(const DwarfData& dw, const Die& d,
                                      const std::vector<AddrRange>& scope) {
  if (dw.HasLocationExpression(d)) {
    return d.Find(dwarf::kAtLocation)->str.empty() ? std::vector<AddrRange>{}
                                                   : scope;
  }
  std::vector<AddrRange> out;
  for (const auto& e : dw.LocationList(d)) {
    if (!e.expr.empty()) out.push_back({e.lo, e.hi});
  }
  return out;
}

}  // namespace

std::optional<VarDieInfo> LookupVarDie(const DwarfData& dw,
                                       const std::string& function,
                                       const std::string& variable,
                                       uint64_t pc) {
  // Concrete instances of the function (out-of-line or inlined) covering pc;
  // the most deeply nested one wins.
  int root = -1;
  int root_depth = -1;
  std::vector<AddrRange> root_ranges;
  for (size_t i = 0; i < dw.dies().size(); ++i) {
    const Die& d = dw.dies()[i];
    if (d.tag != dwarf::kTagSubprogram && d.tag != dwarf::kTagInlinedSubroutine) {
      continue;
    }
    if (d.Find(dwarf::kAtDeclaration)) continue;
    std::vector<AddrRange> r = dw.PcRanges(d);
    if (r.empty() || !dwarf::Covers(r, pc)) continue;
    if (dw.Name(d) != function) continue;
    int depth = Depth(dw, static_cast<int>(i));
    if (depth > root_depth) {
      root = static_cast<int>(i);
      root_depth = depth;
      root_ranges = std::move(r);
    }
  }
  if (root < 0) return std::nullopt;
  const Die& root_die = dw.die(root);
  ScopeKind root_kind = root_die.tag == dwarf::kTagInlinedSubroutine
                            ? ScopeKind::kInlinedSubroutine
                            : ScopeKind::kSubprogram;
  Match best;
  Search(dw, root, 0, root_kind, root_ranges, variable, pc, best);
  if (best.die >= 0) {
    const Die& v = dw.die(best.die);
    VarDieInfo info;
    info.die_offset = v.offset;
    info.has_location = v.Find(dwarf::kAtLocation) != nullptr;
    info.has_const_value = dw.FindInherited(v, dwarf::kAtConstValue) != nullptr;
    info.scope_kind = best.kind;
    info.abstract_origin_present = v.Find(dwarf::kAtAbstractOrigin) != nullptr;
    if (info.has_location) {
      info.location_ranges = LocationRanges(dw, v, best.scope_ranges);
    }
    return info;
  }
  // The variable may exist only in the abstract origin of this instance.
  int origin = dw.Origin(root_die);
  if (origin >= 0) {
    int abstract_var = SearchAbstract(dw, origin, variable);
    if (abstract_var >= 0) {
      const Die& v = dw.die(abstract_var);
      VarDieInfo info;
      info.die_offset = v.offset;
      info.has_const_value = v.Find(dwarf::kAtConstValue) != nullptr;
      info.scope_kind = root_kind;
      info.abstract_origin_present = true;
      return info;
    }
  }
  return std::nullopt;
}

std::optional<VarDieInfo> LookupVarDie(const fs::path& executable,
                                       const std::string& function,
                                       const std::string& variable,
                                       uint64_t runtime_pc, int64_t load_bias) {
  DwarfData dw = DwarfData::Load(executable);
  return LookupVarDie(dw, function, variable,
                      runtime_pc - static_cast<uint64_t>(load_bias));
}

DieVerdict ClassifyDie(const std::optional<VarDieInfo>& die, uint64_t stop_pc,
                       const ValidationOutcome& validation,
                       bool manual_incorrect) {
  if (!die) return {DieTag::kMissing, "no DIE for the variable in the scope tree"};
  if (!die->has_location && !die->has_const_value) {
    return {DieTag::kHollow,
            die->abstract_origin_present
                ? "only the abstract origin describes the variable"
                : "neither DW_AT_location nor DW_AT_const_value"};
  }
  if (die->has_location && !die->has_const_value &&
      !dwarf::Covers(die->location_ranges, stop_pc)) {
    return {DieTag::kIncomplete, "location ranges do not cover the stop pc"};
  }
  std::string how = die->has_const_value ? "DW_AT_const_value present"
                                         : "location covers the stop pc";
  if (!validation.refuted_in.empty()) {
    return {DieTag::kComplete, how + "; available under " +
                                   validation.refuted_in.front() +
                                   ", debugger-side candidate"};
  }
  if (manual_incorrect) {
    return {DieTag::kIncorrect, how + "; marked incorrect by manual override"};
  }
  if (!validation.confirmed_in.empty()) {
    return {DieTag::kIncorrect, how + "; failure confirmed under " +
                                    validation.confirmed_in.front()};
  }
  return {DieTag::kComplete, how + "; uncorroborated"};
}

namespace {

std::string Hex(uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string RenderRanges(const std::vector<AddrRange>& ranges, uint64_t base) {
  std::string out = "[";
  for (size_t i = 0; i < ranges.size(); ++i) {
    if (i) out += ", ";
    out += "[+" + Hex(ranges[i].lo - base) + ",+" + Hex(ranges[i].hi - base) + ")";
  }
  return out + "]";
}

void Describe(const DwarfData& dw, int scope, const std::string& path,
              const std::vector<AddrRange>& scope_ranges, uint64_t base,
              const std::string& variable, std::vector<std::string>& out) {
  for (int child : dw.die(scope).children) {
    const Die& c = dw.die(child);
    if (IsVar(c) && dw.Name(c) == variable) {
      std::string line = path + ": ";
      const auto* loc = c.Find(dwarf::kAtLocation);
      if (!loc) {
        line += "location=none";
      } else if (dw.HasLocationExpression(c)) {
        line += "location=expr " + RenderRanges(scope_ranges, base);
      } else {
        std::vector<AddrRange> r;
        for (const auto& e : dw.LocationList(c)) {
          if (!e.expr.empty()) r.push_back({e.lo, e.hi});
        }
        line += "location=list " + RenderRanges(r, base);
      }
      line += dw.FindInherited(c, dwarf::kAtConstValue) ? " const_value=yes"
                                                        : " const_value=no";
      if (c.Find(dwarf::kAtAbstractOrigin)) line += " abstract_origin=yes";
      out.push_back(line);
    } else if (c.tag == dwarf::kTagLexicalBlock) {
      std::vector<AddrRange> r = dw.PcRanges(c);
      Describe(dw, child, path + "/block" + (r.empty() ? "" : RenderRanges(r, base)),
               r.empty() ? scope_ranges : r, base, variable, out);
    }
  }
}

}  // namespace

std::vector<std::string> DescribeVarDies(const DwarfData& dw,
                                         const std::string& function,
                                         const std::string& variable) {
  std::vector<std::string> out;
  for (size_t i = 0; i < dw.dies().size(); ++i) {
    const Die& d = dw.dies()[i];
    if (d.tag != dwarf::kTagSubprogram && d.tag != dwarf::kTagInlinedSubroutine) {
      continue;
    }
    std::vector<AddrRange> r = dw.PcRanges(d);
    if (r.empty() || dw.Name(d) != function) continue;
    uint64_t base = r.front().lo;
    for (const auto& x : r) base = std::min(base, x.lo);
    std::string path = d.tag == dwarf::kTagSubprogram ? "subprogram" : "inlined";
    size_t before = out.size();
    Describe(dw, static_cast<int>(i), path, r, base, variable, out);
    if (out.size() == before) {
      int origin = dw.Origin(d);
      bool abstract = origin >= 0 && SearchAbstract(dw, origin, variable) >= 0;
      out.push_back(path + ": " +
                    (abstract ? "abstract origin only" : "no DIE"));
    }
  }
  return out;
}

std::string DieDiff::Render() const {
  std::string out = "same_code: ";
  out += same_code ? "true\n" : "false\n";
  out += "== DIE (a)\n";
  for (const auto& l : die_a) out += l + "\n";
  out += "== DIE (b)\n";
  for (const auto& l : die_b) out += l + "\n";
  out += "== DIE diff\n" + die_diff;
  out += "== assembly diff\n" + asm_diff;
  return out;
}

DieDiff DiffDies(const BuiltArtifact& a, const BuiltArtifact& b,
                 const std::string& function, const std::string& variable) {
  DieDiff diff;
  diff.die_a = DescribeVarDies(DwarfData::Load(a.executable_path), function, variable);
  diff.die_b = DescribeVarDies(DwarfData::Load(b.executable_path), function, variable);
  diff.die_diff = UnifiedDiff(JoinLines(diff.die_a), JoinLines(diff.die_b),
                              "a/" + variable, "b/" + variable);
  fs::path asm_a = a.executable_path.parent_path() / "asm.s";
  fs::path asm_b = b.executable_path.parent_path() / "asm.s";
  std::string text_a = fs::exists(asm_a) ? ReadFile(asm_a) : "";
  std::string text_b = fs::exists(asm_b) ? ReadFile(asm_b) : "";
  diff.asm_diff = UnifiedDiff(text_a, text_b, "a/asm.s", "b/asm.s");
  diff.same_code = !a.asm_hash.empty() && a.asm_hash == b.asm_hash;
  return diff;
}

void to_json(Json& j, const VarDieInfo& v) {
  Json ranges = Json::array();
  for (const auto& r : v.location_ranges) ranges.push_back({r.lo, r.hi});
  j = Json{{"die_offset", v.die_offset},
           {"has_location", v.has_location},
           {"has_const_value", v.has_const_value},
           {"location_ranges", ranges},
           {"scope_kind", std::string(ScopeKindName(v.scope_kind))},
           {"abstract_origin_present", v.abstract_origin_present}};
}

void from_json(const Json& j, VarDieInfo& v) {
  v.die_offset = j.value("die_offset", uint64_t{0});
  v.has_location = j.at("has_location").get<bool>();
  v.has_const_value = j.at("has_const_value").get<bool>();
  v.location_ranges.clear();
  for (const auto& r : j.value("location_ranges", Json::array())) {
    v.location_ranges.push_back({r.at(0).get<uint64_t>(), r.at(1).get<uint64_t>()});
  }
  std::string kind = j.value("scope_kind", "Subprogram");
  v.scope_kind = kind == "InlinedSubroutine" ? ScopeKind::kInlinedSubroutine
                 : kind == "LexicalBlock"    ? ScopeKind::kLexicalBlock
                                             : ScopeKind::kSubprogram;
  v.abstract_origin_present = j.value("abstract_origin_present", false);
}

void to_json(Json& j, const DieVerdict& v) {
  j = Json{{"tag", std::string(DieTagName(v.tag))}, {"note", v.note}};
}

void from_json(const Json& j, DieVerdict& v) {
  v.tag = ParseDieTag(j.at("tag").get<std::string>());
  v.note = j.value("note", "");
}

void WriteDieReport(const fs::path& dir, const std::optional<VarDieInfo>& die,
                    const DieVerdict& verdict, uint64_t stop_pc) {
  fs::create_directories(dir);
  Json j{{"verdict", verdict},
         {"stop_pc", stop_pc},
         {"die", die ? Json(*die) : Json(nullptr)}};
  WriteJsonAtomic(dir / "die_report.json", j);
  std::string text = "verdict: " + std::string(DieTagName(verdict.tag)) +
                     "\nnote: " + verdict.note + "\nstop_pc: " + Hex(stop_pc) +
                     "\n";
  if (die) {
    text += "die_offset: " + Hex(die->die_offset) + "\n";
    text += std::string("has_location: ") + (die->has_location ? "yes" : "no") + "\n";
    text += std::string("has_const_value: ") + (die->has_const_value ? "yes" : "no") + "\n";
    text += "scope: " + std::string(ScopeKindName(die->scope_kind)) + "\n";
    text += "location_ranges: " + RenderRanges(die->location_ranges, 0) + "\n";
  } else {
    text += "die: none\n";
  }
  WriteFileAtomic(dir / "die_report.txt", text);
}

}  // namespace debugholes
