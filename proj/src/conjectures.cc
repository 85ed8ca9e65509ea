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

#include "debugholes/conjectures.h"

#include <algorithm>

namespace debugholes {

using c::Expr;
using c::Stmt;

std::string_view StorageKindName(StorageKind k) {
  switch (k) {
    case StorageKind::kGlobalVar: return "GlobalVar";
    case StorageKind::kGlobalArrayElem: return "GlobalArrayElem";
    case StorageKind::kVolatileGlobal: return "VolatileGlobal";
  }
  return "GlobalVar";
}

std::string_view ConstituentClassName(ConstituentClass k) {
  switch (k) {
    case ConstituentClass::kConstantValued: return "ConstantValued";
    case ConstituentClass::kUnalterable: return "Unalterable";
    case ConstituentClass::kOther: return "Other";
  }
  return "Other";
}

const GlobalAssign* SourceFacts::FindAssign(int line) const {
  for (const auto& a : global_assign_lines) {
    if (a.line == line) return &a;
  }
  return nullptr;
}

std::string ViolationKey::ToString() const {
  return program_id.substr(0, 12) + ":" + std::string(ConjectureName(conjecture)) +
         ":" + std::to_string(line) + ":" + variable;
}

// ---- constant folding ----

namespace {

struct Folded {
  std::optional<uint64_t> value;
  std::set<std::string> idents;
};

std::optional<uint64_t> ParseNumber(const std::string& text) {
  std::string t = text;
  while (!t.empty() && std::string("uUlL").find(t.back()) != std::string::npos) {
    t.pop_back();
  }
  if (t.empty()) return std::nullopt;
  try {
    size_t used = 0;
    uint64_t v = std::stoull(t, &used, 0);
    if (used != t.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

Folded Fold(const Expr& e) {
  using K = Expr::Kind;
  Folded f;
  switch (e.kind) {
    case K::kIdent:
      f.idents.insert(e.text);
      return f;
    case K::kNumber:
      f.value = ParseNumber(e.text);
      return f;
    case K::kChar:
      if (e.text.size() == 3) f.value = static_cast<uint8_t>(e.text[1]);
      return f;
    case K::kString:
    case K::kSizeof:
      return f;
    case K::kCast:
      return Fold(e.kids[0]);
    case K::kUnary: {
      Folded x = Fold(e.kids[0]);
      if (x.value && e.text != "&" && e.text != "*" && e.text != "++" &&
          e.text != "--") {
        uint64_t v = *x.value;
        if (e.text == "-") return {uint64_t{0} - v, {}};
        if (e.text == "+") return {v, {}};
        if (e.text == "~") return {~v, {}};
        if (e.text == "!") return {uint64_t{v == 0}, {}};
      }
      x.value.reset();
      return x;
    }
    case K::kTernary: {
      Folded cond = Fold(e.kids[0]);
      if (cond.value) return Fold(e.kids[*cond.value ? 1 : 2]);
      for (const auto& k : e.kids) {
        Folded x = Fold(k);
        f.idents.insert(x.idents.begin(), x.idents.end());
      }
      return f;
    }
    case K::kBinary: {
      Folded a = Fold(e.kids[0]);
      Folded b = Fold(e.kids[1]);
      const std::string& op = e.text;
      auto is = [](const Folded& x, uint64_t v) { return x.value && *x.value == v; };
      if ((op == "*" || op == "&") && (is(a, 0) || is(b, 0))) return {0, {}};
      if (op == "&&" && (is(a, 0) || is(b, 0))) return {0, {}};
      if (op == "|" && (is(a, ~uint64_t{0}) || is(b, ~uint64_t{0}))) {
        return {~uint64_t{0}, {}};
      }
      if (op == "||" && ((a.value && *a.value) || (b.value && *b.value))) {
        return {1, {}};
      }
      if (op == "%" && is(b, 1)) return {0, {}};
      if ((op == "<<" || op == ">>" || op == "/") && is(a, 0)) return {0, {}};
      if (a.value && b.value) {
        uint64_t x = *a.value, y = *b.value;
        int64_t sx = static_cast<int64_t>(x), sy = static_cast<int64_t>(y);
        std::optional<uint64_t> r;
        if (op == "+") r = x + y;
        else if (op == "-") r = x - y;
        else if (op == "*") r = x * y;
        else if (op == "/" && y) r = x / y;
        else if (op == "%" && y) r = x % y;
        else if (op == "&") r = x & y;
        else if (op == "|") r = x | y;
        else if (op == "^") r = x ^ y;
        else if (op == "<<" && y < 64) r = x << y;
        else if (op == ">>" && y < 64) r = x >> y;
        else if (op == "<") r = sx < sy;
        else if (op == ">") r = sx > sy;
        else if (op == "<=") r = sx <= sy;
        else if (op == ">=") r = sx >= sy;
        else if (op == "==") r = x == y;
        else if (op == "!=") r = x != y;
        else if (op == "&&") r = (x && y);
        else if (op == "||") r = (x || y);
        if (r) return {r, {}};
      }
      f.idents = a.idents;
      f.idents.insert(b.idents.begin(), b.idents.end());
      return f;
    }
    case K::kAssign: {
      Folded rhs = Fold(e.kids[1]);
      Folded lhs = Fold(e.kids[0]);
      f.idents = lhs.idents;
      f.idents.insert(rhs.idents.begin(), rhs.idents.end());
      if (e.text == "=") f.value = rhs.value;
      return f;
    }
    case K::kComma: {
      Folded a = Fold(e.kids[0]);
      Folded b = Fold(e.kids[1]);
      f.idents = a.idents;
      f.idents.insert(b.idents.begin(), b.idents.end());
      f.value = b.value;
      return f;
    }
    case K::kCall: {
      for (size_t i = 1; i < e.kids.size(); ++i) {
        Folded x = Fold(e.kids[i]);
        f.idents.insert(x.idents.begin(), x.idents.end());
      }
      return f;
    }
    default:
      for (const auto& k : e.kids) {
        Folded x = Fold(k);
        f.idents.insert(x.idents.begin(), x.idents.end());
      }
      return f;
  }
}

// Identifiers referenced as values (callee names excluded).
std::set<std::string> ValueIdentifiers(const Expr& e) {
  std::set<std::string> out;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (x.kind == Expr::Kind::kIdent) {
      out.insert(x.text);
      return;
    }
    if (x.kind == Expr::Kind::kCall) {
      for (size_t i = 1; i < x.kids.size(); ++i) walk(x.kids[i]);
      return;
    }
    for (const auto& k : x.kids) walk(k);
  };
  walk(e);
  return out;
}

}  // namespace

std::set<std::string> SurvivingIdentifiers(const Expr& e) {
  return Fold(e).idents;
}

// ---- source analysis ----

namespace {

struct Def {
  int line = 0;
  const Expr* rhs = nullptr;  // null for ++, --, compound or partial writes
};

struct LoopHeader {
  std::vector<const Expr*> exprs;  // condition and step
};

struct AssignStmt {
  const Stmt* stmt;
  std::vector<LoopHeader> loops;  // enclosing loops, outermost first
};

class FunctionAnalysis {
 public:
  FunctionAnalysis(const c::TranslationUnit& tu, const c::FunctionDef& fn,
                   const FunctionFacts* facts)
      : tu_(tu), fn_(fn) {
    for (const auto& p : fn.params) {
      ++decl_count_[p.name];
      scope_end_[p.name] = fn.body_end;
    }
    if (facts) {
      for (const auto& l : facts->locals) {
        ++decl_count_[l.name];
        scope_end_[l.name] = l.scope_end_line;
        decl_type_[l.name] = l.type;
      }
    }
    std::vector<LoopHeader> loops;
    Walk(fn.body, loops);
  }

  bool IsLocal(const std::string& name) const { return decl_count_.count(name) > 0; }
  bool IsUniqueLocal(const std::string& name) const {
    auto it = decl_count_.find(name);
    return it != decl_count_.end() && it->second == 1;
  }
  bool IsGlobal(const std::string& name) const {
    return !IsLocal(name) && tu_.FindGlobal(name) != nullptr;
  }

  void Analyze(SourceFacts& facts) {
    for (const auto& as : assigns_) AnalyzeAssign(as, facts);
    BuildInstances(facts);
  }

 private:
  const c::TranslationUnit& tu_;
  const c::FunctionDef& fn_;
  std::map<std::string, int> decl_count_;
  std::map<std::string, int> scope_end_;
  std::map<std::string, c::TypeInfo> decl_type_;
  std::map<std::string, std::vector<Def>> defs_;
  std::set<std::string> address_taken_;
  std::set<std::string> escapes_;  // passed to an opaque call
  std::vector<std::pair<std::string, int>> occurrences_;
  std::vector<AssignStmt> assigns_;

  void NoteExpr(const Expr& e, int stmt_line) {
    c::VisitExprs(e, [&](const Expr& x) {
      int line = x.line > 0 ? x.line : stmt_line;
      switch (x.kind) {
        case Expr::Kind::kIdent:
          occurrences_.emplace_back(x.text, line);
          break;
        case Expr::Kind::kUnary:
          if (x.text == "&" && x.kids[0].kind == Expr::Kind::kIdent) {
            address_taken_.insert(x.kids[0].text);
          }
          if ((x.text == "++" || x.text == "--") &&
              x.kids[0].kind == Expr::Kind::kIdent) {
            defs_[x.kids[0].text].push_back({line, nullptr});
          }
          break;
        case Expr::Kind::kPostfix:
          if (x.kids[0].kind == Expr::Kind::kIdent) {
            defs_[x.kids[0].text].push_back({line, nullptr});
          }
          break;
        case Expr::Kind::kAssign: {
          const Expr* target = &x.kids[0];
          if (target->kind == Expr::Kind::kIdent) {
            defs_[target->text].push_back(
                {line, x.text == "=" ? &x.kids[1] : nullptr});
          } else {
            while (target->kind == Expr::Kind::kIndex ||
                   target->kind == Expr::Kind::kMember) {
              target = &target->kids[0];
            }
            if (target->kind == Expr::Kind::kIdent && IsLocal(target->text)) {
              defs_[target->text].push_back({line, nullptr});
            }
          }
          break;
        }
        case Expr::Kind::kCall: {
          const Expr& callee = x.kids[0];
          bool opaque = callee.kind != Expr::Kind::kIdent ||
                        tu_.FindFunction(callee.text) == nullptr;
          if (opaque) {
            for (size_t i = 1; i < x.kids.size(); ++i) {
              for (const auto& n : ValueIdentifiers(x.kids[i])) escapes_.insert(n);
            }
          }
          break;
        }
        default:
          break;
      }
    });
  }

  void NoteDecls(const std::vector<c::VarDecl>& decls) {
    for (const auto& d : decls) {
      if (d.init) {
        defs_[d.name].push_back({d.line, &*d.init});
        NoteExpr(*d.init, d.line);
      }
    }
  }

  void Walk(const Stmt& s, std::vector<LoopHeader>& loops) {
    using K = Stmt::Kind;
    NoteDecls(s.decls);
    if (s.init) NoteExpr(*s.init, s.line);
    if (s.expr) NoteExpr(*s.expr, s.line);
    if (s.step) NoteExpr(*s.step, s.line);
    if (s.kind == K::kExpr && s.expr && s.expr->kind == Expr::Kind::kAssign) {
      assigns_.push_back({&s, loops});
    }
    bool is_loop = s.kind == K::kFor || s.kind == K::kWhile || s.kind == K::kDo;
    if (is_loop) {
      LoopHeader h;
      if (s.expr) h.exprs.push_back(&*s.expr);
      if (s.step) h.exprs.push_back(&*s.step);
      loops.push_back(h);
    }
    for (const auto& c : s.children) Walk(c, loops);
    if (is_loop) loops.pop_back();
  }

  std::optional<StorageKind> Storage(const Expr& lhs) const {
    const Expr* base = &lhs;
    bool indexed = false;
    while (base->kind == Expr::Kind::kIndex || base->kind == Expr::Kind::kMember) {
      if (base->kind == Expr::Kind::kIndex) indexed = true;
      if (base->kind == Expr::Kind::kMember && base->text == "->") return std::nullopt;
      base = &base->kids[0];
    }
    if (base->kind != Expr::Kind::kIdent || !IsGlobal(base->text)) {
      return std::nullopt;
    }
    const c::VarDecl* g = tu_.FindGlobal(base->text);
    if (g->type.is_volatile) return StorageKind::kVolatileGlobal;
    return indexed ? StorageKind::kGlobalArrayElem : StorageKind::kGlobalVar;
  }

  // Locals used inside subscripts of global storage anywhere in `e`.
  void GlobalSubscripts(const Expr& e, std::set<std::string>& out) const {
    c::VisitExprs(e, [&](const Expr& x) {
      if (x.kind != Expr::Kind::kIndex) return;
      const Expr* base = &x.kids[0];
      while (base->kind == Expr::Kind::kIndex || base->kind == Expr::Kind::kMember) {
        base = &base->kids[0];
      }
      if (base->kind == Expr::Kind::kIdent && IsGlobal(base->text)) {
        for (const auto& n : ValueIdentifiers(x.kids[1])) out.insert(n);
      }
    });
  }

  std::optional<std::string> ConstantEvidence(const std::string& name) const {
    if (address_taken_.count(name)) return std::nullopt;
    auto it = defs_.find(name);
    if (it == defs_.end() || it->second.empty()) return std::nullopt;
    std::string rendered;
    for (const auto& d : it->second) {
      if (!d.rhs) return std::nullopt;
      const Expr* v = d.rhs;
      while (v->kind == Expr::Kind::kAssign && v->text == "=") v = &v->kids[1];
      while (v->kind == Expr::Kind::kCast) v = &v->kids[0];
      bool literal = v->kind == Expr::Kind::kNumber ||
                     v->kind == Expr::Kind::kString ||
                     v->kind == Expr::Kind::kChar;
      if (v->kind == Expr::Kind::kUnary && (v->text == "-" || v->text == "+") &&
          v->kids[0].kind == Expr::Kind::kNumber) {
        literal = true;
      }
      bool address = v->kind == Expr::Kind::kUnary && v->text == "&" &&
                     ValueIdentifiers(*v).size() == 1 &&
                     (v->kids[0].kind == Expr::Kind::kIdent);
      if (!literal && !address) return std::nullopt;
      std::string r = c::Render(*v);
      if (!rendered.empty() && r != rendered) return std::nullopt;
      rendered = r;
    }
    return name + " = " + rendered + " (line " +
           std::to_string(it->second.front().line) + ")";
  }

  bool UsedLater(const std::string& name, int line,
                 const std::vector<LoopHeader>& loops, std::string* how) const {
    int end = scope_end_.count(name) ? scope_end_.at(name) : fn_.body_end;
    for (const auto& [n, l] : occurrences_) {
      if (n == name && l > line && l <= end) {
        *how = "used at line " + std::to_string(l);
        return true;
      }
    }
    for (const auto& loop : loops) {
      for (const Expr* e : loop.exprs) {
        if (ValueIdentifiers(*e).count(name)) {
          *how = "used in enclosing loop header";
          return true;
        }
      }
    }
    return false;
  }

  void AnalyzeAssign(const AssignStmt& as, SourceFacts& facts) {
    const Stmt& s = *as.stmt;
    const Expr& assign = *s.expr;
    auto storage = Storage(assign.kids[0]);
    if (!storage) return;
    // Constituents: locals feeding the value or the destination address.
    std::set<std::string> names = ValueIdentifiers(assign.kids[1]);
    std::set<std::string> lhs_subscripts;
    GlobalSubscripts(assign.kids[0], lhs_subscripts);
    names.insert(lhs_subscripts.begin(), lhs_subscripts.end());
    if (assign.text != "=") {
      for (const auto& n : ValueIdentifiers(assign.kids[0])) names.insert(n);
    }
    std::set<std::string> locals;
    for (const auto& n : names) {
      if (IsLocal(n)) locals.insert(n);
    }
    // Simplifiable iff literal folding drops a constituent.
    std::set<std::string> survivors = SurvivingIdentifiers(assign.kids[1]);
    survivors.insert(lhs_subscripts.begin(), lhs_subscripts.end());
    if (assign.text != "=") {
      for (const auto& n : ValueIdentifiers(assign.kids[0])) survivors.insert(n);
    }
    for (const auto& n : locals) {
      if (!survivors.count(n)) {
        facts.simplifiable_lines.push_back(s.line);
        facts.notes.push_back("line " + std::to_string(s.line) +
                              ": simplifiable, drops " + n);
        return;
      }
    }
    GlobalAssign ga;
    ga.line = s.line;
    ga.function = fn_.name;
    ga.lhs_storage = *storage;
    ga.text = c::Render(assign);
    std::set<std::string> subscripts;
    GlobalSubscripts(assign, subscripts);
    for (const auto& n : locals) {
      Constituent k;
      k.name = n;
      if (!IsUniqueLocal(n)) {
        k.evidence = "declared more than once in " + fn_.name;
      } else if (auto ev = ConstantEvidence(n)) {
        k.klass = ConstituentClass::kConstantValued;
        k.evidence = *ev;
      } else {
        bool indexes = subscripts.count(n) > 0;
        bool escapes = escapes_.count(n) > 0;
        std::string how;
        if ((indexes || escapes) && UsedLater(n, s.line, as.loops, &how)) {
          k.klass = ConstituentClass::kUnalterable;
          k.evidence = std::string(indexes ? "indexes global storage"
                                           : "passed to an opaque call") +
                       "; " + how;
        } else {
          k.evidence = indexes || escapes ? "no later use" : "plain operand";
        }
      }
      ga.constituents.push_back(std::move(k));
    }
    facts.global_assign_lines.push_back(std::move(ga));
  }

  void BuildInstances(SourceFacts& facts) {
    for (const auto& [name, count] : decl_count_) {
      if (count != 1) continue;
      auto it = defs_.find(name);
      if (it == defs_.end()) continue;
      std::set<int> lines;
      for (const auto& d : it->second) lines.insert(d.line);
      VarInstances vi;
      vi.function = fn_.name;
      vi.variable = name;
      int end = scope_end_.at(name);
      for (int l : lines) {
        if (l <= end) vi.instances.push_back({l, end});
      }
      if (!vi.instances.empty()) facts.var_instances.push_back(std::move(vi));
    }
  }
};

}  // namespace

SourceFacts AnalyzeSource(const TestProgram& program) {
  c::TranslationUnit tu = c::Parse(program.source_text);
  std::vector<FunctionFacts> all = ExtractFunctionFacts(tu);
  SourceFacts facts;
  for (size_t i = 0; i < tu.functions.size(); ++i) {
    FunctionAnalysis fa(tu, tu.functions[i], &all[i]);
    fa.Analyze(facts);
  }
  std::sort(facts.global_assign_lines.begin(), facts.global_assign_lines.end(),
            [](const GlobalAssign& a, const GlobalAssign& b) { return a.line < b.line; });
  if (program.injected_call) facts.opaque_calls.push_back(*program.injected_call);
  return facts;
}

// ---- checkers ----

namespace {

Violation MakeViolation(const DebugTrace& trace, ConjectureId id,
                        const LineRecord& rec, const std::string& var,
                        const std::string& function, std::string expected) {
  Violation v;
  v.program_id = trace.program_id;
  v.conjecture = id;
  v.file = rec.file;
  v.line = rec.line;
  v.variable = var;
  v.function = function;
  v.observed = rec.Observe(var);
  v.expected = std::move(expected);
  v.stop_pc = rec.stop_pc;
  return v;
}

}  // namespace

std::vector<Violation> CheckC1(const DebugTrace& trace,
                               const OpaqueCallSite& call,
                               std::vector<SkipRecord>* skips) {
  std::vector<Violation> out;
  const LineRecord* rec = trace.Find(call.line);
  if (!rec) {
    if (skips) skips->push_back({ConjectureId::kC1, call.line, "call line not stepped"});
    return out;
  }
  if (!call.function.empty() && rec->frame_function != call.function) {
    if (skips) {
      skips->push_back({ConjectureId::kC1, call.line,
                        "stopped in frame " + rec->frame_function});
    }
    return out;
  }
  for (const auto& var : call.argument_vars) {
    if (rec->Observe(var).tag != Availability::kAvailableWithValue) {
      out.push_back(MakeViolation(trace, ConjectureId::kC1, *rec, var,
                                  call.function,
                                  "AvailableWithValue (argument of " +
                                      call.callee + ")"));
    }
  }
  return out;
}

std::vector<Violation> CheckC2(const DebugTrace& trace,
                               const SourceFacts& facts) {
  std::vector<Violation> out;
  for (const auto& ga : facts.global_assign_lines) {
    const LineRecord* rec = trace.Find(ga.line);
    if (!rec || rec->frame_function != ga.function) continue;
    for (const auto& k : ga.constituents) {
      if (k.klass == ConstituentClass::kOther) continue;
      if (rec->Observe(k.name).tag != Availability::kAvailableWithValue) {
        out.push_back(MakeViolation(
            trace, ConjectureId::kC2, *rec, k.name, ga.function,
            "AvailableWithValue (" + std::string(ConstituentClassName(k.klass)) +
                ": " + k.evidence + ")"));
      }
    }
  }
  return out;
}

std::vector<Violation> CheckC3(const DebugTrace& trace,
                               const SourceFacts& facts) {
  std::vector<Violation> out;
  for (const auto& vi : facts.var_instances) {
    for (size_t k = 0; k < vi.instances.size(); ++k) {
      const Instance& inst = vi.instances[k];
      int hi = inst.scope_end_line;
      if (k + 1 < vi.instances.size()) {
        hi = std::min(hi, vi.instances[k + 1].assign_line - 1);
      }
      // (line, rank) of the current pass through the window.
      std::vector<std::pair<int, int>> pass;
      for (const auto& rec : trace.records) {
        if (rec.frame_function != vi.function) continue;
        if (rec.line <= inst.assign_line || rec.line > hi) {
          // Control left the window (loop back-edge, new call): the value
          // may legitimately come back, so each pass is judged on its own.
          pass.clear();
          continue;
        }
        int rank = Rank(rec.Observe(vi.variable).tag);
        // Lowest earlier rank at a preceding source line.
        const std::pair<int, int>* low = nullptr;
        for (const auto& p : pass) {
          if (p.first < rec.line && p.second < rank && (!low || p.second < low->second)) {
            low = &p;
          }
        }
        if (low) {
          out.push_back(MakeViolation(
              trace, ConjectureId::kC3, rec, vi.variable, vi.function,
              "rank <= " + std::to_string(low->second) + " (seen at line " +
                  std::to_string(low->first) + ", assigned at line " +
                  std::to_string(inst.assign_line) + ")"));
          break;
        }
        pass.emplace_back(rec.line, rank);
      }
    }
  }
  return out;
}

void StampViolations(std::vector<Violation>& vs, const DebugTrace& trace,
                     const TestProgram& program) {
  for (auto& v : vs) {
    v.configs = {{trace.toolchain_id, std::string(OptLevelName(trace.config.opt_level))}};
    if (program.line_map) v.original_line = program.line_map->ToOriginal(v.line);
  }
}

DedupeResult Dedupe(const std::vector<Violation>& per_config) {
  std::map<ViolationKey, Violation> merged;
  for (const auto& v : per_config) {
    auto [it, inserted] = merged.emplace(v.Key(), v);
    if (!inserted) {
      Violation& m = it->second;
      // Keep the fields of the smallest configuration deterministically.
      bool replace = !v.configs.empty() &&
                     (m.configs.empty() || *v.configs.begin() < *m.configs.begin());
      std::set<ConfigKey> configs = m.configs;
      configs.insert(v.configs.begin(), v.configs.end());
      if (replace) m = v;
      m.configs = std::move(configs);
    }
  }
  DedupeResult r;
  for (auto& [key, v] : merged) {
    std::set<std::string> levels;
    for (const auto& c : v.configs) levels.insert(c.second);
    r.level_matrix[key] = std::move(levels);
    r.unique.push_back(std::move(v));
  }
  return r;
}

std::map<std::set<std::string>, int> VennRegions(
    const std::map<ViolationKey, std::set<std::string>>& level_matrix) {
  std::map<std::set<std::string>, int> out;
  for (const auto& [key, levels] : level_matrix) ++out[levels];
  return out;
}

std::map<std::string, int> PerLevelCounts(
    const std::map<ViolationKey, std::set<std::string>>& level_matrix) {
  std::map<std::string, int> out;
  for (const auto& [key, levels] : level_matrix) {
    for (const auto& l : levels) ++out[l];
  }
  return out;
}

// ---- JSON ----

void to_json(Json& j, const Violation& v) {
  Json configs = Json::array();
  for (const auto& [tc, level] : v.configs) configs.push_back({tc, level});
  j = Json{{"program_id", v.program_id},
           {"conjecture", std::string(ConjectureName(v.conjecture))},
           {"file", v.file},
           {"line", v.line},
           {"variable", v.variable},
           {"function", v.function},
           {"observed", v.observed},
           {"expected", v.expected},
           {"configs", configs},
           {"validation", v.validation},
           {"stop_pc", v.stop_pc},
           {"original_line", v.original_line}};
  j["die_verdict"] = v.die_verdict ? Json(*v.die_verdict) : Json(nullptr);
}

void from_json(const Json& j, Violation& v) {
  v.program_id = j.at("program_id").get<std::string>();
  v.conjecture = RequireConjecture(j.at("conjecture").get<std::string>());
  v.file = j.value("file", "");
  v.line = j.at("line").get<int>();
  v.variable = j.at("variable").get<std::string>();
  v.function = j.value("function", "");
  v.observed = j.at("observed").get<AvailabilityState>();
  v.expected = j.value("expected", "");
  v.configs.clear();
  for (const auto& c : j.value("configs", Json::array())) {
    v.configs.insert({c.at(0).get<std::string>(), c.at(1).get<std::string>()});
  }
  if (j.contains("validation")) v.validation = j["validation"].get<ValidationOutcome>();
  v.stop_pc = j.value("stop_pc", uint64_t{0});
  v.original_line = j.value("original_line", 0);
  v.die_verdict.reset();
  if (j.contains("die_verdict") && !j["die_verdict"].is_null()) {
    v.die_verdict = j["die_verdict"].get<DieVerdict>();
  }
}

void to_json(Json& j, const SkipRecord& s) {
  j = Json{{"conjecture", std::string(ConjectureName(s.conjecture))},
           {"line", s.line},
           {"reason", s.reason}};
}

Json FactsToJson(const SourceFacts& facts) {
  Json assigns = Json::array();
  for (const auto& a : facts.global_assign_lines) {
    Json cs = Json::array();
    for (const auto& k : a.constituents) {
      cs.push_back({{"name", k.name},
                    {"klass", std::string(ConstituentClassName(k.klass))},
                    {"evidence", k.evidence}});
    }
    assigns.push_back({{"line", a.line},
                       {"function", a.function},
                       {"lhs_storage", std::string(StorageKindName(a.lhs_storage))},
                       {"text", a.text},
                       {"constituents", cs}});
  }
  Json instances = Json::array();
  for (const auto& vi : facts.var_instances) {
    Json is = Json::array();
    for (const auto& i : vi.instances) is.push_back({i.assign_line, i.scope_end_line});
    instances.push_back(
        {{"function", vi.function}, {"variable", vi.variable}, {"instances", is}});
  }
  return Json{{"global_assign_lines", assigns},
              {"var_instances", instances},
              {"opaque_calls", facts.opaque_calls},
              {"simplifiable_lines", facts.simplifiable_lines},
              {"notes", facts.notes}};
}

}  // namespace debugholes
