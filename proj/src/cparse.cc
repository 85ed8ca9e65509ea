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

#include "debugholes/cparse.h"

#include <array>
#include <cctype>
#include <map>

#include "debugholes/common.h"

namespace debugholes::c {
namespace {

[[noreturn]] void Fail(int line, const std::string& what) {
  throw Error(ErrorCode::kUnsupportedSyntax,
              "line " + std::to_string(line) + ": " + what);
}

constexpr std::array<std::string_view, 48> kPuncts = {
    "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&",  "||",  "+=",  "-=", "*=", "/=", "%=", "&=", "^=", "|=", "{",  "}",
    "[",   "]",   "(",   ")",  ";",  ",",  ":",  "?",  "=",  "<",  ">",  "+",
    "-",   "*",   "/",   "%",  "&",  "|",  "^",  "!",  "~",  ".",  "#",  "\\"};

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::vector<Token> Lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  bool at_line_start = true;
  size_t i = 0;
  auto push = [&](Token::Kind kind, std::string text, int tok_line) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = tok_line;
    t.first_on_line = at_line_start;
    at_line_start = false;
    out.push_back(std::move(t));
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      at_line_start = true;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) Fail(line, "unterminated comment");
      for (size_t k = i; k < end; ++k) {
        if (src[k] == '\n') ++line;
      }
      i = end + 2;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '#' && at_line_start) {
      // Preprocessor directive, with backslash continuations.
      while (i < src.size() && src[i] != '\n') {
        if (src[i] == '\\' && i + 1 < src.size() && src[i + 1] == '\n') {
          ++line;
          i += 2;
          continue;
        }
        ++i;
      }
      continue;
    }
    int tok_line = line;
    if (IsIdentStart(c)) {
      size_t b = i;
      while (i < src.size() && IsIdentChar(src[i])) ++i;
      push(Token::Kind::kIdent, std::string(src.substr(b, i - b)), tok_line);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      size_t b = i;
      while (i < src.size() &&
             (IsIdentChar(src[i]) || src[i] == '.' ||
              ((src[i] == '+' || src[i] == '-') &&
               (src[i - 1] == 'e' || src[i - 1] == 'E') &&
               !(src[b] == '0' && b + 1 < src.size() &&
                 (src[b + 1] == 'x' || src[b + 1] == 'X'))))) {
        ++i;
      }
      push(Token::Kind::kNumber, std::string(src.substr(b, i - b)), tok_line);
      continue;
    }
    if (c == '"' || c == '\'') {
      size_t b = i++;
      while (i < src.size() && src[i] != c) {
        if (src[i] == '\\') ++i;
        if (i < src.size() && src[i] == '\n') Fail(line, "newline in literal");
        ++i;
      }
      if (i >= src.size()) Fail(line, "unterminated literal");
      ++i;
      push(c == '"' ? Token::Kind::kString : Token::Kind::kChar,
           std::string(src.substr(b, i - b)), tok_line);
      continue;
    }
    bool matched = false;
    for (std::string_view p : kPuncts) {
      if (src.substr(i, p.size()) == p) {
        push(Token::Kind::kPunct, std::string(p), tok_line);
        i += p.size();
        matched = true;
        break;
      }
    }
    if (!matched) Fail(line, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Token::Kind::kEnd;
  end.line = line;
  out.push_back(end);
  return out;
}

bool TypeInfo::IsFloating() const {
  return pointer_depth == 0 && !is_array &&
         (base.find("float") != std::string::npos ||
          base.find("double") != std::string::npos);
}

bool TypeInfo::IsScalar() const {
  if (is_array || is_function) return false;
  if (pointer_depth > 0) return true;
  return !is_struct && base != "void";
}

const FunctionDef* TranslationUnit::FindFunction(std::string_view name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const VarDecl* TranslationUnit::FindGlobal(std::string_view name) const {
  for (const auto& g : globals) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

namespace {

const std::set<std::string>& BuiltinTypedefs() {
  static const std::set<std::string> kNames = {
      "int8_t",   "int16_t",   "int32_t",  "int64_t",  "uint8_t",
      "uint16_t", "uint32_t",  "uint64_t", "size_t",   "ssize_t",
      "intptr_t", "uintptr_t", "ptrdiff_t", "FILE",    "bool",
      "int_least8_t", "uint_least8_t", "int_fast8_t", "uint_fast8_t"};
  return kNames;
}

const std::set<std::string>& TypeKeywords() {
  static const std::set<std::string> kWords = {
      "void",   "char",     "short",  "int",     "long",  "float",
      "double", "signed",   "unsigned", "_Bool", "struct", "union",
      "enum",   "const",    "volatile", "static", "extern", "register",
      "auto",   "inline",   "typedef",  "restrict", "__restrict"};
  return kWords;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {
    typedefs_ = BuiltinTypedefs();
  }

  TranslationUnit ParseUnit() {
    TranslationUnit tu;
    while (!AtEnd()) {
      if (Accept(";")) continue;
      const Token& first = Peek();
      if (first.first_on_line) tu.toplevel_lines.push_back(first.line);
      ParseTopLevel(tu);
    }
    tu.typedef_names = typedefs_;
    return tu;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::set<std::string> typedefs_;

  const Token& Peek(size_t ahead = 0) const {
    size_t p = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[p];
  }
  bool AtEnd() const { return Peek().kind == Token::Kind::kEnd; }
  const Token& Next() {
    const Token& t = Peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  int PrevLine() const { return pos_ == 0 ? 1 : toks_[pos_ - 1].line; }
  bool Is(std::string_view text) const {
    const Token& t = Peek();
    return (t.kind == Token::Kind::kPunct || t.kind == Token::Kind::kIdent) &&
           t.text == text;
  }
  bool Accept(std::string_view text) {
    if (!Is(text)) return false;
    Next();
    return true;
  }
  void Expect(std::string_view text) {
    if (!Accept(text)) {
      Fail(Peek().line, "expected '" + std::string(text) + "' before '" +
                            Peek().text + "'");
    }
  }
  std::string ExpectIdent() {
    if (Peek().kind != Token::Kind::kIdent) {
      Fail(Peek().line, "expected identifier before '" + Peek().text + "'");
    }
    return Next().text;
  }

  bool IsTypeStart(size_t ahead = 0) const {
    const Token& t = Peek(ahead);
    if (t.kind != Token::Kind::kIdent) return false;
    return TypeKeywords().count(t.text) || typedefs_.count(t.text) ||
           t.text == "__attribute__";
  }

  // Parses declaration specifiers into `type`. Returns true if `typedef`.
  bool ParseSpecifiers(TypeInfo& type) {
    bool is_typedef = false;
    std::vector<std::string> words;
    bool saw_type = false;
    while (true) {
      const Token& t = Peek();
      if (t.kind != Token::Kind::kIdent) break;
      const std::string& w = t.text;
      if (w == "__attribute__") Fail(t.line, "GNU attributes");
      if (w == "typedef") {
        is_typedef = true;
      } else if (w == "static") {
        type.is_static = true;
      } else if (w == "extern") {
        type.is_extern = true;
      } else if (w == "const") {
        type.is_const = true;
      } else if (w == "volatile") {
        type.is_volatile = true;
      } else if (w == "register" || w == "auto" || w == "inline" ||
                 w == "restrict" || w == "__restrict") {
      } else if (w == "struct" || w == "union" || w == "enum") {
        Next();
        std::string tag;
        if (Peek().kind == Token::Kind::kIdent) tag = Next().text;
        if (Is("{")) SkipBraces();
        words.push_back(w + (tag.empty() ? "" : " " + tag));
        type.is_struct = (w != "enum");
        saw_type = true;
        continue;
      } else if (TypeKeywords().count(w)) {
        words.push_back(w);
        saw_type = true;
      } else if (typedefs_.count(w) && !saw_type) {
        words.push_back(w);
        saw_type = true;
      } else {
        break;
      }
      Next();
    }
    if (words.empty()) {
      if (!type.is_const && !type.is_volatile && !type.is_static &&
          !type.is_extern && !is_typedef) {
        Fail(Peek().line, "expected type before '" + Peek().text + "'");
      }
      words.push_back("int");
    }
    for (size_t i = 0; i < words.size(); ++i) {
      if (i) type.base += ' ';
      type.base += words[i];
    }
    return is_typedef;
  }

  void SkipBraces() {
    int depth = 0;
    do {
      if (AtEnd()) Fail(Peek().line, "unbalanced braces");
      if (Is("{")) ++depth;
      if (Is("}")) --depth;
      Next();
    } while (depth > 0);
  }

  // Declarator after the specifiers. Fills name and pointer/array/function
  // shape. Parameter lists are returned when the declarator is a function.
  void ParseDeclarator(TypeInfo& type, std::string& name, int& line,
                       std::vector<VarDecl>* params, bool abstract = false) {
    while (Accept("*")) {
      ++type.pointer_depth;
      while (Is("const") || Is("volatile") || Is("restrict") ||
             Is("__restrict")) {
        Next();
      }
    }
    if (Is("(")) Fail(Peek().line, "parenthesized or function-pointer "
                                   "declarators");
    if (Peek().kind == Token::Kind::kIdent && !abstract) {
      line = Peek().line;
      name = Next().text;
    } else if (!abstract) {
      Fail(Peek().line, "expected declarator before '" + Peek().text + "'");
    }
    while (true) {
      if (Accept("[")) {
        type.is_array = true;
        int depth = 1;
        while (depth > 0) {
          if (AtEnd()) Fail(line, "unterminated array bound");
          if (Is("[")) ++depth;
          if (Is("]")) --depth;
          Next();
        }
      } else if (Is("(") && !abstract) {
        Next();
        type.is_function = true;
        std::vector<VarDecl> list = ParseParams();
        if (params) *params = std::move(list);
      } else {
        break;
      }
    }
  }

  std::vector<VarDecl> ParseParams() {
    std::vector<VarDecl> out;
    if (Accept(")")) return out;
    if (Is("void") && Peek(1).kind == Token::Kind::kPunct &&
        Peek(1).text == ")") {
      Next();
      Next();
      return out;
    }
    while (true) {
      if (Accept("...")) {
        Expect(")");
        return out;
      }
      VarDecl p;
      ParseSpecifiers(p.type);
      p.line = Peek().line;
      bool named = true;
      {
        // Unnamed parameters in prototypes: "int, int".
        size_t save = pos_;
        while (Accept("*")) {
        }
        named = Peek().kind == Token::Kind::kIdent;
        pos_ = save;
      }
      ParseDeclarator(p.type, p.name, p.line, nullptr, !named);
      if (p.type.is_array) {
        p.type.is_array = false;
        ++p.type.pointer_depth;
      }
      out.push_back(std::move(p));
      if (Accept(")")) return out;
      Expect(",");
    }
  }

  Expr ParseInitializer() {
    if (Is("{")) {
      Expr list;
      list.kind = Expr::Kind::kInitList;
      list.line = Next().line;
      while (!Accept("}")) {
        if (Accept(".")) {
          ExpectIdent();
          Expect("=");
        } else if (Is("[")) {
          Next();
          ParseExpr();
          Expect("]");
          Expect("=");
        }
        list.kids.push_back(ParseInitializer());
        if (!Is("}")) Expect(",");
      }
      return list;
    }
    return ParseAssign();
  }

  // Parses "specifiers declarator[= init], ...;" after specifiers.
  std::vector<VarDecl> ParseInitDeclarators(const TypeInfo& base) {
    std::vector<VarDecl> out;
    while (true) {
      VarDecl d;
      d.type = base;
      ParseDeclarator(d.type, d.name, d.line, nullptr);
      if (Accept("=")) d.init = ParseInitializer();
      out.push_back(std::move(d));
      if (Accept(";")) return out;
      Expect(",");
    }
  }

  void ParseTopLevel(TranslationUnit& tu) {
    TypeInfo base;
    bool is_typedef = ParseSpecifiers(base);
    if (Accept(";")) return;  // struct definition or bare specifier
    if (is_typedef) {
      while (true) {
        TypeInfo t = base;
        std::string name;
        int line = 0;
        ParseDeclarator(t, name, line, nullptr);
        typedefs_.insert(name);
        if (Accept(";")) return;
        Expect(",");
      }
    }
    while (true) {
      VarDecl d;
      d.type = base;
      std::vector<VarDecl> params;
      ParseDeclarator(d.type, d.name, d.line, &params);
      if (d.type.is_function) {
        tu.declared_functions.insert(d.name);
        if (Is("{")) {
          FunctionDef f;
          f.name = d.name;
          f.return_type = d.type;
          f.return_type.is_function = false;
          f.params = std::move(params);
          f.line = d.line;
          f.body_begin = Peek().line;
          f.body = ParseCompound();
          f.body_end = f.body.end_line;
          tu.functions.push_back(std::move(f));
          return;
        }
      } else {
        if (Accept("=")) d.init = ParseInitializer();
        tu.globals.push_back(std::move(d));
      }
      if (Accept(";")) return;
      Expect(",");
    }
  }

  Stmt ParseCompound() {
    Stmt s;
    s.kind = Stmt::Kind::kCompound;
    s.starts_line = Peek().first_on_line;
    s.line = Peek().line;
    Expect("{");
    while (!Is("}")) {
      if (AtEnd()) Fail(s.line, "unterminated block");
      s.children.push_back(ParseStatement());
    }
    s.end_line = Peek().line;
    Next();
    return s;
  }

  Stmt ParseStatement() {
    const Token& t = Peek();
    Stmt s;
    s.line = t.line;
    s.starts_line = t.first_on_line;
    if (Is("{")) return ParseCompound();
    if (Accept(";")) {
      s.kind = Stmt::Kind::kEmpty;
    } else if (Accept("if")) {
      s.kind = Stmt::Kind::kIf;
      Expect("(");
      s.expr = ParseExpr();
      Expect(")");
      s.children.push_back(ParseStatement());
      if (Accept("else")) s.children.push_back(ParseStatement());
    } else if (Accept("while")) {
      s.kind = Stmt::Kind::kWhile;
      Expect("(");
      s.expr = ParseExpr();
      Expect(")");
      s.children.push_back(ParseStatement());
    } else if (Accept("do")) {
      s.kind = Stmt::Kind::kDo;
      s.children.push_back(ParseStatement());
      Expect("while");
      Expect("(");
      s.expr = ParseExpr();
      Expect(")");
      Expect(";");
    } else if (Accept("for")) {
      s.kind = Stmt::Kind::kFor;
      Expect("(");
      if (!Accept(";")) {
        if (IsTypeStart()) {
          TypeInfo base;
          ParseSpecifiers(base);
          s.decls = ParseInitDeclarators(base);
        } else {
          s.init = ParseExpr();
          Expect(";");
        }
      }
      if (!Accept(";")) {
        s.expr = ParseExpr();
        Expect(";");
      }
      if (!Accept(")")) {
        s.step = ParseExpr();
        Expect(")");
      }
      s.children.push_back(ParseStatement());
    } else if (Accept("switch")) {
      s.kind = Stmt::Kind::kSwitch;
      Expect("(");
      s.expr = ParseExpr();
      Expect(")");
      s.children.push_back(ParseStatement());
    } else if (Accept("case")) {
      s.kind = Stmt::Kind::kCase;
      s.expr = ParseConditional();
      Expect(":");
      s.children.push_back(ParseStatement());
    } else if (Is("default") && Peek(1).text == ":") {
      Next();
      Next();
      s.kind = Stmt::Kind::kDefault;
      s.children.push_back(ParseStatement());
    } else if (Accept("return")) {
      s.kind = Stmt::Kind::kReturn;
      if (!Is(";")) s.expr = ParseExpr();
      Expect(";");
    } else if (Accept("goto")) {
      s.kind = Stmt::Kind::kGoto;
      s.label = ExpectIdent();
      Expect(";");
    } else if (Accept("break")) {
      s.kind = Stmt::Kind::kBreak;
      Expect(";");
    } else if (Accept("continue")) {
      s.kind = Stmt::Kind::kContinue;
      Expect(";");
    } else if (t.kind == Token::Kind::kIdent && Peek(1).text == ":" &&
               !IsTypeStart()) {
      s.kind = Stmt::Kind::kLabel;
      s.label = Next().text;
      Next();
      if (Is("}")) {
        s.end_line = PrevLine();
        return s;  // label at the end of a block (C23 style)
      }
      s.children.push_back(ParseStatement());
    } else if (IsTypeStart()) {
      s.kind = Stmt::Kind::kDecl;
      TypeInfo base;
      if (ParseSpecifiers(base)) Fail(s.line, "block-scope typedef");
      if (Accept(";")) {
        s.end_line = PrevLine();
        return s;
      }
      s.decls = ParseInitDeclarators(base);
    } else {
      s.kind = Stmt::Kind::kExpr;
      s.expr = ParseExpr();
      Expect(";");
    }
    s.end_line = PrevLine();
    return s;
  }

  // ---- expressions ----

  Expr ParseExpr() {
    Expr lhs = ParseAssign();
    while (Is(",")) {
      Expr c;
      c.kind = Expr::Kind::kComma;
      c.line = Next().line;
      c.kids.push_back(std::move(lhs));
      c.kids.push_back(ParseAssign());
      lhs = std::move(c);
    }
    return lhs;
  }

  Expr ParseAssign() {
    Expr lhs = ParseConditional();
    static const std::set<std::string> kOps = {"=",  "+=", "-=",  "*=",
                                               "/=", "%=", "<<=", ">>=",
                                               "&=", "^=", "|="};
    if (Peek().kind == Token::Kind::kPunct && kOps.count(Peek().text)) {
      Expr a;
      a.kind = Expr::Kind::kAssign;
      a.line = Peek().line;
      a.text = Next().text;
      a.kids.push_back(std::move(lhs));
      a.kids.push_back(ParseAssign());
      return a;
    }
    return lhs;
  }

  Expr ParseConditional() {
    Expr cond = ParseBinary(1);
    if (Is("?")) {
      Expr t;
      t.kind = Expr::Kind::kTernary;
      t.line = Next().line;
      t.kids.push_back(std::move(cond));
      t.kids.push_back(ParseExpr());
      Expect(":");
      t.kids.push_back(ParseConditional());
      return t;
    }
    return cond;
  }

  static int Precedence(const Token& t) {
    if (t.kind != Token::Kind::kPunct) return 0;
    static const std::map<std::string, int> kPrec = {
        {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},
        {"==", 6}, {"!=", 6}, {"<", 7},  {">", 7},  {"<=", 7},
        {">=", 7}, {"<<", 8}, {">>", 8}, {"+", 9},  {"-", 9},
        {"*", 10}, {"/", 10}, {"%", 10}};
    auto it = kPrec.find(t.text);
    return it == kPrec.end() ? 0 : it->second;
  }

  Expr ParseBinary(int min_prec) {
    Expr lhs = ParseUnary();
    while (true) {
      int prec = Precedence(Peek());
      if (prec < min_prec || prec == 0) return lhs;
      Expr b;
      b.kind = Expr::Kind::kBinary;
      b.line = Peek().line;
      b.text = Next().text;
      b.kids.push_back(std::move(lhs));
      b.kids.push_back(ParseBinary(prec + 1));
      lhs = std::move(b);
    }
  }

  std::string ParseTypeName() {
    TypeInfo t;
    ParseSpecifiers(t);
    std::string name;
    int line = 0;
    ParseDeclarator(t, name, line, nullptr, /*abstract=*/true);
    std::string out = t.base;
    if (t.is_volatile) out = "volatile " + out;
    if (t.is_const) out = "const " + out;
    if (t.pointer_depth) out += ' ' + std::string(t.pointer_depth, '*');
    return out;
  }

  Expr ParseUnary() {
    const Token& t = Peek();
    int line = t.line;
    if (t.kind == Token::Kind::kPunct &&
        (t.text == "++" || t.text == "--" || t.text == "&" || t.text == "*" ||
         t.text == "+" || t.text == "-" || t.text == "~" || t.text == "!")) {
      Expr u;
      u.kind = Expr::Kind::kUnary;
      u.line = line;
      u.text = Next().text;
      u.kids.push_back(ParseUnary());
      return u;
    }
    if (Is("sizeof")) {
      Next();
      Expr s;
      s.kind = Expr::Kind::kSizeof;
      s.line = line;
      if (Is("(") && IsTypeStart(1)) {
        Next();
        s.text = ParseTypeName();
        Expect(")");
      } else {
        s.kids.push_back(ParseUnary());
      }
      return s;
    }
    if (Is("(") && IsTypeStart(1)) {
      Next();
      Expr c;
      c.kind = Expr::Kind::kCast;
      c.line = line;
      c.text = ParseTypeName();
      Expect(")");
      if (Is("{")) Fail(line, "compound literals");
      c.kids.push_back(ParseUnary());
      return c;
    }
    return ParsePostfix();
  }

  Expr ParsePostfix() {
    Expr e = ParsePrimary();
    while (true) {
      if (Is("[")) {
        Expr ix;
        ix.kind = Expr::Kind::kIndex;
        ix.line = Next().line;
        ix.kids.push_back(std::move(e));
        ix.kids.push_back(ParseExpr());
        Expect("]");
        e = std::move(ix);
      } else if (Is("(")) {
        Expr call;
        call.kind = Expr::Kind::kCall;
        call.line = Next().line;
        call.kids.push_back(std::move(e));
        if (!Accept(")")) {
          while (true) {
            call.kids.push_back(ParseAssign());
            if (Accept(")")) break;
            Expect(",");
          }
        }
        e = std::move(call);
      } else if (Is(".") || Is("->")) {
        Expr m;
        m.kind = Expr::Kind::kMember;
        m.line = Peek().line;
        m.text = Next().text;
        m.field = ExpectIdent();
        m.kids.push_back(std::move(e));
        e = std::move(m);
      } else if (Is("++") || Is("--")) {
        Expr p;
        p.kind = Expr::Kind::kPostfix;
        p.line = Peek().line;
        p.text = Next().text;
        p.kids.push_back(std::move(e));
        e = std::move(p);
      } else {
        return e;
      }
    }
  }

  Expr ParsePrimary() {
    const Token& t = Peek();
    Expr e;
    e.line = t.line;
    switch (t.kind) {
      case Token::Kind::kIdent:
        if (TypeKeywords().count(t.text)) {
          Fail(t.line, "unexpected keyword '" + t.text + "'");
        }
        e.kind = Expr::Kind::kIdent;
        e.text = Next().text;
        return e;
      case Token::Kind::kNumber:
        e.kind = Expr::Kind::kNumber;
        e.text = Next().text;
        return e;
      case Token::Kind::kChar:
        e.kind = Expr::Kind::kChar;
        e.text = Next().text;
        return e;
      case Token::Kind::kString:
        e.kind = Expr::Kind::kString;
        e.text = Next().text;
        while (Peek().kind == Token::Kind::kString) e.text += Next().text;
        return e;
      case Token::Kind::kPunct:
        if (Accept("(")) {
          if (Is("{")) Fail(t.line, "statement expressions");
          Expr inner = ParseExpr();
          Expect(")");
          return inner;
        }
        [[fallthrough]];
      default:
        Fail(t.line, "unexpected token '" + t.text + "'");
    }
  }
};

}  // namespace

TranslationUnit Parse(std::string_view source) {
  Parser p(Lex(source));
  return p.ParseUnit();
}

void VisitExprs(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& k : e.kids) VisitExprs(k, fn);
}

void VisitStmts(const Stmt& s, const std::function<void(const Stmt&)>& fn) {
  fn(s);
  for (const auto& c : s.children) VisitStmts(c, fn);
}

std::set<std::string> Identifiers(const Expr& e) {
  std::set<std::string> out;
  VisitExprs(e, [&](const Expr& x) {
    if (x.kind == Expr::Kind::kIdent) out.insert(x.text);
  });
  return out;
}

std::string Render(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kIdent:
    case Expr::Kind::kNumber:
    case Expr::Kind::kString:
    case Expr::Kind::kChar:
      return e.text;
    case Expr::Kind::kUnary:
      return e.text + Render(e.kids[0]);
    case Expr::Kind::kPostfix:
      return Render(e.kids[0]) + e.text;
    case Expr::Kind::kBinary:
      return "(" + Render(e.kids[0]) + " " + e.text + " " +
             Render(e.kids[1]) + ")";
    case Expr::Kind::kAssign:
      return Render(e.kids[0]) + " " + e.text + " " + Render(e.kids[1]);
    case Expr::Kind::kTernary:
      return "(" + Render(e.kids[0]) + " ? " + Render(e.kids[1]) + " : " +
             Render(e.kids[2]) + ")";
    case Expr::Kind::kCall: {
      std::string out = Render(e.kids[0]) + "(";
      for (size_t i = 1; i < e.kids.size(); ++i) {
        if (i > 1) out += ", ";
        out += Render(e.kids[i]);
      }
      return out + ")";
    }
    case Expr::Kind::kIndex:
      return Render(e.kids[0]) + "[" + Render(e.kids[1]) + "]";
    case Expr::Kind::kMember:
      return Render(e.kids[0]) + e.text + e.field;
    case Expr::Kind::kCast:
      return "(" + e.text + ")" + Render(e.kids[0]);
    case Expr::Kind::kComma:
      return "(" + Render(e.kids[0]) + ", " + Render(e.kids[1]) + ")";
    case Expr::Kind::kSizeof:
      return e.kids.empty() ? "sizeof(" + e.text + ")"
                            : "sizeof " + Render(e.kids[0]);
    case Expr::Kind::kInitList: {
      std::string out = "{";
      for (size_t i = 0; i < e.kids.size(); ++i) {
        if (i) out += ", ";
        out += Render(e.kids[i]);
      }
      return out + "}";
    }
  }
  return "?";
}

}  // namespace debugholes::c
