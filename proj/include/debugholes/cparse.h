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

// Parser for the C subset emitted by random program generators: C89/C99
// declarations, structured statements, goto/labels and full expressions.
// Preprocessor lines are skipped, not expanded. Function pointers, K&R
// definitions and GNU extensions are rejected with kUnsupportedSyntax.

#ifndef DEBUGHOLES_CPARSE_H_
#define DEBUGHOLES_CPARSE_H_

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace debugholes::c {

struct Token {
  enum class Kind { kIdent, kNumber, kString, kChar, kPunct, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  int line = 0;
  bool first_on_line = false;
};

std::vector<Token> Lex(std::string_view source);

struct Expr {
  enum class Kind {
    kIdent,
    kNumber,
    kString,
    kChar,
    kUnary,    // text = operator; kids[0]
    kPostfix,  // text = "++" or "--"; kids[0]
    kBinary,   // text = operator; kids[0], kids[1]
    kAssign,   // text = "=", "+=", ...; kids[0] = lhs, kids[1] = rhs
    kTernary,  // kids[0] ? kids[1] : kids[2]
    kCall,     // kids[0] = callee, kids[1..] = arguments
    kIndex,    // kids[0][kids[1]]
    kMember,   // kids[0] text field; text = "." or "->"
    kCast,     // (text) kids[0]
    kComma,    // kids[0], kids[1]
    kSizeof,   // kids empty => sizeof(type in text)
    kInitList  // { kids... }
  };
  Kind kind = Kind::kIdent;
  std::string text;
  std::string field;
  std::vector<Expr> kids;
  int line = 0;
};

struct TypeInfo {
  std::string base;  // "int", "uint8_t", "struct S0", ...
  bool is_const = false;
  bool is_volatile = false;
  bool is_static = false;
  bool is_extern = false;
  bool is_struct = false;  // struct or union, by value
  int pointer_depth = 0;
  bool is_array = false;
  bool is_function = false;

  bool IsPointer() const { return pointer_depth > 0 && !is_array; }
  bool IsFloating() const;
  // Arithmetic or pointer object, i.e. something a call can take by value
  // as an int.
  bool IsScalar() const;
};

struct VarDecl {
  std::string name;
  TypeInfo type;
  int line = 0;
  std::optional<Expr> init;
};

struct Stmt {
  enum class Kind {
    kCompound,
    kDecl,
    kExpr,
    kIf,
    kFor,
    kWhile,
    kDo,
    kReturn,
    kGoto,
    kLabel,
    kBreak,
    kContinue,
    kEmpty,
    kSwitch,
    kCase,
    kDefault
  };
  Kind kind = Kind::kEmpty;
  int line = 0;
  int end_line = 0;
  bool starts_line = false;  // first token of the statement starts its line
  // kCompound: block items. kIf: [then, else?]. Loops and switch: [body].
  // kLabel, kCase, kDefault: [labeled statement].
  std::vector<Stmt> children;
  std::vector<VarDecl> decls;  // kDecl, and declarations in a for-init
  std::optional<Expr> expr;    // expression, condition or return value
  std::optional<Expr> init;    // for-init expression
  std::optional<Expr> step;    // for-step expression
  std::string label;           // goto target or label name
};

struct FunctionDef {
  std::string name;
  TypeInfo return_type;
  std::vector<VarDecl> params;
  Stmt body;
  int line = 0;        // line of the declarator
  int body_begin = 0;  // line of the opening brace
  int body_end = 0;    // line of the closing brace
};

struct TranslationUnit {
  std::vector<VarDecl> globals;
  std::vector<FunctionDef> functions;
  std::set<std::string> typedef_names;
  std::set<std::string> declared_functions;  // prototypes and definitions
  // Lines whose first token starts a top-level declaration or definition.
  std::vector<int> toplevel_lines;

  const FunctionDef* FindFunction(std::string_view name) const;
  const VarDecl* FindGlobal(std::string_view name) const;
};

// Throws Error(kUnsupportedSyntax) on anything outside the subset.
TranslationUnit Parse(std::string_view source);

// Pre-order traversal helpers.
void VisitExprs(const Expr& e, const std::function<void(const Expr&)>& fn);
void VisitStmts(const Stmt& s, const std::function<void(const Stmt&)>& fn);

// Identifier names referenced anywhere in `e` (variables and callees).
std::set<std::string> Identifiers(const Expr& e);

// Source-like rendering used in reports and construct signatures.
std::string Render(const Expr& e);

}  // namespace debugholes::c

#endif  // DEBUGHOLES_CPARSE_H_
