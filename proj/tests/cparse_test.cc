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

#include <gtest/gtest.h>

#include "debugholes/cparse.h"
#include "debugholes/program.h"

namespace debugholes {
namespace {

constexpr const char* kSource =
    "#include <stdint.h>\n"                 // 1
    "static volatile int32_t g_1 = 5;\n"    // 2
    "static uint8_t g_2[4];\n"              // 3
    "static int f(int p, char *q) {\n"      // 4
    "  int a = p + 1, b;\n"                 // 5
    "  for (int i = 0; i < 4; i++) {\n"     // 6
    "    b = g_2[i & 3] * a;\n"             // 7
    "  }\n"                                 // 8
    "  return a ? b : (int)*q;\n"           // 9
    "}\n"                                   // 10
    "int main(void) { char c = 1; return f(g_1, &c); }\n";

TEST(CParse, LexTracksLines) {
  auto toks = c::Lex("a\n  b + 0x1f\n\"s\"");
  ASSERT_GE(toks.size(), 5u);
  EXPECT_EQ(toks[0].line, 1);
  EXPECT_EQ(toks[1].text, "b");
  EXPECT_EQ(toks[1].line, 2);
  EXPECT_TRUE(toks[1].first_on_line);
  EXPECT_EQ(toks[3].kind, c::Token::Kind::kNumber);
  EXPECT_EQ(toks[4].kind, c::Token::Kind::kString);
}

TEST(CParse, GlobalsAndFunctions) {
  c::TranslationUnit tu = c::Parse(kSource);
  const c::VarDecl* g1 = tu.FindGlobal("g_1");
  ASSERT_NE(g1, nullptr);
  EXPECT_TRUE(g1->type.is_volatile);
  EXPECT_TRUE(g1->type.is_static);
  EXPECT_TRUE(tu.FindGlobal("g_2")->type.is_array);
  const c::FunctionDef* f = tu.FindFunction("f");
  ASSERT_NE(f, nullptr);
  ASSERT_EQ(f->params.size(), 2u);
  EXPECT_TRUE(f->params[1].type.IsPointer());
  EXPECT_EQ(f->body_begin, 4);
  EXPECT_EQ(f->body_end, 10);
}

TEST(CParse, ExpressionShapes) {
  c::TranslationUnit tu = c::Parse(kSource);
  std::vector<std::string> rendered;
  c::VisitStmts(tu.FindFunction("f")->body, [&](const c::Stmt& s) {
    if (s.kind == c::Stmt::Kind::kExpr && s.expr) rendered.push_back(c::Render(*s.expr));
  });
  ASSERT_EQ(rendered.size(), 1u);
  EXPECT_NE(rendered[0].find("g_2[(i & 3)]"), std::string::npos) << rendered[0];
  c::TranslationUnit again = c::Parse("int x; void h(void) { x = " + rendered[0] + "; }");
  EXPECT_NE(again.FindFunction("h"), nullptr);
}

TEST(CParse, FunctionFactsScopes) {
  TestProgram p = MakeProgram(kSource, "/tmp/p.c");
  EXPECT_EQ(p.id.size(), 64u);
  const FunctionFacts* f = p.FindFunction("f");
  ASSERT_NE(f, nullptr);
  std::map<std::string, LocalVar> locals;
  for (const auto& l : f->locals) locals[l.name] = l;
  ASSERT_TRUE(locals.count("a") && locals.count("b") && locals.count("i"));
  EXPECT_TRUE(locals["a"].has_initializer);
  EXPECT_FALSE(locals["b"].has_initializer);
  EXPECT_EQ(locals["i"].decl_line, 6);
  EXPECT_LE(locals["i"].scope_end_line, 8);
  EXPECT_EQ(p.FunctionAtLine(7), f);
}

TEST(CParse, IdentifiersOfExpression) {
  c::TranslationUnit tu = c::Parse("int g; int k(int a, int b) { g = a * (b + 2); return g; }");
  std::set<std::string> ids;
  c::VisitStmts(tu.functions[0].body, [&](const c::Stmt& s) {
    if (s.kind == c::Stmt::Kind::kExpr) ids = c::Identifiers(*s.expr);
  });
  EXPECT_EQ(ids, (std::set<std::string>{"g", "a", "b"}));
}

}  // namespace
}  // namespace debugholes
