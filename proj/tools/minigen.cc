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

// minigen: a small random C program generator with a csmith-like command
// line, for machines without csmith. Output is deterministic in the seed,
// free of undefined behavior by construction (unsigned arithmetic, masked
// indices, guarded division, constant loop bounds, acyclic calls) and
// prints a checksum of its globals.
//
//   minigen --seed N [--max-funcs N] [--max-block-depth N]
//           [--max-expr-complexity N] [--no-arrays] [--no-volatiles]
//           [--no-pointers] [--no-consts] [...]
//
// Unknown csmith options are accepted and ignored.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Options {
  uint64_t seed = 0;
  int max_funcs = 3;
  int max_block_depth = 2;
  int max_expr = 3;
  bool arrays = true;
  bool volatiles = true;
  bool pointers = true;
  bool consts = true;
};

struct Var {
  std::string name;
  std::string type;  // uint8_t, uint16_t, uint32_t, uint64_t
  bool is_array = false;
  int size = 0;  // power of two
  bool is_volatile = false;
};

class Generator {
 public:
  explicit Generator(const Options& o) : opt_(o), rng_(o.seed) {}

  std::string Run() {
    out_ << "#include <stdint.h>\n#include <stdio.h>\n\n";
    int nglobals = Pick(4, 7);
    for (int i = 0; i < nglobals; ++i) {
      Var g;
      g.name = "g_" + std::to_string(++counter_);
      g.type = ScalarType();
      if (opt_.arrays && Chance(30)) {
        g.is_array = true;
        g.size = Chance(50) ? 8 : 16;
      } else if (opt_.volatiles && Chance(15)) {
        g.is_volatile = true;
      }
      globals_.push_back(g);
      out_ << "static " << (g.is_volatile ? "volatile " : "") << g.type << " "
           << g.name;
      if (g.is_array) {
        out_ << "[" << g.size << "] = {";
        for (int k = 0; k < g.size; ++k) out_ << (k ? ", " : "") << Constant(g.type);
        out_ << "};\n";
      } else {
        out_ << " = " << Constant(g.type) << ";\n";
      }
    }
    out_ << "\n";
    nfuncs_ = Pick(1, std::max(1, opt_.max_funcs));
    second_param_type_.resize(nfuncs_ + 1);
    for (int f = 1; f <= nfuncs_; ++f) second_param_type_[f] = ScalarType();
    for (int f = nfuncs_; f >= 1; --f) EmitFunction(f);
    EmitMain();
    return out_.str();
  }

 private:
  Options opt_;
  std::mt19937_64 rng_;
  std::ostringstream out_;
  std::vector<Var> globals_;
  std::vector<Var> scope_;  // params and locals of the current function
  int counter_ = 0;
  int nfuncs_ = 0;
  int current_func_ = 0;
  std::vector<std::string> loop_vars_;
  std::vector<std::string> second_param_type_;  // by function index

  int Pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool Chance(int percent) { return Pick(1, 100) <= percent; }

  std::string ScalarType() {
    static const char* kTypes[] = {"uint8_t", "uint16_t", "uint32_t", "uint32_t",
                                   "uint64_t"};
    return kTypes[Pick(0, 4)];
  }

  // Constants always fit `type`, so initializers never truncate.
  std::string Constant(const std::string& type = "uint32_t") {
    switch (Pick(0, 3)) {
      case 0: return std::to_string(Pick(0, 9)) + "u";
      case 1: return std::to_string(Pick(10, 255)) + "u";
      case 2: {
        uint32_t v = static_cast<uint32_t>(rng_());
        if (type == "uint8_t") v &= 0xffu;
        if (type == "uint16_t") v &= 0xffffu;
        return "0x" + Hex(v) + "u";
      }
      default: return std::to_string(Pick(0, 1)) + "u";
    }
  }

  static bool Narrow(const std::string& type) {
    return type == "uint8_t" || type == "uint16_t";
  }

  // Right-hand side for a store into `type`; narrowing is explicit.
  std::string Store(const std::string& type, const std::string& expr) {
    return Narrow(type) ? "(" + type + ")" + expr : expr;
  }

  std::string AssignOp(const Var& v, const char* const* ops, int n) {
    return Narrow(v.type) ? "=" : ops[Pick(0, n - 1)];
  }

  static std::string Hex(uint32_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
  }

  std::string Indent(int depth) { return std::string(4 * depth, ' '); }

  // A value read, widened to uint32_t so arithmetic stays unsigned.
  std::string Read(const Var& v, int depth) {
    if (v.is_array) {
      return "(uint32_t)" + v.name + "[(" + Expr(depth + 1) + ") & " +
             std::to_string(v.size - 1) + "u]";
    }
    if (v.type == "uint32_t") return v.name;
    return "(uint32_t)" + v.name;
  }

  std::string Leaf(int depth) {
    int r = Pick(0, 9);
    if (r < 5 && !scope_.empty()) {
      return Read(scope_[Pick(0, static_cast<int>(scope_.size()) - 1)], depth);
    }
    if (r < 8) {
      const Var& g = globals_[Pick(0, static_cast<int>(globals_.size()) - 1)];
      if (!g.is_array || depth < opt_.max_expr) return Read(g, depth);
    }
    return Constant();
  }

  std::string Expr(int depth) {
    if (depth >= opt_.max_expr || Chance(35)) return Leaf(depth);
    std::string a = Expr(depth + 1), b = Expr(depth + 1);
    switch (Pick(0, 9)) {
      case 0: return "(" + a + " + " + b + ")";
      case 1: return "(" + a + " - " + b + ")";
      case 2: return "(" + a + " * " + b + ")";
      case 3: return "(" + a + " ^ " + b + ")";
      case 4: return "(" + a + " & " + b + ")";
      case 5: return "(" + a + " | " + b + ")";
      case 6: return "(" + a + " << " + std::to_string(Pick(1, 15)) + ")";
      case 7: return "(" + a + " >> " + std::to_string(Pick(1, 15)) + ")";
      case 8: return "(" + b + " != 0u ? " + a + " / " + b + " : " + a + ")";
      default: return "(uint32_t)(" + a + " < " + b + ")";
    }
  }

  std::string Condition() {
    static const char* kOps[] = {"<", ">", "==", "!=", "<=", ">="};
    return Expr(1) + " " + kOps[Pick(0, 5)] + " " + Expr(1);
  }

  const Var* PickGlobal(bool want_array) {
    std::vector<const Var*> c;
    for (const auto& g : globals_) {
      if (g.is_array == want_array) c.push_back(&g);
    }
    if (c.empty()) return nullptr;
    return c[Pick(0, static_cast<int>(c.size()) - 1)];
  }

  const Var* PickLocal() {
    std::vector<const Var*> c;
    for (const auto& v : scope_) {
      if (!v.is_array && v.name.rfind("l_", 0) == 0) c.push_back(&v);
    }
    if (c.empty()) return nullptr;
    return c[Pick(0, static_cast<int>(c.size()) - 1)];
  }

  std::string IndexExpr(const Var& arr) {
    std::string idx = loop_vars_.empty() || Chance(40)
                          ? Expr(2)
                          : "(uint32_t)" + loop_vars_[Pick(0, static_cast<int>(loop_vars_.size()) - 1)];
    return "(" + idx + ") & " + std::to_string(arr.size - 1) + "u";
  }

  void Statement(int depth, int block_depth) {
    std::string ind = Indent(depth);
    int r = Pick(0, 99);
    if (r < 25) {
      if (const Var* g = PickGlobal(false)) {
        static const char* kOps[] = {"=", "=", "+=", "^=", "|="};
        out_ << ind << g->name << " " << AssignOp(*g, kOps, 5) << " "
             << Store(g->type, Expr(0)) << ";\n";
        return;
      }
    }
    if (r < 40) {
      if (const Var* a = PickGlobal(true)) {
        out_ << ind << a->name << "[" << IndexExpr(*a) << "] = " << Store(a->type, Expr(0))
             << ";\n";
        return;
      }
    }
    if (r < 62) {
      if (const Var* l = PickLocal()) {
        static const char* kOps[] = {"=", "=", "+=", "-=", "^="};
        out_ << ind << l->name << " " << AssignOp(*l, kOps, 5) << " "
             << Store(l->type, Expr(0)) << ";\n";
        return;
      }
    }
    if (r < 72 && block_depth < opt_.max_block_depth) {
      out_ << ind << "if (" << Condition() << ")\n" << ind << "{\n";
      Block(depth + 1, block_depth + 1, Pick(1, 3));
      out_ << ind << "}\n";
      if (Chance(40)) {
        out_ << ind << "else\n" << ind << "{\n";
        Block(depth + 1, block_depth + 1, Pick(1, 3));
        out_ << ind << "}\n";
      }
      return;
    }
    if (r < 84 && block_depth < opt_.max_block_depth) {
      std::string iv = "l_" + std::to_string(++counter_);
      out_ << ind << "int " << iv << ";\n";
      out_ << ind << "for (" << iv << " = 0; " << iv << " < " << Pick(2, 6) << "; "
           << iv << "++)\n" << ind << "{\n";
      loop_vars_.push_back(iv);
      Block(depth + 1, block_depth + 1, Pick(1, 4));
      loop_vars_.pop_back();
      out_ << ind << "}\n";
      return;
    }
    if (r < 92 && current_func_ < nfuncs_) {
      if (const Var* l = PickLocal()) {
        int callee = Pick(current_func_ + 1, nfuncs_);
        out_ << ind << l->name << " = " << Store(l->type, "func_" + std::to_string(callee))
             << "(" << CallArgs(callee) << ");\n";
        return;
      }
    }
    if (opt_.pointers && r < 96) {
      if (const Var* g = PickGlobal(false)) {
        if (!g->is_volatile) {
          std::string p = "l_" + std::to_string(++counter_);
          out_ << ind << g->type << " *" << p << " = &" << g->name << ";\n";
          out_ << ind << "*" << p << " = " << Store(g->type, Expr(1)) << ";\n";
          return;
        }
      }
    }
    if (const Var* g = PickGlobal(false)) {
      out_ << ind << g->name << " = " << Store(g->type, Expr(0)) << ";\n";
    }
  }

  std::string CallArgs(int callee) {
    return Expr(2) + ", " + Store(second_param_type_[callee], Expr(2));
  }

  void Block(int depth, int block_depth, int count) {
    size_t mark = scope_.size();
    int nlocals = Pick(0, 2);
    for (int i = 0; i < nlocals; ++i) DeclareLocal(depth);
    for (int i = 0; i < count; ++i) Statement(depth, block_depth);
    scope_.resize(mark);
  }

  void DeclareLocal(int depth) {
    Var v;
    v.name = "l_" + std::to_string(++counter_);
    v.type = ScalarType();
    std::string init = opt_.consts && Chance(40) ? Constant(v.type) : Store(v.type, Expr(1));
    out_ << Indent(depth) << v.type << " " << v.name << " = " << init << ";\n";
    scope_.push_back(v);
  }

  void EmitFunction(int index) {
    current_func_ = index;
    scope_.clear();
    Var p1{"p_" + std::to_string(++counter_), "uint32_t"};
    Var p2{"p_" + std::to_string(++counter_), second_param_type_[index]};
    out_ << "static uint32_t func_" << index << "(uint32_t " << p1.name << ", "
         << p2.type << " " << p2.name << ")\n{\n";
    scope_ = {p1, p2};
    int nlocals = Pick(2, 5);
    for (int i = 0; i < nlocals; ++i) DeclareLocal(1);
    int nstmts = Pick(4, 10);
    for (int i = 0; i < nstmts; ++i) Statement(1, 0);
    out_ << "    return " << Expr(1) << ";\n}\n\n";
  }

  void EmitMain() {
    current_func_ = 0;
    scope_.clear();
    out_ << "int main(void)\n{\n";
    DeclareLocal(1);
    DeclareLocal(1);
    if (nfuncs_ >= 1) {
      const Var* l = PickLocal();
      out_ << "    " << l->name << " = " << Store(l->type, "func_1") << "(" << CallArgs(1)
           << ");\n";
    }
    int nstmts = Pick(2, 5);
    for (int i = 0; i < nstmts; ++i) Statement(1, 0);
    out_ << "    uint32_t crc = 0u;\n";
    for (const auto& g : globals_) {
      if (g.is_array) {
        out_ << "    for (int i = 0; i < " << g.size << "; i++)\n"
             << "        crc = crc * 31u + (uint32_t)" << g.name << "[i];\n";
      } else {
        out_ << "    crc = crc * 31u + (uint32_t)" << g.name << ";\n";
      }
    }
    for (const auto& v : scope_) {
      out_ << "    crc = crc * 31u + (uint32_t)" << v.name << ";\n";
    }
    out_ << "    printf(\"checksum = %u\\n\", (unsigned)crc);\n"
         << "    return 0;\n}\n";
  }
};

}  // namespace

int main(int argc, char** argv) {
  Options o;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "minigen: " << a << " needs a value\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (a == "--seed" || a == "-s") {
      o.seed = std::stoull(next());
    } else if (a == "--max-funcs") {
      o.max_funcs = std::stoi(next());
    } else if (a == "--max-block-depth") {
      o.max_block_depth = std::stoi(next());
    } else if (a == "--max-expr-complexity") {
      o.max_expr = std::max(1, std::min(4, std::stoi(next())));
    } else if (a == "--no-arrays") {
      o.arrays = false;
    } else if (a == "--no-volatiles") {
      o.volatiles = false;
    } else if (a == "--no-pointers") {
      o.pointers = false;
    } else if (a == "--no-consts") {
      o.consts = false;
    } else if (a.rfind("--max-", 0) == 0) {
      next();  // csmith limit we do not model
    } else if (a.rfind("--", 0) == 0) {
      // Boolean csmith switch we do not model.
    } else {
      std::cerr << "minigen: unexpected argument " << a << "\n";
      return 2;
    }
  }
  std::cout << Generator(o).Run();
  return 0;
}
