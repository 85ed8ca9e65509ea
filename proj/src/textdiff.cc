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

#include "debugholes/textdiff.h"

#include <algorithm>
#include <vector>

#include "debugholes/util.h"

namespace debugholes {

namespace {

enum class Op { kKeep, kDel, kAdd };

// Myers' O(ND) shortest edit script, recovered from saved frontiers.
std::vector<std::pair<Op, int>> EditScript(const std::vector<std::string>& a,
                                           const std::vector<std::string>& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  const int max = n + m;
  const int offset = max + 1;
  std::vector<int> v(static_cast<size_t>(2 * max + 3), 0);
  std::vector<std::vector<int>> trace;
  int final_d = 0;
  for (int d = 0; d <= max; ++d) {
    trace.push_back(v);
    bool done = false;
    for (int k = -d; k <= d; k += 2) {
      int x;
      if (k == -d || (k != d && v[offset + k - 1] < v[offset + k + 1])) {
        x = v[offset + k + 1];
      } else {
        x = v[offset + k - 1] + 1;
      }
      int y = x - k;
      while (x < n && y < m && a[x] == b[y]) {
        ++x;
        ++y;
      }
      v[offset + k] = x;
      if (x >= n && y >= m) {
        done = true;
        break;
      }
    }
    if (done) {
      final_d = d;
      break;
    }
  }
  std::vector<std::pair<Op, int>> script;  // (op, index into a or b)
  int x = n, y = m;
  for (int d = final_d; d > 0; --d) {
    const std::vector<int>& pv = trace[static_cast<size_t>(d)];
    int k = x - y;
    int prev_k;
    if (k == -d || (k != d && pv[offset + k - 1] < pv[offset + k + 1])) {
      prev_k = k + 1;
    } else {
      prev_k = k - 1;
    }
    int prev_x = pv[offset + prev_k];
    int prev_y = prev_x - prev_k;
    while (x > prev_x && y > prev_y) {
      script.push_back({Op::kKeep, --x});
      --y;
    }
    if (x == prev_x) {
      script.push_back({Op::kAdd, --y});
    } else {
      script.push_back({Op::kDel, --x});
    }
  }
  while (x > 0 && y > 0) {
    script.push_back({Op::kKeep, --x});
    --y;
  }
  std::reverse(script.begin(), script.end());
  return script;
}

}  // namespace

std::string UnifiedDiff(std::string_view a_text, std::string_view b_text,
                        std::string_view label_a, std::string_view label_b,
                        int context) {
  std::vector<std::string> a = SplitLines(a_text);
  std::vector<std::string> b = SplitLines(b_text);
  if (a == b) return "";
  auto script = EditScript(a, b);
  // Line numbers of each script entry in both files.
  struct Row {
    Op op;
    int ai, bi;
  };
  std::vector<Row> rows;
  int ai = 0, bi = 0;
  for (const auto& [op, idx] : script) {
    rows.push_back({op, ai, bi});
    if (op != Op::kAdd) ++ai;
    if (op != Op::kDel) ++bi;
  }
  std::string out = "--- " + std::string(label_a) + "\n+++ " +
                    std::string(label_b) + "\n";
  size_t i = 0;
  while (i < rows.size()) {
    if (rows[i].op == Op::kKeep) {
      ++i;
      continue;
    }
    size_t start = i >= static_cast<size_t>(context) ? i - context : 0;
    size_t end = i;
    // Extend the hunk while changes are within 2*context of each other.
    size_t last_change = i;
    while (end < rows.size()) {
      if (rows[end].op != Op::kKeep) last_change = end;
      if (end - last_change > static_cast<size_t>(2 * context)) break;
      ++end;
    }
    end = std::min(rows.size(), last_change + context + 1);
    int a_count = 0, b_count = 0;
    for (size_t r = start; r < end; ++r) {
      if (rows[r].op != Op::kAdd) ++a_count;
      if (rows[r].op != Op::kDel) ++b_count;
    }
    out += "@@ -" + std::to_string(rows[start].ai + (a_count ? 1 : 0)) + "," +
           std::to_string(a_count) + " +" +
           std::to_string(rows[start].bi + (b_count ? 1 : 0)) + "," +
           std::to_string(b_count) + " @@\n";
    for (size_t r = start; r < end; ++r) {
      switch (rows[r].op) {
        case Op::kKeep: out += " " + a[static_cast<size_t>(rows[r].ai)]; break;
        case Op::kDel: out += "-" + a[static_cast<size_t>(rows[r].ai)]; break;
        case Op::kAdd: out += "+" + b[static_cast<size_t>(rows[r].bi)]; break;
      }
      out += "\n";
    }
    i = end;
  }
  return out;
}

}  // namespace debugholes
