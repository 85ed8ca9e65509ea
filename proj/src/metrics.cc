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

#include "debugholes/metrics.h"

#include <map>
#include <set>
#include <sstream>

#include "debugholes/common.h"

namespace debugholes {
namespace {

using LineKey = std::pair<std::string, int>;

std::set<LineKey> SteppedLines(const DebugTrace& t) {
  std::set<LineKey> out;
  for (const auto& r : t.records) out.insert({r.file, r.line});
  return out;
}

std::set<std::string> Available(const LineRecord& r) {
  std::set<std::string> out;
  for (const auto& [name, state] : r.observations) {
    if (state.tag == Availability::kAvailableWithValue) out.insert(name);
  }
  return out;
}

// First hit of each line; traces hold one record per line already.
std::map<LineKey, const LineRecord*> ByLine(const DebugTrace& t) {
  std::map<LineKey, const LineRecord*> out;
  for (const auto& r : t.records) out.emplace(LineKey{r.file, r.line}, &r);
  return out;
}

std::string Fmt(std::optional<double> v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << *v;
  return os.str();
}

}  // namespace

double LineCoverage(const DebugTrace& opt, const DebugTrace& o0) {
  std::set<LineKey> ref = SteppedLines(o0);
  if (ref.empty()) {
    throw Error(ErrorCode::kEmptyReference, "O0 trace has no records");
  }
  std::set<LineKey> got = SteppedLines(opt);
  if (got == ref) return 1.0;
  return static_cast<double>(got.size()) / static_cast<double>(ref.size());
}

std::vector<LineAvailability> AvailabilityByLine(const DebugTrace& opt,
                                                 const DebugTrace& o0) {
  std::vector<LineAvailability> out;
  auto opt_lines = ByLine(opt);
  for (const auto& [key, ref] : ByLine(o0)) {
    auto it = opt_lines.find(key);
    if (it == opt_lines.end()) continue;
    std::set<std::string> base = Available(*ref);
    if (base.empty()) continue;
    std::set<std::string> mine = Available(*it->second);
    LineAvailability la{key.first, key.second, 0, static_cast<int>(base.size())};
    for (const auto& v : base) la.available_both += mine.count(v) ? 1 : 0;
    out.push_back(la);
  }
  return out;
}

std::optional<double> VariableAvailability(const DebugTrace& opt,
                                           const DebugTrace& o0) {
  auto lines = AvailabilityByLine(opt, o0);
  if (lines.empty()) return std::nullopt;
  double sum = 0;
  for (const auto& l : lines) {
    sum += static_cast<double>(l.available_both) / l.available_o0;
  }
  return sum / static_cast<double>(lines.size());
}

MetricsRecord ComputeMetrics(const DebugTrace& opt, const DebugTrace& o0) {
  MetricsRecord r;
  r.program_id = opt.program_id;
  r.toolchain = opt.toolchain_id;
  r.opt_level = std::string(OptLevelName(opt.config.opt_level));
  r.line_coverage = LineCoverage(opt, o0);
  auto lines = AvailabilityByLine(opt, o0);
  for (const auto& l : lines) {
    r.ratio_sum += static_cast<double>(l.available_both) / l.available_o0;
  }
  r.ratio_lines = static_cast<int>(lines.size());
  if (r.ratio_lines > 0) {
    r.availability = r.ratio_sum / r.ratio_lines;
    r.product = r.line_coverage * *r.availability;
  }
  return r;
}

std::vector<AggregateRow> Aggregate(const std::vector<MetricsRecord>& records) {
  struct Acc {
    int programs = 0;
    double coverage = 0;
    double avail = 0;
    int avail_n = 0;
    double product = 0;
    double pooled_sum = 0;
    int pooled_n = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> groups;
  for (const auto& r : records) {
    Acc& a = groups[{r.toolchain, r.opt_level}];
    ++a.programs;
    a.coverage += r.line_coverage;
    if (r.availability) {
      a.avail += *r.availability;
      a.product += *r.product;
      ++a.avail_n;
    }
    a.pooled_sum += r.ratio_sum;
    a.pooled_n += r.ratio_lines;
  }
  std::vector<AggregateRow> out;
  for (const auto& [key, a] : groups) {
    AggregateRow row;
    row.toolchain = key.first;
    row.opt_level = key.second;
    row.programs = a.programs;
    row.line_coverage = a.coverage / a.programs;
    if (a.avail_n > 0) {
      row.availability = a.avail / a.avail_n;
      row.product = a.product / a.avail_n;
    }
    if (a.pooled_n > 0) row.availability_pooled = a.pooled_sum / a.pooled_n;
    out.push_back(row);
  }
  return out;
}

std::string MetricsCsv(const std::vector<MetricsRecord>& records) {
  std::ostringstream os;
  os << "program_id,toolchain,opt_level,line_coverage,availability,product,"
        "lines\n";
  for (const auto& r : records) {
    os << r.program_id << ',' << r.toolchain << ',' << r.opt_level << ','
       << Fmt(r.line_coverage) << ',' << Fmt(r.availability) << ','
       << Fmt(r.product) << ',' << r.ratio_lines << '\n';
  }
  return os.str();
}

std::string AggregateCsv(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "toolchain,opt_level,programs,line_coverage,availability,"
        "availability_pooled,product\n";
  for (const auto& r : rows) {
    os << r.toolchain << ',' << r.opt_level << ',' << r.programs << ','
       << Fmt(r.line_coverage) << ',' << Fmt(r.availability) << ','
       << Fmt(r.availability_pooled) << ',' << Fmt(r.product) << '\n';
  }
  return os.str();
}

std::string GnuplotData(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "# series level line_coverage availability product\n";
  for (const auto& r : rows) {
    os << '"' << r.toolchain << "\" \"" << r.opt_level << "\" "
       << Fmt(r.line_coverage) << ' ' << Fmt(r.availability.value_or(0)) << ' '
       << Fmt(r.product.value_or(0)) << '\n';
  }
  return os.str();
}

std::string GnuplotScript(const std::string& data_file) {
  std::ostringstream os;
  os << "set terminal pngcairo size 900,400\n"
     << "set output 'metrics.png'\n"
     << "set style data histograms\n"
     << "set style fill solid 0.8\n"
     << "set yrange [0:1]\n"
     << "set key outside\n"
     << "plot '" << data_file << "' using 3:xtic(2) title 'line coverage', \\\n"
     << "     '' using 4 title 'availability', \\\n"
     << "     '' using 5 title 'product'\n";
  return os.str();
}

std::vector<std::vector<int>> HeatGrid(const std::vector<int>& counts,
                                       int per_row) {
  if (per_row <= 0) throw Error(ErrorCode::kConfig, "per_row must be positive");
  std::vector<std::vector<int>> grid;
  for (size_t i = 0; i < counts.size(); i += per_row) {
    size_t end = std::min(counts.size(), i + per_row);
    grid.emplace_back(counts.begin() + i, counts.begin() + end);
  }
  return grid;
}

std::string HeatGridCsv(const std::vector<int>& counts, int per_row) {
  std::ostringstream os;
  for (const auto& row : HeatGrid(counts, per_row)) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

void to_json(Json& j, const MetricsRecord& r) {
  j = Json{{"program_id", r.program_id},
           {"toolchain", r.toolchain},
           {"opt_level", r.opt_level},
           {"line_coverage", r.line_coverage},
           {"availability", r.availability ? Json(*r.availability) : Json(nullptr)},
           {"product", r.product ? Json(*r.product) : Json(nullptr)},
           {"ratio_sum", r.ratio_sum},
           {"ratio_lines", r.ratio_lines}};
}

void from_json(const Json& j, MetricsRecord& r) {
  r.program_id = j.at("program_id").get<std::string>();
  r.toolchain = j.at("toolchain").get<std::string>();
  r.opt_level = j.at("opt_level").get<std::string>();
  r.line_coverage = j.at("line_coverage").get<double>();
  r.availability.reset();
  r.product.reset();
  if (!j.at("availability").is_null()) r.availability = j["availability"].get<double>();
  if (!j.at("product").is_null()) r.product = j["product"].get<double>();
  r.ratio_sum = j.value("ratio_sum", 0.0);
  r.ratio_lines = j.value("ratio_lines", 0);
}

}  // namespace debugholes
