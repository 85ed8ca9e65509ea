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

// Debuggability of an optimized build relative to its -O0 sibling: line
// coverage, availability of variables, and campaign-wide aggregation.

#ifndef DEBUGHOLES_METRICS_H_
#define DEBUGHOLES_METRICS_H_

#include <optional>
#include <string>
#include <vector>

#include "debugholes/dbgtrace.h"

namespace debugholes {

// |stepped lines of opt| / |stepped lines of O0|. Throws kEmptyReference.
double LineCoverage(const DebugTrace& opt, const DebugTrace& o0);

struct LineAvailability {
  std::string file;
  int line = 0;
  int available_both = 0;  // available in opt and in O0
  int available_o0 = 0;
};

// Per-line ratios over lines stepped in both traces that have at least one
// O0-available variable. Only AvailableWithValue counts.
std::vector<LineAvailability> AvailabilityByLine(const DebugTrace& opt,
                                                 const DebugTrace& o0);

// Mean of the per-line ratios; nullopt when no line qualifies.
std::optional<double> VariableAvailability(const DebugTrace& opt,
                                           const DebugTrace& o0);

struct MetricsRecord {
  std::string program_id;
  std::string toolchain;  // includes the version, e.g. "gcc-11.4.0"
  std::string opt_level;
  double line_coverage = 0;
  std::optional<double> availability;
  std::optional<double> product;
  // Raw per-line data kept for pooled aggregation.
  double ratio_sum = 0;
  int ratio_lines = 0;
};

MetricsRecord ComputeMetrics(const DebugTrace& opt, const DebugTrace& o0);

struct AggregateRow {
  std::string toolchain;
  std::string opt_level;
  int programs = 0;
  double line_coverage = 0;
  std::optional<double> availability;         // mean of per-program means
  std::optional<double> availability_pooled;  // mean over all lines
  std::optional<double> product;
};

// One row per (toolchain, level), sorted.
std::vector<AggregateRow> Aggregate(const std::vector<MetricsRecord>& records);

std::string MetricsCsv(const std::vector<MetricsRecord>& records);
std::string AggregateCsv(const std::vector<AggregateRow>& rows);
// Data file plus gnuplot script drawing one bar group per level.
std::string GnuplotData(const std::vector<AggregateRow>& rows);
std::string GnuplotScript(const std::string& data_file);

// Counts laid out `per_row` to a row; the last row may be short.
std::vector<std::vector<int>> HeatGrid(const std::vector<int>& counts,
                                       int per_row = 25);
std::string HeatGridCsv(const std::vector<int>& counts, int per_row = 25);

void to_json(Json& j, const MetricsRecord& r);
void from_json(const Json& j, MetricsRecord& r);

}  // namespace debugholes

#endif  // DEBUGHOLES_METRICS_H_
