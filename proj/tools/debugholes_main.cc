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

// debugholes: command-line front end.
//
// Exit codes: 0 ran (violations are data, not failure), 1 usage or
// configuration error, 2 environment error such as a missing tool.
// `interesting` follows reducer conventions instead: 0 interesting, 1 not.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "debugholes/campaign.h"
#include "debugholes/corpus.h"
#include "debugholes/reducer.h"

namespace dh = debugholes;

namespace {

constexpr int kUsage = 1;
constexpr int kEnvironment = 2;

int ExitCodeFor(const dh::Error& e) {
  switch (e.code()) {
    case dh::ErrorCode::kConfig:
    case dh::ErrorCode::kMissingStage:
    case dh::ErrorCode::kCorpusMismatch:
      return kUsage;
    default:
      return kEnvironment;
  }
}

dh::fs::path SelfPath() {
  std::error_code ec;
  dh::fs::path p = dh::fs::read_symlink("/proc/self/exe", ec);
  return ec ? dh::fs::path("debugholes") : p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tests C compilers for incomplete debug information."};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate and screen programs from a config");
  std::string gen_config, gen_out;
  int gen_count = 1;
  gen->add_option("--config", gen_config, "Campaign config file")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--count", gen_count, "Number of programs")->check(CLI::PositiveNumber);

  // campaign
  auto* camp = app.add_subcommand("campaign", "Run a full campaign");
  std::string camp_config, camp_store;
  std::optional<int> camp_jobs, camp_stop;
  bool camp_verbose = false;
  camp->add_option("--config", camp_config, "Campaign config file")->required();
  camp->add_option("--store", camp_store, "Override the store directory");
  camp->add_option("--jobs", camp_jobs, "Worker count")->check(CLI::PositiveNumber);
  camp->add_option("--stop-after", camp_stop, "Stop after N programs")->group("");
  camp->add_flag("--verbose", camp_verbose, "Per-program progress on stderr");

  // triage
  auto* tri = app.add_subcommand("triage", "Attribute violations to culprit optimizations");
  std::string tri_store, tri_filter;
  std::optional<int> tri_jobs;
  tri->add_option("--store", tri_store)->required();
  tri->add_option("--filter", tri_filter, "Regex over violation keys");
  tri->add_option("--jobs", tri_jobs)->check(CLI::PositiveNumber);

  // reduce
  auto* red = app.add_subcommand("reduce", "Reduce triaged violations");
  std::string red_store, red_filter, red_reducer;
  int red_budget = 3600;
  red->add_option("--store", red_store)->required();
  red->add_option("--reducer", red_reducer, "creduce-compatible reducer")->required();
  red->add_option("--filter", red_filter, "Regex over violation keys");
  red->add_option("--wall-budget", red_budget, "Seconds per violation");

  // metrics
  auto* met = app.add_subcommand("metrics", "Line coverage and variable availability");
  std::string met_store;
  met->add_option("--store", met_store)->required();

  // compare
  auto* cmp = app.add_subcommand("compare", "Compare two stores over the same corpus");
  std::string cmp_a, cmp_b, cmp_la = "A", cmp_lb = "B", cmp_json;
  cmp->add_option("--store-a", cmp_a)->required();
  cmp->add_option("--store-b", cmp_b)->required();
  cmp->add_option("--label-a", cmp_la);
  cmp->add_option("--label-b", cmp_lb);
  cmp->add_option("--json", cmp_json, "Also write the report as JSON");

  // report
  auto* rep = app.add_subcommand("report", "Render one dossier per violation");
  std::string rep_store, rep_filter;
  rep->add_option("--store", rep_store)->required();
  rep->add_option("--filter", rep_filter, "Regex over violation keys");

  // interesting
  auto* intr = app.add_subcommand("interesting", "Reduction predicate (exit 0 = interesting)");
  std::string int_spec, int_file;
  bool int_verbose = false;
  intr->add_option("--spec", int_spec)->required();
  intr->add_option("candidate", int_file)->required();
  intr->add_flag("--verbose", int_verbose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*gen) {
      dh::CampaignConfig c = dh::CampaignConfig::Load(gen_config);
      c.CheckTools();
      dh::GeneratorSettings gs;
      gs.generator_path = c.generator_path;
      gs.base_args = c.generator_args;
      gs.retry_budget = c.retry_budget;
      gs.timeout = c.generate_timeout;
      gs.check_toolchain =
          dh::ProbeToolchain(c.toolchains.front().family, c.toolchains.front().compiler_path,
                             c.toolchains.front().debugger_path);
      gs.out_dir = gen_out;
      std::vector<std::vector<std::string>> sets;
      if (c.assortments_path) sets = dh::LoadAssortments(*c.assortments_path);
      dh::ScreenSettings ss;
      ss.toolchains = {*gs.check_toolchain};
      ss.analyzer_path = c.analyzer_path;
      for (int i = 0; i < gen_count; ++i) {
        dh::GenerationRecipe r;
        r.seed = c.seed + static_cast<uint64_t>(i) * 1000;
        r.max_source_lines = c.max_source_lines;
        if (!sets.empty()) {
          r.option_set_id = i % static_cast<int>(sets.size());
          r.generator_options = sets[r.option_set_id];
        }
        dh::TestProgram p = dh::GenerateProgram(r, gs);
        dh::ScreenVerdict v = dh::ScreenUndefinedBehavior(p, ss);
        dh::WriteJsonAtomic(p.source_path.string() + ".json", dh::ProgramSidecar(p, v));
        std::cout << p.source_path.string() << (v.clean ? "" : "  (UB screen failed)") << "\n";
      }
      return 0;
    }
    if (*camp) {
      dh::CampaignConfig c = dh::CampaignConfig::Load(camp_config);
      if (!camp_store.empty()) c.store_root = dh::fs::absolute(camp_store);
      if (camp_jobs) c.jobs = *camp_jobs;
      c.cli_path = SelfPath();
      dh::CampaignOptions opts;
      opts.stop_after = camp_stop;
      opts.quiet = !camp_verbose;
      dh::CampaignSummary s = dh::RunCampaign(c, opts);
      std::cout << s.Render() << "builds: " << s.builds << ", traces: " << s.traces
                << "\n";
      return 0;
    }
    if (*tri) {
      dh::RunStore store(tri_store);
      auto r = dh::CmdTriage(store, tri_filter, tri_jobs);
      std::cout << "triaged " << r.triaged << " violations\n";
      for (const auto& [tc, tables] : r.tables) std::cout << dh::RenderGroupTables(tables, tc);
      return 0;
    }
    if (*red) {
      dh::RunStore store(red_store);
      auto r = dh::CmdReduce(store, red_filter, dh::fs::absolute(red_reducer),
                             std::chrono::seconds(red_budget), SelfPath());
      std::cout << "reduced " << r.reduced << ", skipped " << r.skipped << "\n";
      for (const auto& b : r.bundles) std::cout << b.string() << "\n";
      return 0;
    }
    if (*met) {
      dh::RunStore store(met_store);
      auto records = dh::CmdMetrics(store);
      std::cout << dh::AggregateCsv(dh::Aggregate(records));
      return 0;
    }
    if (*cmp) {
      dh::RunStore a(cmp_a), b(cmp_b);
      auto r = dh::CmdCompare(a, b, cmp_la, cmp_lb);
      std::cout << r.Render();
      if (!cmp_json.empty()) dh::WriteJsonAtomic(cmp_json, dh::Json(r));
      return 0;
    }
    if (*rep) {
      dh::RunStore store(rep_store);
      for (const auto& p : dh::CmdReport(store, rep_filter)) std::cout << p.string() << "\n";
      return 0;
    }
    if (*intr) {
      dh::InterestingnessSpec spec = dh::ReadJson(int_spec).get<dh::InterestingnessSpec>();
      dh::InterestingVerdict v = dh::EvaluateCandidate(spec, int_file);
      if (int_verbose) std::cerr << (v.interesting ? "interesting: " : "not interesting: ") << v.reason << "\n";
      return v.interesting ? 0 : 1;
    }
  } catch (const dh::Error& e) {
    std::cerr << "debugholes: " << e.what() << "\n";
    if (*intr) return 1;
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    std::cerr << "debugholes: " << e.what() << "\n";
    if (*intr) return 1;
    return kEnvironment;
  }
  return kUsage;
}
