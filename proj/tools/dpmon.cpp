// Copyright 2026 The dpmon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dpmon/diagnostics.hpp"
#include "dpmon/eval.hpp"
#include "dpmon/experiments.hpp"
#include "dpmon/parser.hpp"
#include "dpmon/printer.hpp"
#include "dpmon/transform.hpp"

namespace fs = std::filesystem;
using namespace dpmon;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("FileError", "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spill(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SpecError("FileError", "cannot write '" + path + "'");
  out << content;
}

Rat parse_rat_flag(const std::string& text, const std::string& flag) {
  auto r = parse_rational(text);
  if (!r) throw SpecError("InvalidFlag", flag + ": not a rational: " + text);
  return *r;
}

struct AnalyzedSpec {
  Specification spec;
  DependencyGraph graph;
  std::map<std::string, Pacing> pacing;
  SensitivityReport report;
};

AnalyzedSpec analyze_file(const std::string& path, long group_size,
                          bool closed_windows, bool allow_intrinsics = false) {
  AnalyzedSpec a;
  ParseOptions popts;
  popts.allow_intrinsics = allow_intrinsics;
  a.spec = parse_specification(slurp(path), popts);
  a.spec.group_size = group_size;
  if (a.spec.public_set().empty())
    throw SpecError("NoPublicOutput",
                    "specification releases nothing; mark an output "
                    "#[public]");
  a.graph = build_dependency_graph(a.spec);
  a.pacing = check_pacing_types(a.spec, a.graph);
  AnalysisOptions opts;
  opts.closed_windows = closed_windows;
  a.report = compute_sensitivity_report(a.spec, a.graph, a.pacing, opts);
  return a;
}

std::map<std::string, Rat> parse_budget_weights(const std::string& text) {
  std::map<std::string, Rat> weights;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw SpecError("InvalidFlag",
                      "--budget-weights expects name=value pairs");
    weights[item.substr(0, eq)] =
        parse_rat_flag(item.substr(eq + 1), "--budget-weights");
  }
  return weights;
}

int cmd_analyze(const std::string& spec_path, const std::string& out_dir,
                long group_size, bool closed_windows) {
  auto start = std::chrono::steady_clock::now();
  AnalyzedSpec a = analyze_file(spec_path, group_size, closed_windows);
  std::vector<std::pair<Heuristic, BarrierPlan>> plans;
  for (Heuristic h : {Heuristic::InputOnly, Heuristic::Deep,
                      Heuristic::PostAggregation, Heuristic::MinimalBarriers})
    plans.emplace_back(h, select_barriers(a.graph, a.report, h, Rat(1)));
  auto elapsed = std::chrono::duration<double, std::milli>(
      std::chrono::steady_clock::now() - start);

  fs::create_directories(out_dir);
  spill((fs::path(out_dir) / "report.json").string(), a.report.to_json());
  spill((fs::path(out_dir) / "graph.dot").string(), render_dot(a.graph));
  for (const auto& [h, plan] : plans)
    spill((fs::path(out_dir) /
           (std::string("plan_") + heuristic_name(h) + ".json"))
              .string(),
          render_plan_json(plan, a.report));
  std::cout << a.report.to_json();
  for (const auto& [h, plan] : plans) {
    std::cout << heuristic_name(h) << ":";
    for (const auto& e : plan.barriers) std::cout << " " << e.stream;
    std::cout << "\n";
  }
  std::cout << "analysis time: " << elapsed.count() << " ms\n";
  return 0;
}

int cmd_compile(const std::string& spec_path, const std::string& eps_text,
                const std::string& heuristic_text, bool tree,
                const std::string& weights_text, long group_size,
                bool closed_windows, const std::string& out_path,
                const std::string& sidecar_path) {
  AnalyzedSpec a = analyze_file(spec_path, group_size, closed_windows);
  Rat eps = parse_rat_flag(eps_text, "--epsilon");
  auto h = parse_heuristic(heuristic_text);
  if (!h)
    throw SpecError("InvalidFlag",
                    "--heuristic must be input-only|deep|post-aggregation|"
                    "minimal");
  BudgetOptions budget;
  if (!weights_text.empty()) budget.weights = parse_budget_weights(weights_text);
  auto plan = select_barriers(a.graph, a.report, *h, eps, budget);
  TransformOptions topts;
  topts.tree_aggregation = tree;
  topts.closed_windows = closed_windows;
  auto result = inject_noise(a.spec, a.graph, a.report, a.pacing, plan, topts);
  std::string rendered = render_specification(result.spec);
  std::string sidecar = render_plan_json(result.plan, a.report);
  if (out_path.empty())
    std::cout << rendered;
  else
    spill(out_path, rendered);
  if (sidecar_path.empty())
    std::cout << sidecar;
  else
    spill(sidecar_path, sidecar);
  return 0;
}

int cmd_run(const std::string& spec_path, const std::string& trace_path,
            std::uint64_t seed, const std::string& horizon_text,
            const std::string& emit, long group_size, bool closed_windows,
            bool renormalize) {
  AnalyzedSpec a;
  ParseOptions popts;
  popts.allow_intrinsics = true;  // compiled specs carry noise intrinsics
  a.spec = parse_specification(slurp(spec_path), popts);
  a.spec.group_size = group_size;
  Trace trace = parse_trace_csv(slurp(trace_path), a.spec);
  Rat horizon;
  if (horizon_text.empty()) {
    if (trace.records.empty())
      throw SpecError("InvalidFlag",
                      "--horizon required for an empty trace");
    horizon = trace.records.back().time;
  } else {
    horizon = parse_rat_flag(horizon_text, "--horizon");
  }
  EvalOptions opts;
  opts.seed = seed;
  opts.closed_windows = closed_windows;
  opts.renormalize_tree_budget = renormalize;
  auto model = evaluate(a.spec, trace, horizon, opts);
  if (emit == "private-only") {
    auto publics = a.spec.public_set();
    std::cout << render_jsonl(a.spec, model, &publics);
  } else {
    std::cout << render_jsonl(a.spec, model);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private stream monitoring toolkit"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Sensitivity analysis");
  std::string spec_path, out_dir = "analysis";
  long group_size = 1;
  bool closed_windows = false;
  analyze->add_option("spec", spec_path, "Specification file")->required();
  analyze->add_option("-o,--out", out_dir, "Output directory");
  analyze->add_option("--w", group_size, "Adjacency group size");
  analyze->add_flag("--closed-windows", closed_windows,
                    "Closed window intervals");

  // compile
  auto* compile = app.add_subcommand("compile", "Insert privacy barriers");
  std::string eps_text = "1", heuristic_text = "deep", weights_text;
  std::string tree_text = "off", out_path, sidecar_path;
  compile->add_option("spec", spec_path, "Specification file")->required();
  compile->add_option("--epsilon", eps_text, "Total privacy budget");
  compile->add_option("--heuristic", heuristic_text,
                      "input-only|deep|post-aggregation|minimal");
  compile->add_option("--tree-aggregation", tree_text, "on|off");
  compile->add_option("--budget-weights", weights_text,
                      "name=weight,... budget split");
  compile->add_option("--w", group_size, "Adjacency group size");
  compile->add_flag("--closed-windows", closed_windows);
  compile->add_option("-o,--out", out_path, "Transformed spec file");
  compile->add_option("--sidecar", sidecar_path, "Plan sidecar JSON file");

  // run
  auto* run = app.add_subcommand("run", "Evaluate a spec on a trace");
  std::string trace_path, horizon_text, emit = "all";
  std::uint64_t seed = 0;
  bool renormalize = false;
  run->add_option("spec", spec_path, "Specification file")->required();
  run->add_option("--trace", trace_path, "Trace CSV")->required();
  run->add_option("--seed", seed, "Noise seed");
  run->add_option("--horizon", horizon_text, "Horizon seconds (rational)");
  run->add_option("--emit", emit, "all|private-only");
  run->add_option("--w", group_size, "Adjacency group size");
  run->add_flag("--closed-windows", closed_windows);
  run->add_flag("--renormalize-tree-budget", renormalize);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Experiment harnesses");
  experiment->require_subcommand(1);
  auto* variance = experiment->add_subcommand("variance", "Noise-variance study across window sizes");
  VarianceConfig vconfig;
  std::string vout, veps = "1";
  variance->add_option("--runs", vconfig.runs, "Runs per cell");
  variance->add_option("--epsilon", veps, "Privacy budget");
  variance->add_option("--windows", vconfig.windows, "Window sizes (days)");
  variance->add_option("--vpb", vconfig.values_per_bucket,
                       "Values per bucket");
  variance->add_option("--seed", vconfig.seed_base, "Base noise seed");
  variance->add_option("--trace-seed", vconfig.trace_seed, "Trace seed");
  variance->add_option("--threads", vconfig.threads, "Worker threads");
  variance->add_option("-o,--out", vout, "CSV output file");

  auto* casestudy =
      experiment->add_subcommand("casestudy", "Bus-line case study");
  CaseStudyConfig cconfig;
  std::string cout_path, ceps = "1";
  casestudy->add_option("--runs", cconfig.runs, "Runs");
  casestudy->add_option("--epsilon", ceps, "Privacy budget");
  casestudy->add_option("--days", cconfig.days, "Trace length in days");
  casestudy->add_option("--seed", cconfig.seed_base, "Base noise seed");
  casestudy->add_option("--trace-seed", cconfig.trace_seed, "Trace seed");
  casestudy->add_option("--threads", cconfig.threads, "Worker threads");
  casestudy->add_option("-o,--out", cout_path, "CSV output file");

  // gen-trace
  auto* gen = app.add_subcommand("gen-trace", "Case-study trace CSV");
  std::uint64_t gen_seed = 7;
  long gen_days = 3;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--days", gen_days, "Days");
  gen->add_option("-o,--out", gen_out, "CSV output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze)
      return cmd_analyze(spec_path, out_dir, group_size, closed_windows);
    if (*compile)
      return cmd_compile(spec_path, eps_text, heuristic_text,
                         tree_text == "on", weights_text, group_size,
                         closed_windows, out_path, sidecar_path);
    if (*run)
      return cmd_run(spec_path, trace_path, seed, horizon_text, emit,
                     group_size, closed_windows, renormalize);
    if (*variance) {
      vconfig.epsilon = parse_rat_flag(veps, "--epsilon");
      std::string csv = variance_csv(run_variance_study(vconfig));
      if (vout.empty())
        std::cout << csv;
      else
        spill(vout, csv);
      return 0;
    }
    if (*casestudy) {
      cconfig.epsilon = parse_rat_flag(ceps, "--epsilon");
      std::string csv = case_study_csv(run_case_study(cconfig));
      if (cout_path.empty())
        std::cout << csv;
      else
        spill(cout_path, csv);
      return 0;
    }
    if (*gen) {
      Specification spec = parse_specification(casestudy_spec_text());
      Trace trace = generate_casestudy_trace(gen_seed, gen_days, spec);
      std::string csv = render_trace_csv(trace, spec);
      if (gen_out.empty())
        std::cout << csv;
      else
        spill(gen_out, csv);
      return 0;
    }
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
