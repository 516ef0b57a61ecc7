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

#include <benchmark/benchmark.h>

#include <sstream>

#include "dpmon/eval.hpp"
#include "dpmon/parser.hpp"
#include "dpmon/transform.hpp"
#include "dpmon/tree.hpp"

namespace {

using namespace dpmon;

const char* kSpec = R"(input score : Int64 range [1, 6]
input conf : Int64 range [-1, 1]
output adj := (6 - score) * 3 + conf + 1
output davg @1d@ := adj.aggregate(over: 3d, using: avg).defaults(to: 0.0)
output low @1d@ := min(low.offset(by: -1).defaults(to: 15.0), davg)
output high @1d@ := max(high.offset(by: -1).defaults(to: 0.0), davg)
#[public]
output range @1d@ := (low, high)
)";

std::string make_trace(int events) {
  std::ostringstream csv;
  csv << "time,score,conf\n";
  for (int i = 0; i < events; ++i)
    csv << (1000 + 97 * i) << "," << 1 + i % 6 << "," << i % 3 - 1 << "\n";
  return csv.str();
}

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_specification(kSpec));
}
BENCHMARK(BM_Parse);

void BM_StaticAnalysis(benchmark::State& state) {
  Specification spec = parse_specification(kSpec);
  for (auto _ : state) {
    DependencyGraph graph = build_dependency_graph(spec);
    auto pacing = check_pacing_types(spec, graph);
    benchmark::DoNotOptimize(compute_sensitivity_report(spec, graph, pacing));
  }
}
BENCHMARK(BM_StaticAnalysis);

void BM_SelectBarriers(benchmark::State& state) {
  Specification spec = parse_specification(kSpec);
  DependencyGraph graph = build_dependency_graph(spec);
  auto pacing = check_pacing_types(spec, graph);
  SensitivityReport report = compute_sensitivity_report(spec, graph, pacing);
  Heuristic h = static_cast<Heuristic>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(select_barriers(graph, report, h, Rat(1)));
}
BENCHMARK(BM_SelectBarriers)->DenseRange(0, 3);

void BM_Evaluate(benchmark::State& state) {
  Specification spec = parse_specification(kSpec);
  DependencyGraph graph = build_dependency_graph(spec);
  auto pacing = check_pacing_types(spec, graph);
  SensitivityReport report = compute_sensitivity_report(spec, graph, pacing);
  BarrierPlan plan = select_barriers(graph, report, Heuristic::Deep, Rat(1));
  TransformResult tr = inject_noise(spec, graph, report, pacing, plan);
  Trace trace = parse_trace_csv(make_trace(state.range(0)), tr.spec);
  EvalOptions options;
  options.seed = 7;
  Rat horizon = trace.records.back().time + Rat(86400);
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate(tr.spec, trace, horizon, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Evaluate)->Arg(100)->Arg(1000)->Arg(10000);

void BM_TreeSlidingRelease(benchmark::State& state) {
  const long buckets = state.range(0);
  for (auto _ : state) {
    TreeState tree(16, 10.0, 1.0, TreeState::BudgetMode::UniformSliding, 5, 9,
                   false);
    for (long i = 0; i < buckets; ++i) {
      tree.ingest_bucket(static_cast<double>(i % 10), 1);
      benchmark::DoNotOptimize(tree.release_sum());
    }
  }
  state.SetItemsProcessed(state.iterations() * buckets);
}
BENCHMARK(BM_TreeSlidingRelease)->Arg(256)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
