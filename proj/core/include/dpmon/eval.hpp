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

#ifndef DPMON_EVAL_HPP
#define DPMON_EVAL_HPP

#include <optional>

#include "dpmon/pacing.hpp"
#include "dpmon/trace.hpp"

namespace dpmon {

// One monitor run: per stream, a value (or bottom = nullopt) at each
// discrete timestamp of the shared timeline. A stream holds a slot entry
// exactly at its firings; bottom marks a failed access that no default
// eliminated.
struct EvaluationModel {
  PacingModel pacing;
  std::map<std::string, std::vector<std::optional<double>>> values;

  // Released (non-bottom) value of `stream` at discrete timestamp t.
  std::optional<double> at(const std::string& stream, int t) const;
};

struct EvalOptions {
  std::uint64_t seed = 0;
  bool zero_noise = false;      // force all Laplace draws to 0 (testing)
  bool closed_windows = false;  // closed window interval variant
  bool renormalize_tree_budget = false;
};

// Evaluation order within one timestamp: topological over Sync and Window
// edges, declaration-stable. Also decides simultaneity for hold accesses.
std::vector<std::string> sync_topo_order(const Specification& spec,
                                         const DependencyGraph& graph);

// Deterministic evaluation per the operator semantics: timestamps in order,
// streams in sync-topological order within a timestamp; bottom propagates
// through arithmetic and only `default` eliminates it.
EvaluationModel evaluate(const Specification& spec, const Trace& trace,
                         const Rat& horizon, const EvalOptions& options = {});

// JSONL: one record per non-bottom release,
// {"t": seconds, "stream": name, "value": number}. `only` restricts the
// emitted streams (deployment mode emits publics only).
std::string render_jsonl(const Specification& spec, const EvaluationModel& model,
                         const std::set<std::string>* only = nullptr);

}  // namespace dpmon

#endif  // DPMON_EVAL_HPP
