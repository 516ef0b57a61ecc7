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

#ifndef DPMON_DELTA_HPP
#define DPMON_DELTA_HPP

#include "dpmon/analysis.hpp"
#include "dpmon/eval.hpp"

namespace dpmon {

// Timestamp-resolved sensitivity oracle: given a concrete pacing model and
// the single changed event, bounds how much each stream value can move
// between adjacent runs.
class DeltaOracle {
 public:
  DeltaOracle(const Specification& spec, const DependencyGraph& graph,
              const PacingModel& model,
              const std::map<std::string, Pacing>& pacing, int changed_t,
              const AnalysisOptions& options = {});

  // Delta^{t'}(x): per-event sensitivity of stream x at discrete t'.
  Rat delta(const std::string& stream, int t) const;

  // Sum of delta over all firings of x (compares against the static bound).
  Rat total(const std::string& stream) const;

  // Influence relation: can the changed event affect x at t?
  bool influenced(const std::string& stream, int t) const;

 private:
  Rat delta_expr(const Expr& e, const std::string& host, int t) const;
  bool influenced_expr(const Expr& e, const std::string& host, int t) const;
  // Mirrors the evaluator's hold semantics (simultaneity demotion and the
  // staleness bound); nullopt means the hold resolves to its default.
  std::optional<int> hold_source(const Expr& e, const std::string& host,
                                 int t) const;

  const Specification& spec_;
  const PacingModel& model_;
  const std::map<std::string, Pacing>& pacing_;
  int changed_t_;
  AnalysisOptions options_;
  std::map<std::string, int> order_rank_;
  std::map<std::string, ValueRange> ranges_;
  std::map<std::string, Rat> input_distance_;  // s_i = w * range width
  mutable std::map<std::pair<std::string, int>, Rat> memo_;
  mutable std::map<std::pair<std::string, int>, bool> influence_memo_;
};

// Brute-force adjacency oracle: evaluates both traces noise-free and
// returns the per-stream L1 difference over all firings.
// Throws SpecError("PerturbationOutOfRange") if a perturbed value leaves
// the declared input range.
std::map<std::string, double> check_adjacent_traces(
    const Specification& spec, const Trace& trace, std::size_t record_index,
    const std::map<std::string, double>& perturbation, const Rat& horizon,
    const EvalOptions& options = {});

}  // namespace dpmon

#endif  // DPMON_DELTA_HPP
