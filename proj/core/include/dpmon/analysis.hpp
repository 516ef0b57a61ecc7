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

#ifndef DPMON_ANALYSIS_HPP
#define DPMON_ANALYSIS_HPP

#include <map>
#include <string>

#include "dpmon/graph.hpp"
#include "dpmon/pacing.hpp"

namespace dpmon {

struct ValueRange {
  ExtRat lo = ExtRat::neg_inf();
  ExtRat hi = ExtRat::pos_inf();

  ExtRat width() const { return hi - lo; }
  static ValueRange unbounded() { return {}; }
};

enum class Segment { Private, PostProcessed };

struct StreamReport {
  std::string name;
  ValueRange range;
  ExtRat influence;  // n_x
  ExtRat bound;      // static L1 sensitivity b
  Segment segment = Segment::Private;
};

struct SensitivityReport {
  std::vector<StreamReport> streams;  // declaration order, tuple aliases omitted

  const StreamReport* find(const std::string& name) const;
  std::string to_json() const;
};

struct AnalysisOptions {
  bool closed_windows = false;  // window multiplier floor(W/d)+1 instead of
                                // ceil(W/d)
};

// Range of a single expression under per-stream ranges `env`.
ValueRange range_of_expression(const Expr& e,
                               const std::map<std::string, ValueRange>& env);

// Static value ranges per stream (cyclic streams are unbounded).
std::map<std::string, ValueRange> compute_value_ranges(
    const Specification& spec, const DependencyGraph& graph);

// Influence counts n_x: how many firings of x one input event can affect.
std::map<std::string, ExtRat> compute_influence_bounds(
    const Specification& spec, const DependencyGraph& graph,
    const std::map<std::string, Pacing>& pacing,
    const AnalysisOptions& options = {});

// Full report: ranges, influence, static L1 bounds, segment classification.
SensitivityReport compute_sensitivity_report(
    const Specification& spec, const DependencyGraph& graph,
    const std::map<std::string, Pacing>& pacing,
    const AnalysisOptions& options = {});

// ceil(W/delta) windows contain any one firing (floor(W/delta)+1 with
// closed windows).
ExtRat window_multiplier(const Rat& window, const Pacing& host_pacing,
                         const AnalysisOptions& options);

}  // namespace dpmon

#endif  // DPMON_ANALYSIS_HPP
