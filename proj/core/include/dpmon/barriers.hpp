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

#ifndef DPMON_BARRIERS_HPP
#define DPMON_BARRIERS_HPP

#include "dpmon/analysis.hpp"

namespace dpmon {

enum class Heuristic { InputOnly, Deep, PostAggregation, MinimalBarriers };

const char* heuristic_name(Heuristic h);
std::optional<Heuristic> parse_heuristic(const std::string& name);

enum class Mechanism { PlainLaplace, TreeAll, TreeSliding };

const char* mechanism_name(Mechanism m);

struct BarrierPlan {
  struct Entry {
    std::string stream;
    Rat epsilon;  // per-barrier budget
    Mechanism mechanism = Mechanism::PlainLaplace;
  };
  std::vector<Entry> barriers;  // declaration order
  Rat total_epsilon;
  Heuristic heuristic = Heuristic::Deep;

  const Entry* find(const std::string& stream) const;
};

// Segment of every stream (tuple aliases are post-processed); throws
// SpecError("NoValidBarrier") when some public output cannot be cut by any
// finite-bound stream, or "MissingRange" when the cause is an unbounded
// input on such a path.
std::map<std::string, Segment> partition_segments(
    const DependencyGraph& graph, const SensitivityReport& report);

struct BarrierValidation {
  bool ok = true;
  int crossings = 1;                 // 0 or >= 2 on violation
  std::vector<std::string> witness;  // input ... public path
};

// Checks that every input-to-public path crosses the barrier set exactly
// once; returns a witness path on violation.
BarrierValidation validate_barriers(const DependencyGraph& graph,
                                    const std::set<std::string>& barriers);

struct BudgetOptions {
  std::map<std::string, Rat> weights;  // default: equal split
};

// Applies the placement heuristic and splits epsilon across the chosen
// barriers (exact rational arithmetic, sum equals epsilon).
BarrierPlan select_barriers(const DependencyGraph& graph,
                            const SensitivityReport& report, Heuristic h,
                            const Rat& epsilon,
                            const BudgetOptions& budget = {});

}  // namespace dpmon

#endif  // DPMON_BARRIERS_HPP
