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

#ifndef DPMON_PACING_HPP
#define DPMON_PACING_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpmon/graph.hpp"
#include "dpmon/trace.hpp"

namespace dpmon {

// Resolves every stream's pacing (inputs are event-based on themselves;
// un-annotated outputs are inferred) and statically checks the typing
// conditions: a sync/offset target must fire whenever the accessor does,
// and window-bearing streams must be periodic.
// Throws SpecError: PacingMismatch, WindowInEventBased, UnresolvableInference.
std::map<std::string, Pacing> check_pacing_types(const Specification& spec,
                                                 const DependencyGraph& graph);

// Firing schedules over a discretized timeline, independent of values.
struct PacingModel {
  std::vector<Rat> times;                       // discrete ts -> real seconds
  std::map<std::string, std::vector<int>> schedule;  // ascending firing ts
  std::map<std::string, std::vector<int>> firing_rank;  // ts -> index in
                                                        // schedule, -1 if not
                                                        // firing (size = |times|)

  bool fires(const std::string& stream, int t) const {
    return firing_rank.at(stream)[t] >= 0;
  }
};

// Timeline = union of trace record times and periodic deadlines k*delta for
// k = 0,1,... up to the horizon; event-based streams fire when all triggers
// are present in the record; periodic streams fire at their deadlines.
PacingModel derive_pacing_model(const Specification& spec,
                                const std::map<std::string, Pacing>& pacing,
                                const Trace& trace, const Rat& horizon);

// The o-th most recent firing of y strictly before t (o >= 1), or for o = 0
// the most recent firing at or before t (hold semantics). nullopt if none.
std::optional<int> last_event(const PacingModel& model, const std::string& y,
                              int t, long o);

// Firings t' of y with realtime(t) - W < realtime(t') <= realtime(t);
// with closed_windows the left end is included as well.
std::vector<int> window_times(const PacingModel& model, const std::string& y,
                              int t, const Rat& window,
                              bool closed_windows = false);

}  // namespace dpmon

#endif  // DPMON_PACING_HPP
