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

#ifndef DPMON_TRANSFORM_HPP
#define DPMON_TRANSFORM_HPP

#include "dpmon/barriers.hpp"

namespace dpmon {

struct TransformOptions {
  bool tree_aggregation = false;  // rewrite matching barriers to tree noise
  bool closed_windows = false;    // must match the analysis options
};

struct TransformResult {
  Specification spec;  // noise-injected specification
  BarrierPlan plan;    // input plan with mechanisms resolved
};

// Rewrites the specification so that every barrier stream carries
// calibrated noise: output barriers gain a laplace term (or are rewritten
// to a tree mechanism), input barriers are shadowed by a noisy copy that
// all consumers are re-pointed to.
TransformResult inject_noise(const Specification& spec,
                             const DependencyGraph& graph,
                             const SensitivityReport& report,
                             const std::map<std::string, Pacing>& pacing,
                             const BarrierPlan& plan,
                             const TransformOptions& options = {});

// Machine-readable plan summary: per barrier the sensitivity bound, budget
// share, noise scale, and mechanism.
std::string render_plan_json(const BarrierPlan& plan,
                             const SensitivityReport& report);

}  // namespace dpmon

#endif  // DPMON_TRANSFORM_HPP
