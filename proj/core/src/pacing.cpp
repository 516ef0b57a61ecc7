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

#include "dpmon/pacing.hpp"

#include <algorithm>

#include "dpmon/diagnostics.hpp"

namespace dpmon {
namespace {

bool contains_window(const ExprPtr& e) {
  bool found = false;
  visit_expr(e, [&](const Expr& n) {
    if (n.kind == Expr::Kind::Aggregate || n.kind == Expr::Kind::Tree)
      found = true;
  });
  return found;
}

// Divisibility of periods: does delta_y divide delta_x?
bool divides(const Rat& y, const Rat& x) {
  Rat q = x / y;
  return boost::multiprecision::denominator(q) == 1;
}

}  // namespace

std::map<std::string, Pacing> check_pacing_types(const Specification& spec,
                                                 const DependencyGraph& graph) {
  std::map<std::string, Pacing> resolved;
  for (const auto& in : spec.inputs)
    resolved[in.name] = Pacing::event_based({in.name});
  for (const auto& out : spec.outputs)
    if (out.pacing.kind != Pacing::Kind::Inferred)
      resolved[out.name] = out.pacing;

  std::set<std::string> all_inputs;
  for (const auto& in : spec.inputs) all_inputs.insert(in.name);

  // Inference fixpoint: an un-annotated output is event-based on the union
  // of the trigger sets of its sync/offset targets.
  std::map<std::string, std::set<std::string>> inferred;
  for (const auto& out : spec.outputs)
    if (out.pacing.kind == Pacing::Kind::Inferred && !out.is_tuple())
      inferred[out.name] = {};
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [name, triggers] : inferred) {
      for (const AccessEdge* e : graph.edges_from(name)) {
        if (e->kind != AccessEdge::Kind::Sync &&
            e->kind != AccessEdge::Kind::Offset)
          continue;
        if (e->to == name) continue;  // self-access adds nothing new
        auto it = resolved.find(e->to);
        if (it != resolved.end()) {
          if (it->second.kind == Pacing::Kind::Periodic)
            throw SpecError("UnresolvableInference",
                            "'" + name + "' accesses periodic stream '" +
                                e->to + "'; annotate a pacing for '" + name +
                                "'");
          for (const auto& t : it->second.triggers)
            changed |= triggers.insert(t).second;
        } else {
          for (const auto& t : inferred.at(e->to))
            changed |= triggers.insert(t).second;
        }
      }
    }
  }
  for (auto& [name, triggers] : inferred) {
    // A dependency-free output fires with every input event.
    if (triggers.empty()) triggers = all_inputs;
    resolved[name] = Pacing::event_based(triggers);
  }
  // Tuple aliases inherit their annotation or stay inert.
  for (const auto& out : spec.outputs)
    if (out.is_tuple() && out.pacing.kind != Pacing::Kind::Inferred)
      resolved[out.name] = out.pacing;

  // Def. 4 condition 1 on every sync/offset edge.
  for (const auto& e : graph.edges) {
    if (e.kind != AccessEdge::Kind::Sync && e.kind != AccessEdge::Kind::Offset)
      continue;
    const Pacing& px = resolved.at(e.from);
    const Pacing& py = resolved.at(e.to);
    if (px.kind == Pacing::Kind::EventBased) {
      if (py.kind != Pacing::Kind::EventBased)
        throw SpecError("PacingMismatch",
                        "event-based '" + e.from + "' accesses periodic '" +
                            e.to + "'");
      if (!std::includes(px.triggers.begin(), px.triggers.end(),
                         py.triggers.begin(), py.triggers.end()))
        throw SpecError("PacingMismatch",
                        "'" + e.to + "' does not fire whenever '" + e.from +
                            "' does (trigger sets incompatible)");
    } else {
      if (py.kind != Pacing::Kind::Periodic)
        throw SpecError("PacingMismatch",
                        "periodic '" + e.from + "' accesses event-based '" +
                            e.to + "'");
      if (!divides(py.period, px.period))
        throw SpecError("PacingMismatch",
                        "period of '" + e.to + "' does not divide period of '" +
                            e.from + "'");
    }
  }
  // Def. 4 condition 2: window hosts are periodic.
  for (const auto& out : spec.outputs) {
    if (!out.expr || !contains_window(out.expr)) continue;
    if (resolved.at(out.name).kind != Pacing::Kind::Periodic)
      throw SpecError("WindowInEventBased",
                      "'" + out.name +
                          "' contains a window aggregation but is not periodic");
  }
  return resolved;
}

PacingModel derive_pacing_model(const Specification& spec,
                                const std::map<std::string, Pacing>& pacing,
                                const Trace& trace, const Rat& horizon) {
  // Discrete timeline: record times plus every periodic deadline <= horizon.
  std::vector<Rat> times;
  for (const auto& rec : trace.records)
    if (rec.time <= horizon) times.push_back(rec.time);
  for (const auto& [name, p] : pacing) {
    if (p.kind != Pacing::Kind::Periodic) continue;
    for (Rat t = 0; t <= horizon; t += p.period) times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  PacingModel model;
  model.times = times;
  std::map<Rat, int> time_index;
  for (std::size_t i = 0; i < times.size(); ++i)
    time_index[times[i]] = static_cast<int>(i);

  // Which inputs are present at each discrete timestamp.
  std::vector<std::set<std::string>> present(times.size());
  for (const auto& rec : trace.records) {
    auto it = time_index.find(rec.time);
    if (it == time_index.end()) continue;
    for (const auto& [name, value] : rec.values) present[it->second].insert(name);
  }

  for (const auto& [name, p] : pacing) {
    std::vector<int> firings;
    std::vector<int> rank(times.size(), -1);
    if (p.kind == Pacing::Kind::Periodic) {
      for (std::size_t t = 0; t < times.size(); ++t) {
        Rat q = times[t] / p.period;
        if (times[t] == 0 || boost::multiprecision::denominator(q) == 1) {
          rank[t] = static_cast<int>(firings.size());
          firings.push_back(static_cast<int>(t));
        }
      }
    } else {
      for (std::size_t t = 0; t < times.size(); ++t) {
        bool all = !p.triggers.empty();
        for (const auto& trig : p.triggers)
          if (!present[t].count(trig)) { all = false; break; }
        if (all) {
          rank[t] = static_cast<int>(firings.size());
          firings.push_back(static_cast<int>(t));
        }
      }
    }
    model.schedule[name] = std::move(firings);
    model.firing_rank[name] = std::move(rank);
  }
  // Inert tuple aliases without a resolved pacing never fire.
  for (const auto& name : spec.stream_names())
    if (!model.schedule.count(name)) {
      model.schedule[name] = {};
      model.firing_rank[name] = std::vector<int>(times.size(), -1);
    }
  return model;
}

std::optional<int> last_event(const PacingModel& model, const std::string& y,
                              int t, long o) {
  const std::vector<int>& firings = model.schedule.at(y);
  // Index of the last firing at or before t.
  auto it = std::upper_bound(firings.begin(), firings.end(), t);
  long at_or_before = static_cast<long>(it - firings.begin());  // count
  if (o == 0) {
    if (at_or_before == 0) return std::nullopt;
    return firings[at_or_before - 1];
  }
  // o-th most recent strictly before t.
  auto strict = std::lower_bound(firings.begin(), firings.end(), t);
  long before = static_cast<long>(strict - firings.begin());
  if (before < o) return std::nullopt;
  return firings[before - o];
}

std::vector<int> window_times(const PacingModel& model, const std::string& y,
                              int t, const Rat& window, bool closed_windows) {
  const std::vector<int>& firings = model.schedule.at(y);
  Rat hi = model.times[t];
  Rat lo = hi - window;
  std::vector<int> out;
  for (int f : firings) {
    const Rat& rt = model.times[f];
    if (rt > hi) break;
    if (rt > lo || (closed_windows && rt == lo)) out.push_back(f);
  }
  return out;
}

}  // namespace dpmon
