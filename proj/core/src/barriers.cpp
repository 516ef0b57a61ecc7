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

#include "dpmon/barriers.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

#include "dpmon/diagnostics.hpp"

namespace dpmon {

const char* heuristic_name(Heuristic h) {
  switch (h) {
    case Heuristic::InputOnly: return "input-only";
    case Heuristic::Deep: return "deep";
    case Heuristic::PostAggregation: return "post-aggregation";
    case Heuristic::MinimalBarriers: return "minimal";
  }
  return "?";
}

std::optional<Heuristic> parse_heuristic(const std::string& name) {
  if (name == "input-only") return Heuristic::InputOnly;
  if (name == "deep") return Heuristic::Deep;
  if (name == "post-aggregation") return Heuristic::PostAggregation;
  if (name == "minimal") return Heuristic::MinimalBarriers;
  return std::nullopt;
}

const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::PlainLaplace: return "laplace";
    case Mechanism::TreeAll: return "tree-all";
    case Mechanism::TreeSliding: return "tree-sliding";
  }
  return "?";
}

const BarrierPlan::Entry* BarrierPlan::find(const std::string& stream) const {
  for (const auto& e : barriers)
    if (e.stream == stream) return &e;
  return nullptr;
}

namespace {

// Data-flow adjacency: a value flows from the accessed stream to the
// accessor, i.e. against the direction of the dependency edges.
struct Flow {
  const DependencyGraph& graph;
  std::map<std::string, std::vector<std::string>> consumers;
  std::vector<std::string> inputs, publics;

  explicit Flow(const DependencyGraph& g) : graph(g) {
    for (const auto& e : g.edges)
      if (e.from != e.to) consumers[e.to].push_back(e.from);
    for (auto& [node, list] : consumers) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (g.is_input[i]) inputs.push_back(g.nodes[i]);
      if (g.is_public[i]) publics.push_back(g.nodes[i]);
    }
  }

  const std::vector<std::string>& next(const std::string& n) const {
    static const std::vector<std::string> empty;
    auto it = consumers.find(n);
    return it == consumers.end() ? empty : it->second;
  }

  bool is_public(const std::string& n) const {
    return graph.is_public[graph.index.at(n)];
  }
};

std::set<std::string> reachable_from_inputs(const Flow& flow) {
  std::set<std::string> seen;
  std::vector<std::string> stack = flow.inputs;
  while (!stack.empty()) {
    std::string n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto& c : flow.next(n)) stack.push_back(c);
  }
  return seen;
}

std::set<std::string> co_reachable_to_publics(const Flow& flow) {
  std::map<std::string, std::vector<std::string>> producers;
  for (const auto& e : flow.graph.edges) producers[e.from].push_back(e.to);
  std::set<std::string> seen;
  std::vector<std::string> stack = flow.publics;
  while (!stack.empty()) {
    std::string n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto& p : producers[n]) stack.push_back(p);
  }
  return seen;
}

// Streams on some input-to-public flow path; only these matter for barrier
// placement.
std::set<std::string> relevant_streams(const Flow& flow) {
  std::set<std::string> relevant;
  auto fwd = reachable_from_inputs(flow);
  auto bwd = co_reachable_to_publics(flow);
  for (const auto& n : fwd)
    if (bwd.count(n)) relevant.insert(n);
  return relevant;
}

bool finite_bound(const SensitivityReport& report, const std::string& n) {
  const StreamReport* sr = report.find(n);
  return sr && sr->bound.is_finite();
}

}  // namespace

std::map<std::string, Segment> partition_segments(
    const DependencyGraph& graph, const SensitivityReport& report) {
  std::map<std::string, Segment> segments;
  for (const auto& n : graph.nodes) {
    const StreamReport* sr = report.find(n);
    segments[n] = sr ? sr->segment : Segment::PostProcessed;
  }
  // Sanity: no private stream may depend on a post-processed one.
  for (const auto& e : graph.edges)
    if (segments.at(e.from) == Segment::Private &&
        segments.at(e.to) == Segment::PostProcessed)
      throw SpecError("EvaluationError", "segment closure violated on edge " +
                                             e.from + " -> " + e.to);
  // A path from an input to a public output that passes only streams with
  // infinite sensitivity bounds admits no barrier. Such a path necessarily
  // starts at an input without a declared range.
  Flow flow(graph);
  std::set<std::string> seen;
  std::vector<std::string> stack;
  for (const auto& in : flow.inputs)
    if (!finite_bound(report, in)) stack.push_back(in);
  while (!stack.empty()) {
    std::string n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (flow.is_public(n))
      throw SpecError("MissingRange",
                      "input-to-public path through '" + n +
                          "' has no stream with a finite sensitivity bound; "
                          "declare a range on the originating input");
    for (const auto& c : flow.next(n))
      if (!finite_bound(report, c)) stack.push_back(c);
  }
  return segments;
}

BarrierValidation validate_barriers(const DependencyGraph& graph,
                                    const std::set<std::string>& barriers) {
  Flow flow(graph);
  // BFS over (node, crossings so far); counts above 2 collapse to 2.
  std::map<std::pair<std::string, int>, std::pair<std::string, int>> parent;
  std::deque<std::pair<std::string, int>> queue;
  auto push = [&](const std::string& n, int c, const std::string& pn, int pc) {
    c = std::min(c, 2);
    auto key = std::make_pair(n, c);
    if (parent.count(key)) return;
    parent[key] = {pn, pc};
    queue.push_back({n, c});
  };
  for (const auto& in : flow.inputs)
    push(in, barriers.count(in) ? 1 : 0, "", -1);
  BarrierValidation result;
  while (!queue.empty()) {
    auto [node, count] = queue.front();
    queue.pop_front();
    if (flow.is_public(node) && count != 1) {
      result.ok = false;
      result.crossings = count;
      std::pair<std::string, int> cur{node, count};
      while (!cur.first.empty()) {
        result.witness.push_back(cur.first);
        cur = parent.at(cur);
      }
      std::reverse(result.witness.begin(), result.witness.end());
      return result;
    }
    for (const auto& c : flow.next(node))
      push(c, count + (barriers.count(c) ? 1 : 0), node, count);
  }
  return result;
}

namespace {

// Minimum vertex cut between inputs and publics restricted to finite-bound
// private streams, via node-splitting max-flow. The sink-side residual cut
// picks the barrier set farthest from the inputs among minimum cuts.
std::set<std::string> minimum_cut(const DependencyGraph& graph,
                                  const SensitivityReport& report,
                                  const Flow& flow,
                                  const std::set<std::string>& relevant) {
  (void)flow;
  int n = static_cast<int>(graph.nodes.size());
  int source = 2 * n, sink = 2 * n + 1, vertices = 2 * n + 2;
  const long kInf = std::numeric_limits<long>::max() / 4;
  struct FlowEdge {
    int to;
    long cap;
    int rev;
  };
  std::vector<std::vector<FlowEdge>> adj(vertices);
  auto add_edge = [&](int a, int b, long cap) {
    adj[a].push_back({b, cap, static_cast<int>(adj[b].size())});
    adj[b].push_back({a, 0, static_cast<int>(adj[a].size()) - 1});
  };
  for (const auto& name : relevant) {
    int i = graph.index.at(name);
    add_edge(2 * i, 2 * i + 1, finite_bound(report, name) ? 1 : kInf);
    if (graph.is_input[i]) add_edge(source, 2 * i, kInf);
    if (graph.is_public[i]) add_edge(2 * i + 1, sink, kInf);
  }
  for (const auto& e : graph.edges) {
    if (e.from == e.to) continue;
    if (!relevant.count(e.from) || !relevant.count(e.to)) continue;
    add_edge(2 * graph.index.at(e.to) + 1, 2 * graph.index.at(e.from), kInf);
  }
  std::vector<int> level(vertices);
  auto bfs_levels = [&] {
    std::fill(level.begin(), level.end(), -1);
    std::deque<int> q{source};
    level[source] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (const auto& e : adj[u])
        if (e.cap > 0 && level[e.to] < 0) {
          level[e.to] = level[u] + 1;
          q.push_back(e.to);
        }
    }
    return level[sink] >= 0;
  };
  std::function<long(int, long, std::vector<std::size_t>&)> dfs =
      [&](int u, long pushed, std::vector<std::size_t>& it) -> long {
    if (u == sink) return pushed;
    for (; it[u] < adj[u].size(); ++it[u]) {
      FlowEdge& e = adj[u][it[u]];
      if (e.cap <= 0 || level[e.to] != level[u] + 1) continue;
      long got = dfs(e.to, std::min(pushed, e.cap), it);
      if (got > 0) {
        e.cap -= got;
        adj[e.to][e.rev].cap += got;
        return got;
      }
    }
    return 0;
  };
  while (bfs_levels()) {
    std::vector<std::size_t> it(vertices, 0);
    while (dfs(source, kInf, it) > 0) {
    }
  }
  // Sink side of the residual graph; a split node whose exit half can still
  // reach the sink while its entry half cannot is saturated, i.e. cut.
  std::vector<bool> to_sink(vertices, false);
  std::vector<std::vector<int>> rev(vertices);
  for (int u = 0; u < vertices; ++u)
    for (const auto& e : adj[u])
      if (e.cap > 0) rev[e.to].push_back(u);
  std::vector<int> stack{sink};
  to_sink[sink] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int p : rev[u])
      if (!to_sink[p]) {
        to_sink[p] = true;
        stack.push_back(p);
      }
  }
  std::set<std::string> cut;
  for (const auto& name : relevant) {
    int i = graph.index.at(name);
    if (to_sink[2 * i + 1] && !to_sink[2 * i]) cut.insert(name);
  }
  return cut;
}

}  // namespace

BarrierPlan select_barriers(const DependencyGraph& graph,
                            const SensitivityReport& report, Heuristic h,
                            const Rat& epsilon, const BudgetOptions& budget) {
  if (epsilon <= 0)
    throw SpecError("InvalidBudget", "epsilon must be positive");
  partition_segments(graph, report);  // raises MissingRange when uncuttable
  Flow flow(graph);
  std::set<std::string> relevant = relevant_streams(flow);

  auto is_private = [&](const std::string& n) {
    const StreamReport* sr = report.find(n);
    return sr && sr->segment == Segment::Private;
  };
  auto hosts_window = [&](const std::string& n) {
    for (const AccessEdge* e : graph.edges_from(n))
      if (e->kind == AccessEdge::Kind::Window) return true;
    return false;
  };

  std::set<std::string> chosen;
  switch (h) {
    case Heuristic::InputOnly: {
      for (const auto& in : flow.inputs) {
        if (!relevant.count(in)) continue;
        if (!is_private(in))
          throw SpecError("MissingRange",
                          "input '" + in +
                              "' reaches a public output but has no finite "
                              "range");
        chosen.insert(in);
      }
      break;
    }
    case Heuristic::Deep: {
      // The private frontier: last private stream before post-processing,
      // or a private stream released directly.
      for (const auto& n : relevant) {
        if (!is_private(n)) continue;
        bool frontier = flow.is_public(n);
        for (const auto& c : flow.next(n))
          if (relevant.count(c) && !is_private(c)) frontier = true;
        if (frontier) chosen.insert(n);
      }
      break;
    }
    case Heuristic::PostAggregation: {
      // First private window-bearing stream along each flow path; paths
      // that never meet one fall back to the deep frontier, and the whole
      // plan falls back to Deep if the mix does not validate.
      std::set<std::string> seen;
      std::vector<std::string> stack;
      for (const auto& in : flow.inputs)
        if (relevant.count(in)) stack.push_back(in);
      while (!stack.empty()) {
        std::string n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        for (const auto& c : flow.next(n)) {
          if (!relevant.count(c)) continue;
          if (hosts_window(c) && is_private(c))
            chosen.insert(c);
          else
            stack.push_back(c);
        }
      }
      for (const auto& n : seen) {
        if (!is_private(n) || !relevant.count(n)) continue;
        bool frontier = flow.is_public(n);
        for (const auto& c : flow.next(n))
          if (seen.count(c) && relevant.count(c) && !is_private(c))
            frontier = true;
        if (frontier) chosen.insert(n);
      }
      break;
    }
    case Heuristic::MinimalBarriers:
      chosen = minimum_cut(graph, report, flow, relevant);
      break;
  }

  BarrierValidation check = validate_barriers(graph, chosen);
  if (!check.ok && h == Heuristic::PostAggregation)
    return select_barriers(graph, report, Heuristic::Deep, epsilon, budget);
  if (!check.ok)
    throw SpecError("NoValidBarrier",
                    "heuristic '" + std::string(heuristic_name(h)) +
                        "' produced a barrier set with " +
                        std::to_string(check.crossings) +
                        " crossings on some path");

  BarrierPlan plan;
  plan.heuristic = h;
  plan.total_epsilon = epsilon;
  Rat weight_total = 0;
  std::map<std::string, Rat> weights;
  for (const auto& n : chosen) {
    Rat w = 1;
    if (auto it = budget.weights.find(n); it != budget.weights.end())
      w = it->second;
    if (w <= 0)
      throw SpecError("InvalidBudget",
                      "budget weight for '" + n + "' must be positive");
    weights[n] = w;
    weight_total += w;
  }
  for (const auto& n : graph.nodes) {
    if (!chosen.count(n)) continue;
    BarrierPlan::Entry e;
    e.stream = n;
    e.epsilon = epsilon * weights.at(n) / weight_total;
    plan.barriers.push_back(std::move(e));
  }
  return plan;
}

}  // namespace dpmon
