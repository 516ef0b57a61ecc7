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

#include "dpmon/graph.hpp"

#include <functional>
#include <sstream>

#include "dpmon/diagnostics.hpp"

namespace dpmon {

std::vector<const AccessEdge*> DependencyGraph::edges_from(
    const std::string& node) const {
  std::vector<const AccessEdge*> out;
  for (const auto& e : edges)
    if (e.from == node) out.push_back(&e);
  return out;
}

std::vector<const AccessEdge*> DependencyGraph::edges_to(
    const std::string& node) const {
  std::vector<const AccessEdge*> out;
  for (const auto& e : edges)
    if (e.to == node) out.push_back(&e);
  return out;
}

namespace {

void collect_accesses(const std::string& from, const ExprPtr& e,
                      std::vector<AccessEdge>& edges) {
  visit_expr(e, [&](const Expr& node) {
    AccessEdge edge;
    edge.from = from;
    switch (node.kind) {
      case Expr::Kind::Sync:
        edge.kind = AccessEdge::Kind::Sync;
        break;
      case Expr::Kind::Offset:
        edge.kind = AccessEdge::Kind::Offset;
        edge.offset = node.offset;
        break;
      case Expr::Kind::Hold:
        edge.kind = AccessEdge::Kind::Hold;
        edge.hold_bound = node.hold_bound;
        break;
      case Expr::Kind::Aggregate:
        edge.kind = AccessEdge::Kind::Window;
        edge.window = node.window;
        edge.func = node.func;
        break;
      case Expr::Kind::Tree:
        edge.kind = AccessEdge::Kind::Window;
        edge.window = node.window;
        edge.func = node.func;
        break;
      default:
        return;
    }
    edge.to = node.stream;
    // One edge per distinct access; repeated identical accesses collapse.
    for (const auto& existing : edges)
      if (existing.from == edge.from && existing.to == edge.to &&
          existing.kind == edge.kind && existing.offset == edge.offset &&
          existing.hold_bound == edge.hold_bound &&
          existing.window == edge.window && existing.func == edge.func)
        return;
    edges.push_back(std::move(edge));
  });
}

// Cycle detection restricted to an edge subset, by iterative DFS.
bool has_cycle(const DependencyGraph& g,
               const std::function<bool(const AccessEdge&)>& keep,
               std::vector<std::string>* witness) {
  int n = static_cast<int>(g.nodes.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : g.edges)
    if (keep(e)) adj[g.index.at(e.from)].push_back(g.index.at(e.to));
  std::vector<int> state(n, 0);  // 0 unseen, 1 on stack, 2 done
  std::vector<int> parent(n, -1);
  std::function<bool(int)> dfs = [&](int u) -> bool {
    state[u] = 1;
    for (int v : adj[u]) {
      if (state[v] == 1) {
        if (witness) {
          witness->push_back(g.nodes[v]);
          for (int w = u; w != -1 && w != v; w = parent[w])
            witness->push_back(g.nodes[w]);
          witness->push_back(g.nodes[v]);
        }
        return true;
      }
      if (state[v] == 0) {
        parent[v] = u;
        if (dfs(v)) return true;
      }
    }
    state[u] = 2;
    return false;
  };
  for (int u = 0; u < n; ++u)
    if (state[u] == 0 && dfs(u)) return true;
  return false;
}

}  // namespace

DependencyGraph build_dependency_graph(const Specification& spec) {
  DependencyGraph g;
  std::set<std::string> publics = spec.public_set();
  for (const auto& name : spec.stream_names()) {
    g.index[name] = static_cast<int>(g.nodes.size());
    g.nodes.push_back(name);
    g.is_input.push_back(spec.find_input(name) != nullptr);
    g.is_public.push_back(publics.count(name) > 0);
  }
  for (const auto& out : spec.outputs)
    if (out.expr) collect_accesses(out.name, out.expr, g.edges);

  std::vector<std::string> cycle;
  if (has_cycle(
          g,
          [](const AccessEdge& e) {
            return e.kind == AccessEdge::Kind::Sync ||
                   e.kind == AccessEdge::Kind::Window;
          },
          &cycle)) {
    std::string path;
    for (auto it = cycle.rbegin(); it != cycle.rend(); ++it) {
      if (!path.empty()) path += " -> ";
      path += *it;
    }
    throw SpecError("IllegalCycle",
                    "cycle without an offset or hold access: " + path);
  }
  return g;
}

std::vector<std::string> cyclic_streams(const DependencyGraph& g) {
  // Tarjan-free approach: a node is cyclic iff it reaches itself.
  int n = static_cast<int>(g.nodes.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : g.edges)
    adj[g.index.at(e.from)].push_back(g.index.at(e.to));
  std::vector<std::string> result;
  for (int s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack = adj[s];
    bool cyclic = false;
    while (!stack.empty() && !cyclic) {
      int u = stack.back();
      stack.pop_back();
      if (u == s) cyclic = true;
      if (u < 0 || seen[u]) continue;
      seen[u] = true;
      for (int v : adj[u]) stack.push_back(v);
    }
    if (cyclic) result.push_back(g.nodes[s]);
  }
  return result;
}

std::string render_dot(const DependencyGraph& g,
                       const std::map<std::string, std::string>& annotations) {
  std::ostringstream os;
  os << "digraph dependencies {\n  rankdir=TB;\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    os << "  " << g.nodes[i] << " [shape=ellipse";
    std::string label = g.nodes[i];
    auto it = annotations.find(g.nodes[i]);
    if (it != annotations.end()) label += "\\n" + it->second;
    os << ",label=\"" << label << "\"";
    if (g.is_input[i]) os << ",style=bold";
    if (g.is_public[i]) os << ",peripheries=2";
    os << "];\n";
  }
  for (const auto& e : g.edges) {
    os << "  " << e.from << " -> " << e.to << " [label=\"";
    switch (e.kind) {
      case AccessEdge::Kind::Sync: os << "0"; break;
      case AccessEdge::Kind::Offset: os << "-" << e.offset; break;
      case AccessEdge::Kind::Hold:
        os << "hold";
        if (e.hold_bound) os << " " << *e.hold_bound;
        break;
      case AccessEdge::Kind::Window: os << format_duration(e.window); break;
    }
    os << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace dpmon
