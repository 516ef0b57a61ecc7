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

#ifndef DPMON_GRAPH_HPP
#define DPMON_GRAPH_HPP

#include <map>
#include <string>
#include <vector>

#include "dpmon/ast.hpp"

namespace dpmon {

// A stream access edge from the accessor to the accessed stream.
struct AccessEdge {
  enum class Kind { Sync, Offset, Hold, Window };
  std::string from, to;
  Kind kind = Kind::Sync;
  long offset = 0;                 // Kind::Offset
  std::optional<long> hold_bound;  // Kind::Hold; nullopt = unbounded
  Rat window;                      // Kind::Window, seconds
  AggFunc func = AggFunc::Sum;     // Kind::Window
};

struct DependencyGraph {
  std::vector<std::string> nodes;  // declaration order
  std::vector<AccessEdge> edges;   // declaration/occurrence order
  std::map<std::string, int> index;
  std::vector<bool> is_input;
  std::vector<bool> is_public;

  std::vector<const AccessEdge*> edges_from(const std::string& node) const;
  std::vector<const AccessEdge*> edges_to(const std::string& node) const;
};

// Builds the access graph; throws SpecError("IllegalCycle") if a cycle
// consists of Sync/Window edges only (such cycles have no evaluation order;
// legal cycles must pass through an Offset or Hold edge).
DependencyGraph build_dependency_graph(const Specification& spec);

// Streams lying on any dependency cycle (any edge kind), including
// self-loops. These streams have statically unbounded histories.
std::vector<std::string> cyclic_streams(const DependencyGraph& graph);

// Graphviz rendering; `annotations` adds a per-node badge (e.g. bounds).
std::string render_dot(const DependencyGraph& graph,
                       const std::map<std::string, std::string>& annotations = {});

}  // namespace dpmon

#endif  // DPMON_GRAPH_HPP
