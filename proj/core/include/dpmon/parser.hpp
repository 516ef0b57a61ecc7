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

#ifndef DPMON_PARSER_HPP
#define DPMON_PARSER_HPP

#include <string>

#include "dpmon/ast.hpp"

namespace dpmon {

struct ParseOptions {
  // laplace(...) and tree intrinsics are emitted by the compiler pass only;
  // they are rejected in user-supplied specifications.
  bool allow_intrinsics = false;
};

// Parses the surface syntax into a Specification. Throws SpecError with
// line/column on malformed input. parse(render(s)) == s structurally.
Specification parse_specification(const std::string& text,
                                  const ParseOptions& options = {});

}  // namespace dpmon

#endif  // DPMON_PARSER_HPP
