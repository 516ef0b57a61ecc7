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

#ifndef DPMON_PRINTER_HPP
#define DPMON_PRINTER_HPP

#include <string>

#include "dpmon/ast.hpp"

namespace dpmon {

// Canonical text for a specification. Parsing the result yields an equal
// specification (parse . render = id up to desugaring, which render has
// already applied).
std::string render_specification(const Specification& spec);

std::string render_expr(const Expr& e);

}  // namespace dpmon

#endif  // DPMON_PRINTER_HPP
