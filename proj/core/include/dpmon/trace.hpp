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

#ifndef DPMON_TRACE_HPP
#define DPMON_TRACE_HPP

#include <map>
#include <string>
#include <vector>

#include "dpmon/ast.hpp"

namespace dpmon {

// One input-event record: values for the inputs that fired at this time.
struct TraceRecord {
  Rat time;  // seconds
  std::map<std::string, double> values;
};

struct Trace {
  std::vector<TraceRecord> records;  // strictly increasing times
  long clamped_values = 0;  // out-of-range inputs clamped at ingest
};

// Parses CSV `time,<input1>,...`; empty cell = no event for that input.
// Values outside a declared input range are clamped and counted.
Trace parse_trace_csv(const std::string& text, const Specification& spec);

std::string render_trace_csv(const Trace& trace, const Specification& spec);

}  // namespace dpmon

#endif  // DPMON_TRACE_HPP
