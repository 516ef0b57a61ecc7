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

#include "dpmon/trace.hpp"

#include <charconv>
#include <sstream>

#include "dpmon/diagnostics.hpp"

namespace dpmon {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

}  // namespace

Trace parse_trace_csv(const std::string& text, const Specification& spec) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> columns;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (columns.empty()) {
      for (auto& c : cells) columns.push_back(trim(c));
      if (columns.empty() || columns[0] != "time")
        throw SpecError("TraceFormat", "first CSV column must be 'time'", lineno);
      for (std::size_t i = 1; i < columns.size(); ++i)
        if (!spec.find_input(columns[i]))
          throw SpecError("TraceFormat",
                          "unknown input column '" + columns[i] + "'", lineno);
      continue;
    }
    TraceRecord rec;
    auto t = parse_rational(trim(cells[0]));
    if (!t)
      throw SpecError("TraceFormat", "bad time '" + cells[0] + "'", lineno);
    rec.time = *t;
    if (!trace.records.empty() && !(trace.records.back().time < rec.time))
      throw SpecError("TraceFormat", "times must be strictly increasing", lineno);
    for (std::size_t i = 1; i < cells.size() && i < columns.size(); ++i) {
      std::string cell = trim(cells[i]);
      if (cell.empty()) continue;
      double v = 0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || p != cell.data() + cell.size())
        throw SpecError("TraceFormat", "bad value '" + cell + "'", lineno);
      const InputDecl* input = spec.find_input(columns[i]);
      if (input->bounded) {
        double lo = to_double(input->lo), hi = to_double(input->hi);
        if (v < lo) { v = lo; ++trace.clamped_values; }
        if (v > hi) { v = hi; ++trace.clamped_values; }
      }
      rec.values[columns[i]] = v;
    }
    if (!rec.values.empty()) trace.records.push_back(std::move(rec));
  }
  return trace;
}

std::string render_trace_csv(const Trace& trace, const Specification& spec) {
  std::ostringstream os;
  os << "time";
  for (const auto& in : spec.inputs) os << "," << in.name;
  os << "\n";
  for (const auto& rec : trace.records) {
    os << format_rational(rec.time);
    for (const auto& in : spec.inputs) {
      os << ",";
      auto it = rec.values.find(in.name);
      if (it != rec.values.end()) os << format_double(it->second);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace dpmon
