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

#include "dpmon/analysis.hpp"

#include <doctest.h>

#include "dpmon/parser.hpp"
#include "golden.hpp"

using namespace dpmon;

namespace {

SensitivityReport golden_report(Specification* out_spec = nullptr) {
  auto spec = parse_specification(feedback_spec_text());
  auto graph = build_dependency_graph(spec);
  auto pacing = check_pacing_types(spec, graph);
  if (out_spec) *out_spec = spec;
  return compute_sensitivity_report(spec, graph, pacing);
}

}  // namespace

TEST_CASE("golden static bounds") {
  auto report = golden_report();
  CHECK(report.find("score")->bound == ExtRat(Rat(5)));
  CHECK(report.find("conf")->bound == ExtRat(Rat(2)));
  CHECK(report.find("adj")->bound == ExtRat(Rat(17)));
  CHECK(report.find("davg")->bound == ExtRat(Rat(51)));
  CHECK_FALSE(report.find("low")->bound.is_finite());
  CHECK_FALSE(report.find("high")->bound.is_finite());
  CHECK(report.find("range") == nullptr);  // tuple alias carries no value
}

TEST_CASE("golden ranges and influence") {
  auto report = golden_report();
  CHECK(report.find("adj")->range.lo == ExtRat(Rat(0)));
  CHECK(report.find("adj")->range.hi == ExtRat(Rat(17)));
  CHECK(report.find("davg")->range.lo == ExtRat(Rat(0)));
  CHECK(report.find("davg")->range.hi == ExtRat(Rat(17)));
  CHECK(report.find("adj")->influence == ExtRat(Rat(2)));
  CHECK(report.find("davg")->influence == ExtRat(Rat(6)));
  // Cyclic streams are unbounded in value.
  CHECK_FALSE(report.find("low")->range.lo.is_finite());
}

TEST_CASE("golden segment classification") {
  auto report = golden_report();
  for (const auto& n : {"score", "conf", "adj", "davg"})
    CHECK(report.find(n)->segment == Segment::Private);
  for (const auto& n : {"low", "high"})
    CHECK(report.find(n)->segment == Segment::PostProcessed);
}

TEST_CASE("group size scales input distances") {
  Specification spec = parse_specification(feedback_spec_text());
  spec.group_size = 3;
  auto graph = build_dependency_graph(spec);
  auto pacing = check_pacing_types(spec, graph);
  auto report = compute_sensitivity_report(spec, graph, pacing);
  CHECK(report.find("score")->bound == ExtRat(Rat(15)));
  CHECK(report.find("adj")->bound == ExtRat(Rat(51)));
}

TEST_CASE("window multiplier variants") {
  AnalysisOptions open, closed;
  closed.closed_windows = true;
  Pacing daily = Pacing::periodic(Rat(86400));
  CHECK(window_multiplier(Rat(3 * 86400), daily, open) == ExtRat(Rat(3)));
  CHECK(window_multiplier(Rat(3 * 86400), daily, closed) == ExtRat(Rat(4)));
  // Non-divisible window rounds up half-open, floor+1 closed: both 4 here.
  CHECK(window_multiplier(Rat(86400 * 7, 2), daily, open) == ExtRat(Rat(4)));
  CHECK(window_multiplier(Rat(86400 * 7, 2), daily, closed) == ExtRat(Rat(4)));
  CHECK_FALSE(
      window_multiplier(Rat(10), Pacing::event_based({"x"}), open).is_finite());
}

TEST_CASE("closed windows raise the davg bound") {
  auto spec = parse_specification(feedback_spec_text());
  auto graph = build_dependency_graph(spec);
  auto pacing = check_pacing_types(spec, graph);
  AnalysisOptions closed;
  closed.closed_windows = true;
  auto report = compute_sensitivity_report(spec, graph, pacing, closed);
  // Default branch: min(4*17 + 0, 2 * width) where davg range widens too.
  CHECK(report.find("davg")->bound == ExtRat(Rat(68)));
}

TEST_CASE("report json carries ranges, bounds and segments") {
  auto report = golden_report();
  std::string json = report.to_json();
  CHECK(json.find("\"davg\": {\"range\": [0, 17], \"influence\": 6, "
                  "\"bound\": 51, \"segment\": \"private\"") !=
        std::string::npos);
  CHECK(json.find("\"low\": {\"range\": [\"-inf\", \"inf\"], \"influence\": "
                  "\"inf\", \"bound\": \"inf\", \"segment\": "
                  "\"post-processed\"") != std::string::npos);
}
