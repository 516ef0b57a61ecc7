// Copyright 2026 The dpmon Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DPMON_TESTS_GOLDEN_HPP
#define DPMON_TESTS_GOLDEN_HPP

#include <string>

// The user-feedback specification used as the end-to-end golden case:
// ratings in [1,6] and confidences in [-1,1] combine into an adjusted
// rating, a daily 3-day average, and running min/max released publicly.
inline std::string feedback_spec_text() {
  return R"(// user feedback statistics
input score : Int64 range [1, 6]
input conf : Int64 range [-1, 1]
output adj := (6 - score) * 3 + conf + 1
output davg @1d@ := adj.aggregate(over: 3d, using: avg).defaults(to: 0.0)
output low @1d@ := min(low.offset(by: -1).defaults(to: 15.0), davg)
output high @1d@ := max(high.offset(by: -1).defaults(to: 0.0), davg)
#[public]
output range @1d@ := (low, high)
)";
}

#endif  // DPMON_TESTS_GOLDEN_HPP
