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

#ifndef DPMON_EXPERIMENTS_HPP
#define DPMON_EXPERIMENTS_HPP

#include "dpmon/transform.hpp"
#include "dpmon/trace.hpp"

namespace dpmon {

// ---------------------------------------------------------------------------
// Variance study: a daily average-release pipeline with a configurable
// window, released under the three noise placements (input-only barriers,
// a plain laplace barrier on the release, and the sliding-tree rewrite of
// the same barrier), on one fixed trace with a configurable number of
// events per day ("values per bucket").
// ---------------------------------------------------------------------------

struct VarianceConfig {
  int runs = 200;
  Rat epsilon = 1;
  std::vector<long> windows = {1, 2, 3, 4, 5, 6, 7, 8,
                               9, 10, 11, 12, 13, 14, 15};
  std::vector<long> values_per_bucket = {1, 10, 100};
  long horizon_days = 24;        // releases averaged over full windows only
  std::uint64_t seed_base = 1;   // run r uses seed seed_base + r
  std::uint64_t trace_seed = 99;
  unsigned threads = 0;          // 0 = hardware concurrency
};

struct VarianceRow {
  std::string method;  // input-only | regular | tree
  long window;
  long vpb;
  double variance;
};

// The single-input release pipeline used by the study; `window` in days.
std::string variance_spec_text(long window_days);

std::vector<VarianceRow> run_variance_study(const VarianceConfig& config);
std::string variance_csv(const std::vector<VarianceRow>& rows);

// ---------------------------------------------------------------------------
// Bus-line case study: three fixed lines with hourly sum/count releases,
// a count > 5 release gate, epsilon = 1 and the deep heuristic; the
// released hourly average is the gated noisy sum over the exact count.
// ---------------------------------------------------------------------------

struct CaseStudyConfig {
  int runs = 200;
  Rat epsilon = 1;
  long days = 3;
  std::uint64_t seed_base = 1;
  std::uint64_t trace_seed = 7;
  unsigned threads = 0;
};

struct CaseStudyRow {
  std::string line;
  long hour;        // absolute hour index from trace start
  long count;       // exact number of events that hour
  long releases;    // runs in which the gate opened
  double truth;     // true mean crowdedness (0 if no events)
  double mean;      // mean released average across releasing runs
  double sd;        // SD of the released average across releasing runs
};

struct CaseStudyResult {
  std::vector<CaseStudyRow> rows;  // line-major, hour ascending
};

std::string casestudy_spec_text();

// Synthetic three-line trace: university 80/hr in 7-18, city 50/hr in 6-22
// with a 1.5x noon peak, night 10/hr in 22-05; crowdedness values in
// [1, 10]. Deterministic per seed.
Trace generate_casestudy_trace(std::uint64_t seed, long days,
                               const Specification& spec);

CaseStudyResult run_case_study(const CaseStudyConfig& config);
std::string case_study_csv(const CaseStudyResult& result);

}  // namespace dpmon

#endif  // DPMON_EXPERIMENTS_HPP
