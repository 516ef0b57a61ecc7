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
//
// Acceptance gate: one pass/fail line per criterion, exit code 0 only if
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dpmon/delta.hpp"
#include "dpmon/experiments.hpp"
#include "dpmon/parser.hpp"
#include "dpmon/transform.hpp"
#include "dpmon/tree.hpp"
#include "golden.hpp"
#include "soundness.hpp"

namespace {

using namespace dpmon;
using Clock = std::chrono::steady_clock;

struct Pipeline {
  Specification spec;
  DependencyGraph graph;
  std::map<std::string, Pacing> pacing;
  SensitivityReport report;
};

Pipeline analyze(const std::string& text) {
  Pipeline p;
  p.spec = parse_specification(text);
  p.graph = build_dependency_graph(p.spec);
  p.pacing = check_pacing_types(p.spec, p.graph);
  p.report = compute_sensitivity_report(p.spec, p.graph, p.pacing);
  return p;
}

// --- criterion 1: golden static analysis, under one second -----------------

std::string criterion1(double& seconds) {
  auto t0 = Clock::now();
  Pipeline p = analyze(feedback_spec_text());
  seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream why;
  auto expect_bound = [&](const char* name, long b) {
    const StreamReport* sr = p.report.find(name);
    if (!sr)
      why << " missing stream " << name << ";";
    else if (!sr->bound.is_finite() || sr->bound.finite() != Rat(b))
      why << " bound(" << name << ") != " << b << ";";
  };
  expect_bound("score", 5);
  expect_bound("conf", 2);
  expect_bound("adj", 17);
  expect_bound("davg", 51);
  auto expect_influence = [&](const char* name, long n) {
    const StreamReport* sr = p.report.find(name);
    if (sr && (!sr->influence.is_finite() || sr->influence.finite() != Rat(n)))
      why << " influence(" << name << ") != " << n << ";";
  };
  expect_influence("adj", 2);
  expect_influence("davg", 6);
  for (const char* name : {"score", "conf", "adj", "davg"}) {
    const StreamReport* sr = p.report.find(name);
    if (sr && sr->segment != Segment::Private)
      why << " " << name << " not in the private segment;";
  }
  for (const char* name : {"low", "high"}) {
    const StreamReport* sr = p.report.find(name);
    if (!sr)
      why << " missing stream " << name << ";";
    else if (sr->segment != Segment::PostProcessed)
      why << " " << name << " not post-processed;";
  }
  const StreamReport* adj = p.report.find("adj");
  if (adj && !(adj->range.lo == ExtRat(Rat(0)) && adj->range.hi == ExtRat(Rat(17))))
    why << " range(adj) != [0, 17];";
  if (seconds >= 1.0) why << " analysis took " << seconds << "s (budget 1s);";
  return why.str();
}

// --- criterion 2: heuristic plans + exactly-one-crossing --------------------

std::string criterion2() {
  Pipeline p = analyze(feedback_spec_text());
  std::ostringstream why;
  auto expect_plan = [&](Heuristic h, std::set<std::string> want) {
    BarrierPlan plan = select_barriers(p.graph, p.report, h, Rat(1));
    std::set<std::string> got;
    for (const auto& e : plan.barriers) got.insert(e.stream);
    if (got != want) {
      why << " " << heuristic_name(h) << " chose {";
      for (const auto& s : got) why << " " << s;
      why << " };";
    }
    BarrierValidation v = validate_barriers(p.graph, got);
    if (!v.ok)
      why << " " << heuristic_name(h) << " crossings=" << v.crossings << ";";
  };
  expect_plan(Heuristic::InputOnly, {"score", "conf"});
  expect_plan(Heuristic::Deep, {"davg"});
  expect_plan(Heuristic::PostAggregation, {"davg"});
  expect_plan(Heuristic::MinimalBarriers, {"davg"});
  return why.str();
}

// --- criterion 3: 500 randomized soundness cases, under two minutes ---------

std::string criterion3(double& seconds) {
  auto t0 = Clock::now();
  std::ostringstream why;
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto bad = dpmon::testing::check_sound_case(seed);
    if (bad) {
      why << " [" << bad->substr(0, bad->find('\n')) << "]";
      if (++failures >= 3) break;
    }
  }
  seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (seconds >= 120.0) why << " took " << seconds << "s (budget 120s);";
  return why.str();
}

// --- criterion 4: tree aggregation exactness, both modes, to 256 buckets ----

std::string criterion4() {
  std::ostringstream why;
  const long kBuckets = 256;
  std::vector<double> sums(kBuckets);
  std::vector<long> counts(kBuckets);
  CounterRng rng(11, 0xacce9704);
  for (long i = 0; i < kBuckets; ++i) {
    counts[i] = static_cast<long>(rng.next_u64() % 7);
    sums[i] = static_cast<double>(rng.next_u64() % 1000) * (counts[i] > 0);
  }
  // All-time prefix release after every bucket.
  {
    TreeState tree(0, 100.0, 1.0, TreeState::BudgetMode::Geometric, 1, 2,
                   /*zero_noise=*/true);
    double prefix = 0;
    long n = 0;
    for (long i = 0; i < kBuckets; ++i) {
      tree.ingest_bucket(sums[i], counts[i]);
      prefix += sums[i];
      n += counts[i];
      if (std::fabs(tree.release_sum() - prefix) > 1e-6) {
        why << " all-time sum wrong at bucket " << i << ";";
        break;
      }
      if (tree.release_count() != n) {
        why << " all-time count wrong at bucket " << i << ";";
        break;
      }
    }
  }
  // Sliding windows of every size up to the full horizon.
  for (long w : {1L, 2L, 3L, 5L, 8L, 16L, 31L, 64L, 128L, 256L}) {
    TreeState tree(w, 100.0, 1.0, TreeState::BudgetMode::UniformSliding, 1, 2,
                   /*zero_noise=*/true);
    for (long i = 0; i < kBuckets; ++i) {
      tree.ingest_bucket(sums[i], counts[i]);
      double want = 0;
      long n = 0;
      for (long j = std::max(0L, i - w + 1); j <= i; ++j) {
        want += sums[j];
        n += counts[j];
      }
      if (std::fabs(tree.release_sum() - want) > 1e-6 ||
          tree.release_count() != n) {
        why << " sliding w=" << w << " wrong at bucket " << i << ";";
        break;
      }
    }
  }
  return why.str();
}

// --- criterion 5: Laplace sampler moments -----------------------------------

std::string criterion5() {
  std::ostringstream why;
  const int kDraws = 100000;
  int which = 0;
  for (double b : {1.0, 3.0, 51.0}) {
    CounterRng rng(2026, 0x1a91ace0 + which++);
    double sum = 0, sq = 0;
    for (int i = 0; i < kDraws; ++i) {
      double x = sample_laplace(b, rng);
      sum += x;
      sq += x * x;
    }
    double mean = sum / kDraws;
    double var = sq / kDraws - mean * mean;
    if (std::fabs(mean) > 0.05 * b)
      why << " b=" << b << " mean " << mean << " off;";
    if (std::fabs(var - 2 * b * b) > 0.10 * (2 * b * b))
      why << " b=" << b << " variance " << var << " off;";
  }
  return why.str();
}

// --- criterion 6: variance study orderings ----------------------------------

std::string criterion6(double& seconds) {
  auto t0 = Clock::now();
  VarianceConfig config;  // 200 runs, eps 1, windows 1..15, vpb {1, 10, 100}
  std::vector<VarianceRow> rows = run_variance_study(config);
  seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  std::map<std::tuple<std::string, long, long>, double> v;
  for (const auto& r : rows) v[{r.method, r.window, r.vpb}] = r.variance;
  std::ostringstream why;
  for (long vpb : config.values_per_bucket) {
    if (!(v.at({"tree", 15, vpb}) < v.at({"regular", 15, vpb})))
      why << " tree !< regular at w=15 vpb=" << vpb << ";";
    for (long w : config.windows) {
      // Noisy regular releases carry pure Laplace noise of scale 17w.
      double analytic = 2.0 * (17.0 * w) * (17.0 * w);
      double got = v.at({"regular", w, vpb});
      if (std::fabs(got - analytic) > 0.25 * analytic)
        why << " regular w=" << w << " vpb=" << vpb << " var " << got
            << " vs analytic " << analytic << ";";
      if (vpb == 1 && w >= 2) {
        if (!(v.at({"input-only", w, vpb}) < v.at({"regular", w, vpb})) ||
            !(v.at({"input-only", w, vpb}) < v.at({"tree", w, vpb})))
          why << " input-only not lowest at w=" << w << " vpb=1;";
      }
      if (vpb == 100 && w >= 5) {
        if (!(v.at({"input-only", w, vpb}) > v.at({"regular", w, vpb})) ||
            !(v.at({"input-only", w, vpb}) > v.at({"tree", w, vpb})))
          why << " input-only not highest at w=" << w << " vpb=100;";
      }
    }
  }
  if (seconds >= 600.0) why << " took " << seconds << "s (budget 600s);";
  return why.str();
}

// --- criterion 7: bus-line case study ---------------------------------------

std::string criterion7(double& seconds) {
  auto t0 = Clock::now();
  CaseStudyConfig config;  // 200 runs, eps 1, 3 days
  CaseStudyResult result = run_case_study(config);
  seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream why;
  // Sparse night hours must be visibly noisier than any university hour.
  double max_uni_sd = 0;
  for (const auto& r : result.rows)
    if (r.line == "uni" && r.releases > 0) max_uni_sd = std::max(max_uni_sd, r.sd);
  long night_hours = 0, night_noisier = 0;
  for (const auto& r : result.rows)
    if (r.line == "night" && r.releases > 0) {
      ++night_hours;
      if (r.sd > max_uni_sd) ++night_noisier;
    }
  if (night_hours == 0)
    why << " no released night hours;";
  else if (night_noisier < 0.90 * night_hours)
    why << " only " << night_noisier << "/" << night_hours
        << " night hours noisier than every uni hour;";
  // Busy daytime releases track the true hourly average.
  long day_hours = 0, day_close = 0;
  for (const auto& r : result.rows) {
    if (r.line == "night" || r.releases < config.runs / 2 || r.count <= 5)
      continue;
    ++day_hours;
    if (std::fabs(r.mean - r.truth) <= 3.0 * r.sd) ++day_close;
  }
  if (day_hours == 0)
    why << " no busy daytime hours;";
  else if (day_close < 0.95 * day_hours)
    why << " only " << day_close << "/" << day_hours
        << " daytime hours within 3 SD of truth;";
  if (seconds >= 600.0) why << " took " << seconds << "s (budget 600s);";
  return why.str();
}

// --- criterion 8: exact rational budget accounting --------------------------

std::string criterion8() {
  Pipeline p = analyze(feedback_spec_text());
  std::ostringstream why;
  {
    BarrierPlan plan = select_barriers(p.graph, p.report, Heuristic::Deep, Rat(1));
    if (plan.barriers.size() != 1 || plan.barriers[0].epsilon != Rat(1))
      why << " deep budget not exactly 1;";
    Rat scale = p.report.find("davg")->bound.finite() / plan.barriers[0].epsilon;
    if (scale != Rat(51)) why << " deep scale != 51;";
  }
  {
    BudgetOptions budget;
    budget.weights = {{"score", Rat(2)}, {"conf", Rat(5)}};
    Rat eps = Rat(1) / 3;
    BarrierPlan plan =
        select_barriers(p.graph, p.report, Heuristic::InputOnly, eps, budget);
    Rat sum = 0;
    for (const auto& e : plan.barriers) sum += e.epsilon;
    if (sum != eps || plan.total_epsilon != eps)
      why << " weighted budgets do not sum to epsilon exactly;";
    const BarrierPlan::Entry* score = plan.find("score");
    const BarrierPlan::Entry* conf = plan.find("conf");
    if (!score || score->epsilon != Rat(2) / 21) why << " eps(score) != 2/21;";
    if (!conf || conf->epsilon != Rat(5) / 21) why << " eps(conf) != 5/21;";
    if (score && Rat(5) / score->epsilon != Rat(105) / 2)
      why << " scale(score) != 105/2;";
    if (conf && Rat(2) / conf->epsilon != Rat(42) / 5)
      why << " scale(conf) != 42/5;";
  }
  return why.str();
}

// --- criterion 9: byte-identical output per seed ----------------------------

std::string run_pipeline_jsonl(std::uint64_t seed) {
  Pipeline p = analyze(feedback_spec_text());
  BarrierPlan plan = select_barriers(p.graph, p.report, Heuristic::Deep, Rat(1));
  TransformResult tr = inject_noise(p.spec, p.graph, p.report, p.pacing, plan);
  Trace trace = parse_trace_csv(
      "time,score,conf\n10000,6,0\n20000,1,1\n90000,3,-1\n", tr.spec);
  EvalOptions options;
  options.seed = seed;
  EvaluationModel model = evaluate(tr.spec, trace, Rat(172800), options);
  return render_jsonl(tr.spec, model);
}

std::string criterion9() {
  std::ostringstream why;
  std::string a = run_pipeline_jsonl(42);
  std::string b = run_pipeline_jsonl(42);
  std::string c = run_pipeline_jsonl(43);
  if (a != b) why << " same seed produced different bytes;";
  if (a == c) why << " different seeds produced identical bytes;";
  if (a.empty()) why << " empty output;";
  return why.str();
}

// --- criterion 10: likelihood-ratio falsification of the DP guarantee -------

std::string criterion10() {
  Pipeline p = analyze(feedback_spec_text());
  BarrierPlan plan = select_barriers(p.graph, p.report, Heuristic::Deep, Rat(1));
  TransformResult tr = inject_noise(p.spec, p.graph, p.report, p.pacing, plan);
  // Extremal adjacent single-event traces: adj = 17 versus adj = 0. All
  // three daily windows see the difference, spending the whole budget.
  Trace trace_a = parse_trace_csv("time,score,conf\n10000,1,1\n", tr.spec);
  Trace trace_b = parse_trace_csv("time,score,conf\n10000,6,-1\n", tr.spec);
  const Rat horizon(259200);
  const int kRuns = 10000;
  auto statistic = [&](const Trace& trace, std::uint64_t seed) {
    EvalOptions options;
    options.seed = seed;
    EvaluationModel m = evaluate(tr.spec, trace, horizon, options);
    double s = 0;
    for (int t : m.pacing.schedule.at("davg")) s += *m.at("davg", t);
    return s;
  };
  std::vector<double> xa(kRuns), xb(kRuns);
  for (int r = 0; r < kRuns; ++r) {
    xa[r] = statistic(trace_a, 1000 + r);
    xb[r] = statistic(trace_b, 1000 + r);
  }
  // 20 equal-probability bins from the pooled sample.
  std::vector<double> pooled;
  pooled.reserve(2 * kRuns);
  pooled.insert(pooled.end(), xa.begin(), xa.end());
  pooled.insert(pooled.end(), xb.begin(), xb.end());
  std::sort(pooled.begin(), pooled.end());
  const int kBins = 20;
  std::vector<double> edges;
  for (int i = 1; i < kBins; ++i)
    edges.push_back(pooled[pooled.size() * i / kBins]);
  auto histogram = [&](const std::vector<double>& xs) {
    std::vector<double> h(kBins, 0);
    for (double x : xs)
      h[std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()] += 1;
    for (double& c : h) c /= kRuns;
    return h;
  };
  std::vector<double> pa = histogram(xa), pb = histogram(xb);
  const double e_eps = std::exp(1.0);
  std::ostringstream why;
  for (int i = 0; i < kBins; ++i) {
    auto check = [&](double lhs, double rhs, const char* dir) {
      double se = std::sqrt(lhs * (1 - lhs) / kRuns +
                            e_eps * e_eps * rhs * (1 - rhs) / kRuns);
      if (lhs > e_eps * rhs + 3 * se)
        why << " bin " << i << " " << dir << ": " << lhs << " > e^eps*" << rhs
            << " + 3se;";
    };
    check(pa[i], pb[i], "a/b");
    check(pb[i], pa[i], "b/a");
  }
  return why.str();
}

int report(int n, const char* title, const std::string& why, double seconds) {
  std::ostringstream line;
  line << (why.empty() ? "PASS" : "FAIL") << " criterion " << n << ": "
       << title;
  if (seconds >= 0) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " (%.1fs)", seconds);
    line << buf;
  }
  if (!why.empty()) line << " --" << why;
  std::cout << line.str() << std::endl;
  return why.empty() ? 0 : 1;
}

}  // namespace

int main() {
  int failures = 0;
  double s = -1;
  try {
    std::string why;
    why = criterion1(s);
    failures += report(1, "golden static analysis", why, s);
    failures += report(2, "barrier heuristics and crossing validation",
                       criterion2(), -1);
    why = criterion3(s);
    failures += report(3, "randomized sensitivity soundness (500 cases)", why,
                       s);
    failures += report(4, "tree aggregation exactness", criterion4(), -1);
    failures += report(5, "Laplace sampler moments", criterion5(), -1);
    why = criterion6(s);
    failures += report(6, "variance study orderings", why, s);
    why = criterion7(s);
    failures += report(7, "bus-line case study", why, s);
    failures += report(8, "exact rational budget accounting", criterion8(), -1);
    failures += report(9, "deterministic output per seed", criterion9(), -1);
    failures += report(10, "likelihood-ratio DP falsification", criterion10(),
                       -1);
  } catch (const std::exception& e) {
    std::cout << "FAIL: unexpected exception: " << e.what() << std::endl;
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
