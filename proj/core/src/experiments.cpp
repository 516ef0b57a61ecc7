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

#include "dpmon/experiments.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>

#include "dpmon/delta.hpp"
#include "dpmon/diagnostics.hpp"
#include "dpmon/eval.hpp"
#include "dpmon/parser.hpp"
#include "dpmon/rng.hpp"

namespace dpmon {

namespace {

constexpr long kDay = 86400;
constexpr long kHour = 3600;

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void parallel_runs(int runs, unsigned threads,
                   const std::function<void(int)>& fn) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(runs));
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < runs; r = next.fetch_add(1)) fn(r);
    });
  for (auto& t : pool) t.join();
}

double sample_variance(const std::vector<double>& xs) {
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / (xs.size() - 1);
}

long knuth_poisson(double lambda, CounterRng& rng) {
  if (lambda <= 0) return 0;
  double limit = std::exp(-lambda);
  long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.next_unit();
  } while (p > limit);
  return k - 1;
}

struct CompiledPipeline {
  Specification spec;
  DependencyGraph graph;
  std::map<std::string, Pacing> pacing;
  SensitivityReport report;
};

CompiledPipeline analyze_text(const std::string& text) {
  CompiledPipeline p;
  p.spec = parse_specification(text);
  p.graph = build_dependency_graph(p.spec);
  p.pacing = check_pacing_types(p.spec, p.graph);
  p.report = compute_sensitivity_report(p.spec, p.graph, p.pacing);
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Variance study
// ---------------------------------------------------------------------------

std::string variance_spec_text(long window_days) {
  std::ostringstream os;
  os << "input rating : Float64 range [0, 17]\n"
     << "#[public]\n"
     << "output davg @1d@ := rating.aggregate(over: " << window_days
     << "d, using: sum)\n";
  return os.str();
}

namespace {

Trace variance_trace(long vpb, long horizon_days, std::uint64_t trace_seed) {
  Trace trace;
  CounterRng rng(trace_seed, 0x7261746eULL, static_cast<std::uint64_t>(vpb));
  for (long d = 0; d < horizon_days; ++d)
    for (long j = 0; j < vpb; ++j) {
      TraceRecord rec;
      rec.time = Rat(d * kDay) + Rat(kDay * (j + 1), vpb + 1);
      rec.values["rating"] = 17.0 * rng.next_unit();
      trace.records.push_back(std::move(rec));
    }
  return trace;
}

}  // namespace

std::vector<VarianceRow> run_variance_study(const VarianceConfig& config) {
  if (config.runs < 2)
    throw SpecError("InvalidConfig", "variance needs at least 2 runs");
  std::vector<VarianceRow> rows;
  for (long vpb : config.values_per_bucket) {
    Trace trace = variance_trace(vpb, config.horizon_days, config.trace_seed);
    for (long window : config.windows) {
      CompiledPipeline p = analyze_text(variance_spec_text(window));
      auto plan_inputs =
          select_barriers(p.graph, p.report, Heuristic::InputOnly,
                          config.epsilon);
      auto plan_deep =
          select_barriers(p.graph, p.report, Heuristic::Deep, config.epsilon);
      TransformOptions tree_opts;
      tree_opts.tree_aggregation = true;
      struct Method {
        std::string name;
        Specification spec;
      };
      std::vector<Method> methods = {
          {"input-only",
           inject_noise(p.spec, p.graph, p.report, p.pacing, plan_inputs)
               .spec},
          {"regular",
           inject_noise(p.spec, p.graph, p.report, p.pacing, plan_deep).spec},
          {"tree", inject_noise(p.spec, p.graph, p.report, p.pacing, plan_deep,
                                tree_opts)
                       .spec},
      };
      Rat horizon = Rat(config.horizon_days * kDay);
      for (const auto& method : methods) {
        // values[run] = davg releases with a fully-populated window.
        std::vector<std::vector<double>> values(config.runs);
        parallel_runs(config.runs, config.threads, [&](int r) {
          EvalOptions opts;
          opts.seed = config.seed_base + static_cast<std::uint64_t>(r);
          auto model = evaluate(method.spec, trace, horizon, opts);
          const auto& schedule = model.pacing.schedule.at("davg");
          for (std::size_t rank = static_cast<std::size_t>(window);
               rank < schedule.size(); ++rank) {
            auto v = model.at("davg", schedule[rank]);
            values[r].push_back(v ? *v : 0.0);
          }
        });
        double acc = 0;
        std::size_t points = values[0].size();
        std::vector<double> column(config.runs);
        for (std::size_t i = 0; i < points; ++i) {
          for (int r = 0; r < config.runs; ++r) column[r] = values[r][i];
          acc += sample_variance(column);
        }
        rows.push_back({method.name, window, vpb,
                        points ? acc / static_cast<double>(points) : 0.0});
      }
    }
  }
  return rows;
}

std::string variance_csv(const std::vector<VarianceRow>& rows) {
  std::string out = "method,window,vpb,variance\n";
  for (const auto& r : rows) {
    out += r.method;
    out += ',';
    out += std::to_string(r.window);
    out += ',';
    out += std::to_string(r.vpb);
    out += ',';
    append_double(out, r.variance);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Case study
// ---------------------------------------------------------------------------

std::string casestudy_spec_text() {
  std::ostringstream os;
  for (const char* line : {"uni", "city", "night"})
    os << "input " << line << " : Float64 range [1, 10]\n";
  for (const char* line : {"uni", "city", "night"}) {
    os << "output " << line << "_sum @1h@ := " << line
       << ".aggregate(over: 1h, using: sum)\n"
       << "#[public]\n"
       << "output " << line << "_n @1h@ := " << line
       << ".aggregate(over: 1h, using: count)\n"
       << "#[public]\n"
       << "output " << line << "_rel @1h@ := if " << line << "_n > 5 then "
       << line << "_sum else 0 - 1\n";
  }
  return os.str();
}

namespace {

struct LineProfile {
  std::string name;
  double base_mean;  // crowdedness center
  double rate(long hour_of_day) const {
    if (name == "uni") return hour_of_day >= 7 && hour_of_day < 18 ? 80 : 0;
    if (name == "city") {
      if (hour_of_day < 6 || hour_of_day >= 22) return 0;
      return hour_of_day == 12 ? 75 : 50;  // 1.5x noon peak
    }
    return hour_of_day >= 22 || hour_of_day < 5 ? 10 : 0;  // night
  }
};

const std::vector<LineProfile>& line_profiles() {
  static const std::vector<LineProfile> lines = {
      {"uni", 6.0}, {"city", 5.0}, {"night", 3.5}};
  return lines;
}

}  // namespace

Trace generate_casestudy_trace(std::uint64_t seed, long days,
                               const Specification& spec) {
  if (days < 1) throw SpecError("InvalidConfig", "days must be >= 1");
  std::map<Rat, std::map<std::string, double>> merged;
  const auto& lines = line_profiles();
  for (long hour = 0; hour < days * 24; ++hour) {
    long hod = hour % 24;
    for (std::size_t li = 0; li < lines.size(); ++li) {
      const LineProfile& line = lines[li];
      CounterRng rng(seed, li + 1, static_cast<std::uint64_t>(hour));
      long count = knuth_poisson(line.rate(hod), rng);
      for (long j = 0; j < count; ++j) {
        Rat time = Rat(hour * kHour) + Rat(kHour * (j + 1), count + 1);
        double value = line.base_mean + 6.0 * (rng.next_unit() - 0.5);
        value = std::min(10.0, std::max(1.0, value));
        merged[time][line.name] = value;
      }
    }
  }
  Trace trace;
  for (auto& [time, values] : merged) {
    TraceRecord rec;
    rec.time = time;
    rec.values = std::move(values);
    trace.records.push_back(std::move(rec));
  }
  (void)spec;
  return trace;
}

CaseStudyResult run_case_study(const CaseStudyConfig& config) {
  CompiledPipeline p = analyze_text(casestudy_spec_text());
  Trace trace = generate_casestudy_trace(config.trace_seed, config.days,
                                         p.spec);
  auto plan =
      select_barriers(p.graph, p.report, Heuristic::Deep, config.epsilon);
  auto compiled = inject_noise(p.spec, p.graph, p.report, p.pacing, plan);
  Rat horizon = Rat(config.days * 24 * kHour);

  // Exact per-hour counts and true means straight from the trace.
  long hours = config.days * 24;
  std::map<std::string, std::vector<long>> counts;
  std::map<std::string, std::vector<double>> sums;
  for (const auto& line : line_profiles()) {
    counts[line.name].assign(hours, 0);
    sums[line.name].assign(hours, 0.0);
  }
  for (const auto& rec : trace.records) {
    // Events sit strictly inside their hour, so floor(time / 3600) is it.
    long hour = static_cast<long>(to_double(rec.time) / kHour);
    for (const auto& [name, value] : rec.values) {
      counts[name][hour] += 1;
      sums[name][hour] += value;
    }
  }

  // releases[line][run] = per-hour released average (NaN = gate closed).
  std::map<std::string, std::vector<std::vector<double>>> releases;
  for (const auto& line : line_profiles())
    releases[line.name].assign(config.runs,
                               std::vector<double>(hours,
                                                   std::nan("")));
  parallel_runs(config.runs, config.threads, [&](int r) {
    EvalOptions opts;
    opts.seed = config.seed_base + static_cast<std::uint64_t>(r);
    auto model = evaluate(compiled.spec, trace, horizon, opts);
    for (const auto& line : line_profiles()) {
      const auto& schedule = model.pacing.schedule.at(line.name + "_rel");
      for (int t : schedule) {
        // The release at k*3600 covers hour k-1.
        long hour =
            static_cast<long>(to_double(model.pacing.times[t]) / kHour) - 1;
        if (hour < 0 || hour >= hours) continue;
        auto n = model.at(line.name + "_n", t);
        auto rel = model.at(line.name + "_rel", t);
        if (!n || !rel || *n <= 5.0) continue;
        double avg = *rel / *n;
        releases[line.name][r][hour] =
            std::min(10.0, std::max(0.0, avg));
      }
    }
  });

  CaseStudyResult result;
  for (const auto& line : line_profiles()) {
    for (long h = 0; h < hours; ++h) {
      CaseStudyRow row;
      row.line = line.name;
      row.hour = h;
      row.count = counts[line.name][h];
      row.truth =
          row.count ? sums[line.name][h] / row.count : 0.0;
      std::vector<double> vals;
      for (int r = 0; r < config.runs; ++r) {
        double v = releases[line.name][r][h];
        if (!std::isnan(v)) vals.push_back(v);
      }
      row.releases = static_cast<long>(vals.size());
      if (vals.size() >= 2) {
        double mean = 0;
        for (double v : vals) mean += v;
        mean /= vals.size();
        row.mean = mean;
        row.sd = std::sqrt(sample_variance(vals));
      } else {
        row.mean = vals.empty() ? 0.0 : vals[0];
        row.sd = 0.0;
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::string case_study_csv(const CaseStudyResult& result) {
  std::string out = "line,hour,count,releases,truth,mean,sd\n";
  for (const auto& r : result.rows) {
    out += r.line;
    out += ',';
    out += std::to_string(r.hour);
    out += ',';
    out += std::to_string(r.count);
    out += ',';
    out += std::to_string(r.releases);
    out += ',';
    append_double(out, r.truth);
    out += ',';
    append_double(out, r.mean);
    out += ',';
    append_double(out, r.sd);
    out += '\n';
  }
  return out;
}

}  // namespace dpmon
