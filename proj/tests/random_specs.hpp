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

#ifndef DPMON_TESTS_RANDOM_SPECS_HPP
#define DPMON_TESTS_RANDOM_SPECS_HPP

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dpmon/rng.hpp"
#include "dpmon/trace.hpp"

namespace dpmon::testing {

class Rand {
 public:
  explicit Rand(std::uint64_t seed) : rng_(seed, 0xabcdULL) {}
  long below(long n) { return static_cast<long>(rng_.next_u64() % n); }
  long range(long lo, long hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return rng_.next_unit() < p; }
  double unit() { return rng_.next_unit(); }
  CounterRng& raw() { return rng_; }

 private:
  CounterRng rng_;
};

// One randomized soundness case: a well-typed acyclic specification, a
// trace, and a single-record in-range perturbation.
struct SoundCase {
  std::string spec_text;
  std::string trace_csv;
  std::size_t record_index;
  std::map<std::string, double> perturbation;
  Rat changed_time;
  Rat horizon;
};

namespace detail {

struct StreamInfo {
  std::string name;
  bool event_based;  // false = periodic
  bool bounded;      // value range statically finite
};

// An atom usable inside arithmetic at the accessor's pacing level.
inline std::string event_atom(Rand& rnd, const std::vector<StreamInfo>& pool,
                              bool bounded_only) {
  std::vector<const StreamInfo*> eligible;
  for (const auto& s : pool)
    if (s.event_based && (!bounded_only || s.bounded)) eligible.push_back(&s);
  if (eligible.empty() || rnd.chance(0.15))
    return std::to_string(rnd.range(-4, 9));
  const StreamInfo& s = *eligible[rnd.below(eligible.size())];
  switch (rnd.below(3)) {
    case 0:
      return s.name;
    case 1:
      return s.name + ".offset(by: -" + std::to_string(rnd.range(1, 3)) +
             ").defaults(to: " + std::to_string(rnd.range(-3, 3)) + ")";
    default:
      return s.name + ".last(or: " + std::to_string(rnd.range(-3, 3)) + ")";
  }
}

}  // namespace detail

inline SoundCase random_sound_case(std::uint64_t seed) {
  using detail::StreamInfo;
  Rand rnd(seed);
  SoundCase out;
  std::ostringstream spec;

  long n_inputs = rnd.range(1, 3);
  std::vector<StreamInfo> streams;
  std::vector<std::pair<long, long>> input_ranges;
  for (long i = 0; i < n_inputs; ++i) {
    long lo = rnd.range(-5, 0);
    long hi = lo + rnd.range(1, 10);
    std::string name = "i" + std::to_string(i);
    spec << "input " << name << " : Float64 range [" << lo << ", " << hi
         << "]\n";
    streams.push_back({name, true, true});
    input_ranges.emplace_back(lo, hi);
  }

  // Event-based derived streams: arithmetic over bounded event atoms.
  long n_event = rnd.range(0, 2);
  for (long i = 0; i < n_event; ++i) {
    std::string name = "e" + std::to_string(i);
    std::string a = detail::event_atom(rnd, streams, true);
    std::string b = detail::event_atom(rnd, streams, true);
    // Anchor on a real stream so the pacing inference has a trigger set.
    std::string anchor = streams[rnd.below(streams.size())].name;
    std::string body;
    switch (rnd.below(5)) {
      case 0: body = anchor + " + " + a + " - " + b; break;
      case 1: body = "(" + anchor + " + " + a + ") * " +
                     std::to_string(rnd.range(-3, 3)); break;
      case 2: body = "min(" + anchor + ", " + a + " + " + b + ")"; break;
      case 3: body = "clamp(" + anchor + " + " + a + ", " +
                     std::to_string(rnd.range(-6, 0)) + ", " +
                     std::to_string(rnd.range(1, 8)) + ")"; break;
      default:
        body = "if " + anchor + " > " + a + " then " + b + " else " + a;
        break;
    }
    spec << "output " << name << " := " << body << "\n";
    streams.push_back({name, true, true});
  }

  // Periodic streams, all on one shared period.
  long period = rnd.chance(0.5) ? 5 : 10;
  long n_periodic = rnd.range(1, 2);
  for (long i = 0; i < n_periodic; ++i) {
    std::string name = "p" + std::to_string(i);
    std::vector<const StreamInfo*> events;
    for (const auto& s : streams)
      if (s.event_based) events.push_back(&s);
    const StreamInfo& target = *events[rnd.below(events.size())];
    bool bounded = true;
    std::string body;
    switch (rnd.below(5)) {
      case 0:
        body = target.name + ".aggregate(over: " +
               std::to_string(period * rnd.range(1, 4)) + "s, using: sum)";
        bounded = false;  // sum range is unbounded
        break;
      case 1:
        body = target.name + ".aggregate(over: " +
               std::to_string(period * rnd.range(1, 4)) +
               "s, using: avg).defaults(to: " +
               std::to_string(rnd.range(-3, 3)) + ")";
        break;
      case 2:
        body = target.name + ".aggregate(over: " +
               std::to_string(period * rnd.range(1, 4)) +
               "s, using: last).defaults(to: " +
               std::to_string(rnd.range(-3, 3)) + ")";
        break;
      case 3:
        body = target.name + ".hold(for: " + std::to_string(rnd.range(1, 3)) +
               ", or: " + std::to_string(rnd.range(-3, 3)) + ")";
        break;
      default:
        body = target.name + ".aggregate(over: " +
               std::to_string(period * rnd.range(1, 4)) + "s, using: count)";
        bounded = false;  // count range is one-side unbounded
        break;
    }
    // Optionally combine with an earlier bounded periodic stream.
    for (const auto& s : streams)
      if (!s.event_based && s.bounded && rnd.chance(0.4)) {
        body = "min(" + body + ", " + s.name + " + " +
               std::to_string(rnd.range(-2, 2)) + ")";
        break;
      }
    if (i + 1 == n_periodic) spec << "#[public]\n";
    spec << "output " << name << " @" << period << "s@ := " << body << "\n";
    streams.push_back({name, false, bounded});
  }
  out.spec_text = spec.str();

  // Trace: increasing integer times, random input subsets.
  long n_records = rnd.range(8, 25);
  std::ostringstream csv;
  csv << "time";
  for (long i = 0; i < n_inputs; ++i) csv << ",i" << i;
  csv << "\n";
  long t = rnd.range(0, 3);
  std::vector<std::vector<double>> values(n_records);
  std::vector<long> times(n_records);
  for (long r = 0; r < n_records; ++r) {
    times[r] = t;
    csv << t;
    values[r].assign(n_inputs, std::nan(""));
    bool any = false;
    for (long i = 0; i < n_inputs; ++i) {
      bool present = rnd.chance(0.7) || (!any && i + 1 == n_inputs);
      csv << ",";
      if (!present) continue;
      any = true;
      auto [lo, hi] = input_ranges[i];
      double v = lo + (hi - lo) * rnd.unit();
      values[r][i] = v;
      csv << v;
    }
    csv << "\n";
    t += rnd.range(1, 7);
  }
  out.trace_csv = csv.str();
  out.horizon = Rat(t + 2 * period);

  // Perturb one present input of one record, staying in range.
  for (int attempt = 0; attempt < 64; ++attempt) {
    long r = rnd.below(n_records);
    long i = rnd.below(n_inputs);
    if (std::isnan(values[r][i])) continue;
    auto [lo, hi] = input_ranges[i];
    double replacement = lo + (hi - lo) * rnd.unit();
    if (std::abs(replacement - values[r][i]) < 1e-9) continue;
    out.record_index = static_cast<std::size_t>(r);
    out.changed_time = Rat(times[r]);
    out.perturbation = {{"i" + std::to_string(i),
                         replacement - values[r][i]}};
    return out;
  }
  // Degenerate draw; perturb the first present value minimally.
  for (long r = 0; r < n_records; ++r)
    for (long i = 0; i < n_inputs; ++i)
      if (!std::isnan(values[r][i])) {
        auto [lo, hi] = input_ranges[i];
        double mid = (lo + hi) / 2.0;
        out.record_index = static_cast<std::size_t>(r);
        out.changed_time = Rat(times[r]);
        out.perturbation = {{"i" + std::to_string(i), mid - values[r][i]}};
        return out;
      }
  return out;
}

}  // namespace dpmon::testing

#endif  // DPMON_TESTS_RANDOM_SPECS_HPP
