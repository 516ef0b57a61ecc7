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

#include "dpmon/eval.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "dpmon/diagnostics.hpp"
#include "dpmon/graph.hpp"
#include "dpmon/rng.hpp"
#include "dpmon/tree.hpp"

namespace dpmon {

std::optional<double> EvaluationModel::at(const std::string& stream,
                                          int t) const {
  auto it = values.find(stream);
  if (it == values.end()) return std::nullopt;
  return it->second[t];
}

namespace {

using Value = std::optional<double>;

// Per accessed stream, running aggregates over its firings in order.
struct StreamHistory {
  std::vector<double> prefix_sum = {0};  // over firing ranks
  std::vector<long> prefix_bottoms = {0};
};

struct Evaluator {
  const Specification& spec;
  const PacingModel& model;
  const EvalOptions& options;
  std::map<std::string, Pacing> pacing;
  EvaluationModel result;
  std::map<std::string, StreamHistory> history;
  std::map<std::string, std::unique_ptr<TreeState>> trees;
  std::map<std::string, int> stream_index;
  // Static evaluation order within a timestamp (sync-topological).
  std::map<std::string, int> order_rank;
  CounterRng* rng = nullptr;  // per (stream, firing), set around eval_expr

  // Firing ranks of y with realtime in (lo, hi] (closed at lo if closed).
  std::pair<long, long> window_ranks(const std::string& y, const Rat& lo,
                                     const Rat& hi, bool include_lo) const {
    const std::vector<int>& firings = model.schedule.at(y);
    auto time_of = [&](int f) { return model.times[f]; };
    long a = std::partition_point(firings.begin(), firings.end(),
                                  [&](int f) {
                                    return include_lo ? time_of(f) < lo
                                                      : !(time_of(f) > lo);
                                  }) -
             firings.begin();
    long b = std::partition_point(firings.begin(), firings.end(),
                                  [&](int f) { return !(time_of(f) > hi); }) -
             firings.begin();
    return {a, b};  // ranks [a, b)
  }

  Value value_at(const std::string& y, int t) const {
    if (!model.fires(y, t)) return std::nullopt;
    return result.values.at(y)[t];
  }

  Value eval_expr(const Expr& e, const std::string& host, int t) {
    switch (e.kind) {
      case Expr::Kind::Const:
        return to_double(e.value);
      case Expr::Kind::Sync:
        return value_at(e.stream, t);
      case Expr::Kind::Offset: {
        auto le = last_event(model, e.stream, t, e.offset);
        if (!le) return std::nullopt;
        return value_at(e.stream, *le);
      }
      case Expr::Kind::Hold:
        return eval_hold(e, host, t);
      case Expr::Kind::Aggregate:
        return eval_window(e, host, t);
      case Expr::Kind::Tree:
        return eval_tree(e, host, t);
      case Expr::Kind::Default: {
        Value v = eval_expr(*e.args[0], host, t);
        return v ? v : eval_expr(*e.args[1], host, t);
      }
      case Expr::Kind::Ite: {
        Value c = eval_expr(*e.args[0], host, t);
        if (!c) return std::nullopt;
        return eval_expr(*e.args[*c != 0.0 ? 1 : 2], host, t);
      }
      case Expr::Kind::BinOp: {
        Value a = eval_expr(*e.args[0], host, t);
        Value b = eval_expr(*e.args[1], host, t);
        if (!a || !b) return std::nullopt;
        switch (e.bin) {
          case BinKind::Add: return *a + *b;
          case BinKind::Sub: return *a - *b;
          case BinKind::Mul: return *a * *b;
          case BinKind::Min: return std::min(*a, *b);
          case BinKind::Max: return std::max(*a, *b);
        }
        return std::nullopt;
      }
      case Expr::Kind::Clamp: {
        Value v = eval_expr(*e.args[0], host, t);
        if (!v) return std::nullopt;
        return std::min(to_double(e.hi), std::max(to_double(e.lo), *v));
      }
      case Expr::Kind::Cmp: {
        Value a = eval_expr(*e.args[0], host, t);
        Value b = eval_expr(*e.args[1], host, t);
        if (!a || !b) return std::nullopt;
        bool r = false;
        switch (e.cmp) {
          case CmpKind::Lt: r = *a < *b; break;
          case CmpKind::Le: r = *a <= *b; break;
          case CmpKind::Eq: r = *a == *b; break;
          case CmpKind::Gt: r = *a > *b; break;
          case CmpKind::Ge: r = *a >= *b; break;
        }
        return r ? 1.0 : 0.0;
      }
      case Expr::Kind::Laplace:
        return options.zero_noise ? 0.0
                                  : sample_laplace(to_double(e.scale), *rng);
    }
    return std::nullopt;
  }

  Value eval_hold(const Expr& e, const std::string& host, int t) {
    // Whether a simultaneous firing of the target is visible is decided by
    // the static sync-topological order.
    bool target_first = order_rank.at(e.stream) < order_rank.at(host);
    auto le = last_event(model, e.stream, t, 0);
    if (le && *le == t && !target_first) le = last_event(model, e.stream, t, 1);
    if (!le) return std::nullopt;
    if (e.hold_bound) {
      // Count how many host firings (including this one) have read the value
      // held since *le; past bound reads the access fails.
      const std::vector<int>& firings = model.schedule.at(host);
      long start = std::partition_point(firings.begin(), firings.end(),
                                        [&](int f) { return f <= *le; }) -
                   firings.begin();
      if (target_first && model.firing_rank.at(host)[*le] >= 0)
        start = model.firing_rank.at(host)[*le];
      long rank = model.firing_rank.at(host)[t];
      long reads = rank - start + 1;
      if (reads > *e.hold_bound) return std::nullopt;
    }
    return value_at(e.stream, *le);
  }

  Value eval_window(const Expr& e, const std::string& host, int t) {
    const Rat& hi = model.times[t];
    Rat lo = hi - e.window;
    auto [a, b] = window_ranks(e.stream, lo, hi, options.closed_windows);
    long n = b - a;
    if (e.func == AggFunc::Count) return static_cast<double>(n);
    if (n == 0) return e.func == AggFunc::Sum ? Value(0.0) : std::nullopt;
    const StreamHistory& h = history.at(e.stream);
    if (e.func == AggFunc::Last) {
      int f = model.schedule.at(e.stream)[b - 1];
      return value_at(e.stream, f);
    }
    if (h.prefix_bottoms[b] - h.prefix_bottoms[a] > 0) return std::nullopt;
    double sum = h.prefix_sum[b] - h.prefix_sum[a];
    if (e.func == AggFunc::Sum) return sum;
    return sum / static_cast<double>(n);  // Avg
  }

  Value eval_tree(const Expr& e, const std::string& host, int t) {
    const Pacing& p = pacing.at(host);
    if (p.kind != Pacing::Kind::Periodic)
      throw SpecError("EvaluationError",
                      "tree mechanism requires a periodic host stream");
    auto& state = trees[host];
    if (!state) {
      TreeState::BudgetMode mode =
          e.tree_buckets == 0
              ? TreeState::BudgetMode::Geometric
              : (options.renormalize_tree_budget
                     ? TreeState::BudgetMode::RenormalizedSliding
                     : TreeState::BudgetMode::UniformSliding);
      double bound = e.func == AggFunc::Count ? 0.0 : to_double(e.tree_bound);
      state = std::make_unique<TreeState>(
          e.tree_buckets, bound, to_double(e.tree_eps), mode, options.seed,
          0x7472ee00 + stream_index.at(host), options.zero_noise);
    }
    // One bucket per host period: events of the aggregated stream in
    // (rt - delta, rt].
    const Rat& hi = model.times[t];
    Rat lo = hi - p.period;
    auto [a, b] = window_ranks(e.stream, lo, hi, options.closed_windows);
    const StreamHistory& h = history.at(e.stream);
    state->ingest_bucket(h.prefix_sum[b] - h.prefix_sum[a], b - a);
    long count = state->release_count();
    switch (e.func) {
      case AggFunc::Count:
        return static_cast<double>(count);
      case AggFunc::Sum:
        return state->release_sum();
      case AggFunc::Avg:
        if (count == 0) return to_double(e.tree_default);
        return state->release_sum() / static_cast<double>(count);
      case AggFunc::Last:
        throw SpecError("EvaluationError", "tree mechanism cannot host 'last'");
    }
    return std::nullopt;
  }
};


}  // namespace

std::vector<std::string> sync_topo_order(const Specification& spec,
                                         const DependencyGraph& graph) {
  // Order over Sync and Window edges (acyclic by construction); inputs first.
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> consumers;
  for (const auto& n : graph.nodes) indegree[n] = 0;
  for (const auto& e : graph.edges) {
    if (e.kind != AccessEdge::Kind::Sync && e.kind != AccessEdge::Kind::Window)
      continue;
    consumers[e.to].push_back(e.from);
    ++indegree[e.from];
  }
  std::vector<std::string> order;
  std::vector<std::string> ready;
  for (const auto& n : graph.nodes)
    if (indegree[n] == 0) ready.push_back(n);
  // Stable: process in declaration order among ready nodes.
  while (!ready.empty()) {
    std::string n = ready.front();
    ready.erase(ready.begin());
    order.push_back(n);
    for (const auto& c : consumers[n])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  return order;
}

EvaluationModel evaluate(const Specification& spec, const Trace& trace,
                         const Rat& horizon, const EvalOptions& options) {
  DependencyGraph graph = build_dependency_graph(spec);
  std::map<std::string, Pacing> pacing = check_pacing_types(spec, graph);
  PacingModel model = derive_pacing_model(spec, pacing, trace, horizon);

  Evaluator ev{spec, model, options};
  ev.pacing = pacing;
  ev.result.pacing = model;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i)
    ev.stream_index[graph.nodes[i]] = static_cast<int>(i);
  for (const auto& name : graph.nodes) {
    ev.result.values[name] =
        std::vector<Value>(model.times.size(), std::nullopt);
    ev.history[name] = StreamHistory{};
  }

  // Input values by (timestamp, input).
  std::map<std::string, std::map<Rat, double>> input_values;
  for (const auto& rec : trace.records)
    for (const auto& [name, v] : rec.values) input_values[name][rec.time] = v;

  std::vector<std::string> order = sync_topo_order(spec, graph);
  for (std::size_t i = 0; i < order.size(); ++i)
    ev.order_rank[order[i]] = static_cast<int>(i);

  for (int t = 0; t < static_cast<int>(model.times.size()); ++t) {
    for (const auto& name : order) {
      if (!model.fires(name, t)) continue;
      Value v;
      if (spec.find_input(name)) {
        v = input_values[name].at(model.times[t]);
      } else {
        const OutputDecl* out = spec.find_output(name);
        if (out->is_tuple()) continue;
        CounterRng rng(options.seed, ev.stream_index[name],
                       static_cast<std::uint64_t>(
                           model.firing_rank.at(name)[t]));
        ev.rng = &rng;
        v = ev.eval_expr(*out->expr, name, t);
        ev.rng = nullptr;
      }
      ev.result.values[name][t] = v;
      StreamHistory& h = ev.history[name];
      h.prefix_sum.push_back(h.prefix_sum.back() + (v ? *v : 0.0));
      h.prefix_bottoms.push_back(h.prefix_bottoms.back() + (v ? 0 : 1));
    }
  }
  return ev.result;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

}  // namespace

std::string render_jsonl(const Specification& spec, const EvaluationModel& model,
                         const std::set<std::string>* only) {
  std::ostringstream os;
  std::vector<std::string> streams;
  for (const auto& name : spec.stream_names())
    if (!only || only->count(name)) streams.push_back(name);
  for (int t = 0; t < static_cast<int>(model.pacing.times.size()); ++t) {
    double rt = to_double(model.pacing.times[t]);
    for (const auto& name : streams) {
      if (!model.pacing.fires(name, t)) continue;
      auto v = model.values.at(name)[t];
      if (!v) continue;
      os << "{\"t\": " << format_double(rt) << ", \"stream\": \"" << name
         << "\", \"value\": " << format_double(*v) << "}\n";
    }
  }
  return os.str();
}

}  // namespace dpmon
