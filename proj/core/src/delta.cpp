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

#include "dpmon/delta.hpp"

#include <cmath>

#include "dpmon/diagnostics.hpp"

namespace dpmon {

DeltaOracle::DeltaOracle(const Specification& spec,
                         const DependencyGraph& graph,
                         const PacingModel& model,
                         const std::map<std::string, Pacing>& pacing,
                         int changed_t, const AnalysisOptions& options)
    : spec_(spec),
      model_(model),
      pacing_(pacing),
      changed_t_(changed_t),
      options_(options),
      ranges_(compute_value_ranges(spec, graph)) {
  int rank = 0;
  for (const auto& name : sync_topo_order(spec, graph))
    order_rank_[name] = rank++;
  for (const auto& in : spec.inputs) {
    if (!in.bounded)
      throw SpecError("MissingRange",
                      "per-event sensitivity requires a range for input '" +
                          in.name + "'");
    input_distance_[in.name] = Rat(spec.group_size) * (in.hi - in.lo);
  }
}

bool DeltaOracle::influenced(const std::string& stream, int t) const {
  if (t < 0 || !model_.fires(stream, t)) return false;
  auto key = std::make_pair(stream, t);
  auto it = influence_memo_.find(key);
  if (it != influence_memo_.end()) return it->second;
  influence_memo_[key] = false;  // cycle guard: offsets go strictly backwards
  bool result;
  if (spec_.find_input(stream)) {
    result = t == changed_t_;
  } else {
    const OutputDecl* out = spec_.find_output(stream);
    result = out->expr && influenced_expr(*out->expr, stream, t);
  }
  influence_memo_[key] = result;
  return result;
}

std::optional<int> DeltaOracle::hold_source(const Expr& e,
                                            const std::string& host,
                                            int t) const {
  // Must match the evaluator's hold semantics exactly.
  bool target_first = order_rank_.at(e.stream) < order_rank_.at(host);
  auto le = last_event(model_, e.stream, t, 0);
  if (le && *le == t && !target_first) le = last_event(model_, e.stream, t, 1);
  if (!le) return std::nullopt;
  if (e.hold_bound) {
    const std::vector<int>& firings = model_.schedule.at(host);
    long start = std::partition_point(firings.begin(), firings.end(),
                                      [&](int f) { return f <= *le; }) -
                 firings.begin();
    if (target_first && model_.firing_rank.at(host)[*le] >= 0)
      start = model_.firing_rank.at(host)[*le];
    long rank = model_.firing_rank.at(host)[t];
    if (rank - start + 1 > *e.hold_bound) return std::nullopt;
  }
  return le;
}

bool DeltaOracle::influenced_expr(const Expr& e, const std::string& host,
                                  int t) const {
  switch (e.kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Laplace:
      return false;
    case Expr::Kind::Sync:
      return influenced(e.stream, t);
    case Expr::Kind::Offset: {
      auto le = last_event(model_, e.stream, t, e.offset);
      return le && influenced(e.stream, *le);
    }
    case Expr::Kind::Hold: {
      auto le = hold_source(e, host, t);
      return le && influenced(e.stream, *le);
    }
    case Expr::Kind::Aggregate:
    case Expr::Kind::Tree: {
      Rat window = e.kind == Expr::Kind::Tree
                       ? model_.times.back() + 1  // all-time
                       : e.window;
      for (int f : window_times(model_, e.stream, t, window,
                                options_.closed_windows))
        if (influenced(e.stream, f)) return true;
      return false;
    }
    default:
      for (const auto& a : e.args)
        if (influenced_expr(*a, host, t)) return true;
      return false;
  }
}

Rat DeltaOracle::delta(const std::string& stream, int t) const {
  if (t < 0 || !model_.fires(stream, t)) return 0;
  auto key = std::make_pair(stream, t);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  memo_[key] = 0;  // cycle guard
  Rat result;
  if (spec_.find_input(stream)) {
    result = t == changed_t_ ? input_distance_.at(stream) : Rat(0);
  } else {
    const OutputDecl* out = spec_.find_output(stream);
    result = out->expr ? delta_expr(*out->expr, stream, t) : Rat(0);
  }
  memo_[key] = result;
  return result;
}

Rat DeltaOracle::delta_expr(const Expr& e, const std::string& host,
                            int t) const {
  auto value_dependent = [&]() -> Rat {
    if (!influenced_expr(e, host, t)) return 0;
    ExtRat width = range_of_expression(e, ranges_).width();
    if (!width.is_finite())
      throw SpecError("EvaluationError",
                      "per-event sensitivity on an unbounded value-dependent "
                      "operator");
    return width.finite();
  };
  switch (e.kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Laplace:
      return 0;
    case Expr::Kind::Sync:
      return delta(e.stream, t);
    case Expr::Kind::Offset: {
      auto le = last_event(model_, e.stream, t, e.offset);
      return le ? delta(e.stream, *le) : Rat(0);
    }
    case Expr::Kind::Hold: {
      auto le = hold_source(e, host, t);
      return le ? delta(e.stream, *le) : Rat(0);
    }
    case Expr::Kind::Aggregate: {
      if (e.func == AggFunc::Count) return 0;
      std::vector<int> wt =
          window_times(model_, e.stream, t, e.window, options_.closed_windows);
      if (e.func == AggFunc::Last)
        return wt.empty() ? Rat(0) : delta(e.stream, wt.back());
      Rat sum = 0;
      for (int f : wt) sum += delta(e.stream, f);
      return sum;  // Sum; for Avg |d(sum)/n| <= sum of element deltas
    }
    case Expr::Kind::Tree:
      throw SpecError("EvaluationError",
                      "per-event sensitivity is not defined on tree barriers");
    case Expr::Kind::Default: {
      // Both runs take the same branch (timing is identical), so the taken
      // branch's delta applies; max over branches bounds it.
      Rat a = delta_expr(*e.args[0], host, t);
      Rat b = delta_expr(*e.args[1], host, t);
      return a > b ? a : b;
    }
    case Expr::Kind::BinOp:
      switch (e.bin) {
        case BinKind::Add:
        case BinKind::Sub:
          return delta_expr(*e.args[0], host, t) +
                 delta_expr(*e.args[1], host, t);
        case BinKind::Mul:
          if (e.args[0]->kind == Expr::Kind::Const) {
            Rat c = e.args[0]->value;
            return (c < 0 ? Rat(-c) : c) * delta_expr(*e.args[1], host, t);
          }
          if (e.args[1]->kind == Expr::Kind::Const) {
            Rat c = e.args[1]->value;
            return (c < 0 ? Rat(-c) : c) * delta_expr(*e.args[0], host, t);
          }
          return value_dependent();
        case BinKind::Min:
        case BinKind::Max: {
          // 1-Lipschitz per argument.
          Rat additive = delta_expr(*e.args[0], host, t) +
                         delta_expr(*e.args[1], host, t);
          if (!influenced_expr(e, host, t)) return 0;
          ExtRat width = range_of_expression(e, ranges_).width();
          if (width.is_finite() && width.finite() < additive)
            return width.finite();
          return additive;
        }
      }
      return value_dependent();
    case Expr::Kind::Clamp: {
      Rat inner = delta_expr(*e.args[0], host, t);
      Rat width = e.hi - e.lo;
      if (!influenced_expr(e, host, t)) return 0;
      return inner < width ? inner : width;
    }
    case Expr::Kind::Ite:
    case Expr::Kind::Cmp:
      return value_dependent();
  }
  return value_dependent();
}

Rat DeltaOracle::total(const std::string& stream) const {
  Rat sum = 0;
  for (int f : model_.schedule.at(stream)) sum += delta(stream, f);
  return sum;
}

std::map<std::string, double> check_adjacent_traces(
    const Specification& spec, const Trace& trace, std::size_t record_index,
    const std::map<std::string, double>& perturbation, const Rat& horizon,
    const EvalOptions& options) {
  Trace other = trace;
  if (record_index >= other.records.size())
    throw SpecError("PerturbationOutOfRange", "record index out of bounds");
  TraceRecord& rec = other.records[record_index];
  for (const auto& [name, delta] : perturbation) {
    auto it = rec.values.find(name);
    if (it == rec.values.end())
      throw SpecError("PerturbationOutOfRange",
                      "input '" + name + "' has no event at that record");
    double v = it->second + delta;
    const InputDecl* in = spec.find_input(name);
    if (in && in->bounded &&
        (v < to_double(in->lo) - 1e-12 || v > to_double(in->hi) + 1e-12))
      throw SpecError("PerturbationOutOfRange",
                      "perturbed value for '" + name + "' leaves its range");
    it->second = v;
  }
  EvalOptions eo = options;
  eo.zero_noise = true;
  EvaluationModel a = evaluate(spec, trace, horizon, eo);
  EvaluationModel b = evaluate(spec, other, horizon, eo);
  std::map<std::string, double> diffs;
  for (const auto& [name, vals] : a.values) {
    double total = 0;
    const auto& other_vals = b.values.at(name);
    for (std::size_t t = 0; t < vals.size(); ++t) {
      if (vals[t] && other_vals[t])
        total += std::fabs(*vals[t] - *other_vals[t]);
    }
    diffs[name] = total;
  }
  return diffs;
}

}  // namespace dpmon
