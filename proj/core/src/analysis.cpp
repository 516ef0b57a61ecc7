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

#include <sstream>

#include "dpmon/diagnostics.hpp"

namespace dpmon {
namespace {

ValueRange make_range(ExtRat lo, ExtRat hi) {
  ValueRange r;
  r.lo = std::move(lo);
  r.hi = std::move(hi);
  return r;
}

ValueRange range_union(const ValueRange& a, const ValueRange& b) {
  return make_range(ExtRat::min(a.lo, b.lo), ExtRat::max(a.hi, b.hi));
}

ValueRange range_of_expr(const Expr& e,
                         const std::map<std::string, ValueRange>& env) {
  auto sub = [&](std::size_t i) { return range_of_expr(*e.args[i], env); };
  switch (e.kind) {
    case Expr::Kind::Const:
      return make_range(ExtRat(e.value), ExtRat(e.value));
    case Expr::Kind::Sync:
    case Expr::Kind::Offset:
    case Expr::Kind::Hold: {
      auto it = env.find(e.stream);
      return it == env.end() ? ValueRange::unbounded() : it->second;
    }
    case Expr::Kind::Aggregate:
      switch (e.func) {
        case AggFunc::Sum: return ValueRange::unbounded();
        case AggFunc::Count: return make_range(ExtRat(0), ExtRat::pos_inf());
        case AggFunc::Avg:
        case AggFunc::Last: {
          auto it = env.find(e.stream);
          return it == env.end() ? ValueRange::unbounded() : it->second;
        }
      }
      return ValueRange::unbounded();
    case Expr::Kind::Default:
      return range_union(sub(0), sub(1));
    case Expr::Kind::Ite:
      return range_union(sub(1), sub(2));
    case Expr::Kind::BinOp: {
      ValueRange a = sub(0), b = sub(1);
      switch (e.bin) {
        case BinKind::Add:
          return make_range(a.lo + b.lo, a.hi + b.hi);
        case BinKind::Sub:
          return make_range(a.lo - b.hi, a.hi - b.lo);
        case BinKind::Mul: {
          ExtRat c1 = a.lo * b.lo, c2 = a.lo * b.hi, c3 = a.hi * b.lo,
                 c4 = a.hi * b.hi;
          ExtRat lo = ExtRat::min(ExtRat::min(c1, c2), ExtRat::min(c3, c4));
          ExtRat hi = ExtRat::max(ExtRat::max(c1, c2), ExtRat::max(c3, c4));
          return make_range(lo, hi);
        }
        case BinKind::Min:
          return make_range(ExtRat::min(a.lo, b.lo), ExtRat::min(a.hi, b.hi));
        case BinKind::Max:
          return make_range(ExtRat::max(a.lo, b.lo), ExtRat::max(a.hi, b.hi));
      }
      return ValueRange::unbounded();
    }
    case Expr::Kind::Clamp:
      return make_range(ExtRat(e.lo), ExtRat(e.hi));
    case Expr::Kind::Cmp:
      return make_range(ExtRat(0), ExtRat(1));
    case Expr::Kind::Laplace:
      return e.scale == 0 ? make_range(ExtRat(0), ExtRat(0))
                          : ValueRange::unbounded();
    case Expr::Kind::Tree:
      return ValueRange::unbounded();
  }
  return ValueRange::unbounded();
}

std::set<std::string> accessed_streams(const ExprPtr& e) {
  std::set<std::string> out;
  visit_expr(e, [&](const Expr& n) {
    if (!n.stream.empty()) out.insert(n.stream);
  });
  return out;
}

}  // namespace

ValueRange range_of_expression(const Expr& e,
                               const std::map<std::string, ValueRange>& env) {
  return range_of_expr(e, env);
}

const StreamReport* SensitivityReport::find(const std::string& name) const {
  for (const auto& s : streams)
    if (s.name == name) return &s;
  return nullptr;
}

ExtRat window_multiplier(const Rat& window, const Pacing& host_pacing,
                         const AnalysisOptions& options) {
  if (host_pacing.kind != Pacing::Kind::Periodic) return ExtRat::pos_inf();
  if (options.closed_windows)
    return ExtRat(floor_div(window, host_pacing.period) + 1);
  return ExtRat(ceil_div(window, host_pacing.period));
}

std::map<std::string, ValueRange> compute_value_ranges(
    const Specification& spec, const DependencyGraph& graph) {
  std::map<std::string, ValueRange> env;
  std::set<std::string> cyclic;
  for (const auto& name : cyclic_streams(graph)) cyclic.insert(name);
  for (const auto& in : spec.inputs)
    env[in.name] = in.bounded
                       ? make_range(ExtRat(in.lo), ExtRat(in.hi))
                       : ValueRange::unbounded();
  for (const auto& out : spec.outputs)
    if (cyclic.count(out.name) || out.is_tuple())
      env[out.name] = ValueRange::unbounded();
  // Remaining streams form a DAG; iterate until every range is computed.
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& out : spec.outputs) {
      if (env.count(out.name)) continue;
      bool ready = true;
      for (const auto& dep : accessed_streams(out.expr))
        if (!env.count(dep)) { ready = false; break; }
      if (!ready) continue;
      env[out.name] = range_of_expr(*out.expr, env);
      progress = true;
    }
  }
  return env;
}

namespace {

struct BoundContext {
  const Specification& spec;
  const std::map<std::string, Pacing>& pacing;
  const AnalysisOptions& options;
  const std::map<std::string, ValueRange>& ranges;
  std::map<std::string, ExtRat> stream_influence;
  std::map<std::string, ExtRat> stream_bound;
};

ExtRat influence_of_expr(const Expr& e, const std::string& host,
                         BoundContext& ctx);

ExtRat stream_influence(const std::string& name, BoundContext& ctx) {
  return ctx.stream_influence.at(name);
}

ExtRat influence_of_expr(const Expr& e, const std::string& host,
                         BoundContext& ctx) {
  switch (e.kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Laplace:
      return ExtRat(0);
    case Expr::Kind::Sync:
    case Expr::Kind::Offset:
      return stream_influence(e.stream, ctx);
    case Expr::Kind::Hold:
      if (!e.hold_bound) return ExtRat::pos_inf();
      return ExtRat(Rat(*e.hold_bound)) * stream_influence(e.stream, ctx);
    case Expr::Kind::Aggregate: {
      // Even a `last` window can replay one changed event across every
      // window that still ends after it.
      ExtRat n = stream_influence(e.stream, ctx);
      return window_multiplier(e.window, ctx.pacing.at(host), ctx.options) * n;
    }
    case Expr::Kind::Tree:
      return ExtRat::pos_inf();
    default: {
      ExtRat total(0);
      for (const auto& a : e.args)
        total = total + influence_of_expr(*a, host, ctx);
      return total;
    }
  }
}

ExtRat value_dependent_bound(const Expr& e, const std::string& host,
                             BoundContext& ctx) {
  ExtRat n = influence_of_expr(e, host, ctx);
  ExtRat width = range_of_expr(e, ctx.ranges).width();
  if (n == ExtRat(0)) return ExtRat(0);
  return n * width;
}

ExtRat bound_of_expr(const Expr& e, const std::string& host, BoundContext& ctx) {
  switch (e.kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Laplace:
      return ExtRat(0);
    case Expr::Kind::Sync:
    case Expr::Kind::Offset:
      return ctx.stream_bound.at(e.stream);
    case Expr::Kind::Hold:
      if (!e.hold_bound) return ExtRat::pos_inf();
      return ExtRat(Rat(*e.hold_bound)) * ctx.stream_bound.at(e.stream);
    case Expr::Kind::Aggregate: {
      if (e.func == AggFunc::Count) return ExtRat(0);
      ExtRat mult = window_multiplier(e.window, ctx.pacing.at(host), ctx.options);
      return mult * ctx.stream_bound.at(e.stream);
    }
    case Expr::Kind::Tree:
      return ExtRat::pos_inf();
    case Expr::Kind::Default: {
      // A changed event can affect firings taking either branch, so branch
      // bounds add; the value-dependent rule is an alternative cap.
      ExtRat additive = bound_of_expr(*e.args[0], host, ctx) +
                        bound_of_expr(*e.args[1], host, ctx);
      return ExtRat::min(additive, value_dependent_bound(e, host, ctx));
    }
    case Expr::Kind::Clamp: {
      ExtRat inner = bound_of_expr(*e.args[0], host, ctx);
      ExtRat n = influence_of_expr(e, host, ctx);
      ExtRat capped = n == ExtRat(0)
                          ? ExtRat(0)
                          : n * (ExtRat(e.hi) - ExtRat(e.lo));
      return ExtRat::min(inner, capped);
    }
    case Expr::Kind::BinOp:
      switch (e.bin) {
        case BinKind::Add:
        case BinKind::Sub:
          return bound_of_expr(*e.args[0], host, ctx) +
                 bound_of_expr(*e.args[1], host, ctx);
        case BinKind::Mul: {
          if (e.args[0]->kind == Expr::Kind::Const) {
            Rat c = e.args[0]->value;
            return ExtRat(c < 0 ? Rat(-c) : c) *
                   bound_of_expr(*e.args[1], host, ctx);
          }
          if (e.args[1]->kind == Expr::Kind::Const) {
            Rat c = e.args[1]->value;
            return ExtRat(c < 0 ? Rat(-c) : c) *
                   bound_of_expr(*e.args[0], host, ctx);
          }
          return value_dependent_bound(e, host, ctx);
        }
        case BinKind::Min:
        case BinKind::Max: {
          // min/max are 1-Lipschitz in each argument: a change of d in one
          // operand moves the result by at most d, so the additive bound is
          // sound; the value-dependent range rule is an alternative cap.
          ExtRat additive = bound_of_expr(*e.args[0], host, ctx) +
                            bound_of_expr(*e.args[1], host, ctx);
          return ExtRat::min(additive, value_dependent_bound(e, host, ctx));
        }
      }
      return ExtRat::pos_inf();
    case Expr::Kind::Ite:
    case Expr::Kind::Cmp:
      return value_dependent_bound(e, host, ctx);
  }
  return ExtRat::pos_inf();
}

}  // namespace

std::map<std::string, ExtRat> compute_influence_bounds(
    const Specification& spec, const DependencyGraph& graph,
    const std::map<std::string, Pacing>& pacing,
    const AnalysisOptions& options) {
  auto ranges = compute_value_ranges(spec, graph);
  BoundContext ctx{spec, pacing, options, ranges, {}, {}};
  std::set<std::string> cyclic;
  for (const auto& name : cyclic_streams(graph)) cyclic.insert(name);
  for (const auto& in : spec.inputs) ctx.stream_influence[in.name] = ExtRat(1);
  for (const auto& out : spec.outputs)
    if (cyclic.count(out.name) || out.is_tuple())
      ctx.stream_influence[out.name] = ExtRat::pos_inf();
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& out : spec.outputs) {
      if (ctx.stream_influence.count(out.name)) continue;
      bool ready = true;
      for (const auto& dep : accessed_streams(out.expr))
        if (!ctx.stream_influence.count(dep)) { ready = false; break; }
      if (!ready) continue;
      ctx.stream_influence[out.name] =
          influence_of_expr(*out.expr, out.name, ctx);
      progress = true;
    }
  }
  return ctx.stream_influence;
}

SensitivityReport compute_sensitivity_report(
    const Specification& spec, const DependencyGraph& graph,
    const std::map<std::string, Pacing>& pacing,
    const AnalysisOptions& options) {
  auto ranges = compute_value_ranges(spec, graph);
  auto influence = compute_influence_bounds(spec, graph, pacing, options);
  BoundContext ctx{spec, pacing, options, ranges, influence, {}};

  std::set<std::string> cyclic;
  for (const auto& name : cyclic_streams(graph)) cyclic.insert(name);
  for (const auto& in : spec.inputs) {
    ExtRat b = in.bounded ? ExtRat(Rat(spec.group_size) * (in.hi - in.lo))
                          : ExtRat::pos_inf();
    ctx.stream_bound[in.name] = b;
  }
  for (const auto& out : spec.outputs)
    if (cyclic.count(out.name) || out.is_tuple())
      ctx.stream_bound[out.name] = ExtRat::pos_inf();
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& out : spec.outputs) {
      if (ctx.stream_bound.count(out.name)) continue;
      bool ready = true;
      for (const auto& dep : accessed_streams(out.expr))
        if (!ctx.stream_bound.count(dep)) { ready = false; break; }
      if (!ready) continue;
      ctx.stream_bound[out.name] = bound_of_expr(*out.expr, out.name, ctx);
      progress = true;
    }
  }

  // A stream whose dependency cone touches a cycle is post-processed even if
  // an operator (count window, clamp) makes its own bound finite.
  std::map<std::string, bool> cone_cyclic;
  for (const auto& name : graph.nodes) {
    std::vector<std::string> stack = {name};
    std::set<std::string> seen;
    bool touches = false;
    while (!stack.empty() && !touches) {
      std::string u = stack.back();
      stack.pop_back();
      if (!seen.insert(u).second) continue;
      if (cyclic.count(u)) touches = true;
      for (const AccessEdge* e : graph.edges_from(u)) stack.push_back(e->to);
    }
    cone_cyclic[name] = touches;
  }

  SensitivityReport report;
  for (const auto& name : graph.nodes) {
    const OutputDecl* out = spec.find_output(name);
    if (out && out->is_tuple()) continue;
    StreamReport sr;
    sr.name = name;
    sr.range = ranges.at(name);
    sr.influence = influence.at(name);
    ExtRat b = ctx.stream_bound.at(name);
    bool post = cone_cyclic.at(name) || !b.is_finite();
    sr.segment = post ? Segment::PostProcessed : Segment::Private;
    sr.bound = post ? ExtRat::pos_inf() : b;
    report.streams.push_back(std::move(sr));
  }
  return report;
}

std::string SensitivityReport::to_json() const {
  std::ostringstream os;
  os << "{\n";
  for (std::size_t i = 0; i < streams.size(); ++i) {
    const StreamReport& s = streams[i];
    os << "  \"" << s.name << "\": {\"range\": [";
    auto field = [&](const ExtRat& v) {
      if (v.is_finite())
        os << format_rational(v.finite());
      else
        os << "\"" << v.str() << "\"";
    };
    field(s.range.lo);
    os << ", ";
    field(s.range.hi);
    os << "], \"influence\": ";
    field(s.influence);
    os << ", \"bound\": ";
    field(s.bound);
    os << ", \"segment\": \""
       << (s.segment == Segment::Private ? "private" : "post-processed")
       << "\"}";
    if (i + 1 < streams.size()) os << ",";
    os << "\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace dpmon
