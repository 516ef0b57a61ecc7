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

#include "dpmon/transform.hpp"

#include <memory>
#include <sstream>

#include "dpmon/diagnostics.hpp"

namespace dpmon {

namespace {

ExprPtr rename_streams(const ExprPtr& e,
                       const std::map<std::string, std::string>& renames) {
  if (!e) return e;
  Expr copy = *e;
  if (!copy.stream.empty()) {
    auto it = renames.find(copy.stream);
    if (it != renames.end()) copy.stream = it->second;
  }
  for (auto& a : copy.args) a = rename_streams(a, renames);
  return std::make_shared<const Expr>(std::move(copy));
}

Rat finite_bound_or_throw(const SensitivityReport& report,
                          const std::string& stream) {
  const StreamReport* sr = report.find(stream);
  if (!sr || !sr->bound.is_finite())
    throw SpecError("NoValidBarrier",
                    "barrier stream '" + stream +
                        "' has no finite sensitivity bound");
  return sr->bound.finite();
}

// Matches `y.aggregate(over: W, using: f)`, optionally wrapped in a single
// `.defaults(to: c)`; the shape produced by the usual sliding-window
// release pattern.
struct SlidingMatch {
  const Expr* agg = nullptr;
  Rat dflt = 0;
};

std::optional<SlidingMatch> match_sliding(const ExprPtr& e) {
  SlidingMatch m;
  const Expr* root = e.get();
  if (root->kind == Expr::Kind::Default) {
    if (root->args[1]->kind != Expr::Kind::Const) return std::nullopt;
    m.dflt = root->args[1]->value;
    root = root->args[0].get();
  }
  if (root->kind != Expr::Kind::Aggregate) return std::nullopt;
  if (root->func == AggFunc::Last) return std::nullopt;
  m.agg = root;
  return m;
}

// Matches the running-sum pattern `self.last(or: 0) + y`, i.e.
// Add(Default(Offset(self, 1), Const 0), Sync(y)) in either argument
// order.
std::optional<std::string> match_running_sum(const ExprPtr& e,
                                             const std::string& self) {
  if (e->kind != Expr::Kind::BinOp || e->bin != BinKind::Add)
    return std::nullopt;
  auto is_prev_self = [&](const ExprPtr& a) {
    return a->kind == Expr::Kind::Default &&
           a->args[0]->kind == Expr::Kind::Offset &&
           a->args[0]->stream == self && a->args[0]->offset == 1 &&
           a->args[1]->kind == Expr::Kind::Const && a->args[1]->value == 0;
  };
  auto is_other_sync = [&](const ExprPtr& a) -> std::optional<std::string> {
    if (a->kind == Expr::Kind::Sync && a->stream != self) return a->stream;
    return std::nullopt;
  };
  if (is_prev_self(e->args[0])) return is_other_sync(e->args[1]);
  if (is_prev_self(e->args[1])) return is_other_sync(e->args[0]);
  return std::nullopt;
}

ExprPtr make_tree(std::string stream, long buckets, AggFunc func, Rat bound,
                  Rat eps, Rat dflt) {
  Expr t;
  t.kind = Expr::Kind::Tree;
  t.stream = std::move(stream);
  t.tree_buckets = buckets;
  t.func = func;
  t.tree_bound = std::move(bound);
  t.tree_eps = std::move(eps);
  t.tree_default = std::move(dflt);
  return std::make_shared<const Expr>(std::move(t));
}

}  // namespace

TransformResult inject_noise(const Specification& spec,
                             const DependencyGraph& graph,
                             const SensitivityReport& report,
                             const std::map<std::string, Pacing>& pacing,
                             const BarrierPlan& plan,
                             const TransformOptions& options) {
  (void)graph;
  TransformResult result;
  result.spec = spec;
  result.plan = plan;

  // Input barriers become noisy shadow outputs; collect the renames first
  // so consumer expressions can be rewritten in one pass.
  std::map<std::string, std::string> renames;
  std::vector<OutputDecl> shadows;
  for (auto& entry : result.plan.barriers) {
    const InputDecl* in = spec.find_input(entry.stream);
    if (!in) continue;
    Rat bound = finite_bound_or_throw(report, entry.stream);
    std::string shadow = entry.stream + "_noisy";
    while (spec.has_stream(shadow)) shadow += "_";
    OutputDecl decl;
    decl.name = shadow;
    decl.pacing = Pacing::event_based({entry.stream});
    decl.expr = Expr::binop(BinKind::Add, Expr::sync(entry.stream),
                            Expr::laplace(bound / entry.epsilon));
    shadows.push_back(std::move(decl));
    renames[entry.stream] = shadow;
    entry.mechanism = Mechanism::PlainLaplace;
  }

  for (auto& out : result.spec.outputs)
    if (out.expr) out.expr = rename_streams(out.expr, renames);
  result.spec.outputs.insert(result.spec.outputs.begin(), shadows.begin(),
                             shadows.end());

  // Output barriers: tree rewrite when requested and the expression has a
  // recognizable shape, plain laplace otherwise.
  for (auto& entry : result.plan.barriers) {
    if (spec.find_input(entry.stream)) continue;
    OutputDecl* out = nullptr;
    for (auto& o : result.spec.outputs)
      if (o.name == entry.stream) out = &o;
    if (!out || !out->expr)
      throw SpecError("NoValidBarrier",
                      "barrier stream '" + entry.stream +
                          "' carries no expression");
    if (options.tree_aggregation) {
      const Pacing& p = pacing.at(entry.stream);
      if (auto sum = match_running_sum(out->expr, entry.stream)) {
        Rat elem = finite_bound_or_throw(report, *sum);
        out->expr = make_tree(*sum, 0, AggFunc::Sum, elem, entry.epsilon, 0);
        entry.mechanism = Mechanism::TreeAll;
        continue;
      }
      if (auto m = match_sliding(out->expr);
          m && p.kind == Pacing::Kind::Periodic) {
        AnalysisOptions aopt;
        aopt.closed_windows = options.closed_windows;
        ExtRat mult = window_multiplier(m->agg->window, p, aopt);
        Rat elem = finite_bound_or_throw(report, m->agg->stream);
        if (mult.is_finite()) {
          long buckets = static_cast<long>(mult.finite());
          out->expr = make_tree(m->agg->stream, buckets, m->agg->func, elem,
                                entry.epsilon, m->dflt);
          entry.mechanism = Mechanism::TreeSliding;
          continue;
        }
      }
    }
    Rat bound = finite_bound_or_throw(report, entry.stream);
    out->expr = Expr::binop(BinKind::Add, out->expr,
                            Expr::laplace(bound / entry.epsilon));
    entry.mechanism = Mechanism::PlainLaplace;
  }
  return result;
}

std::string render_plan_json(const BarrierPlan& plan,
                             const SensitivityReport& report) {
  std::ostringstream os;
  os << "{\n  \"heuristic\": \"" << heuristic_name(plan.heuristic)
     << "\",\n  \"epsilon\": " << format_rational(plan.total_epsilon)
     << ",\n  \"barriers\": [\n";
  for (std::size_t i = 0; i < plan.barriers.size(); ++i) {
    const auto& e = plan.barriers[i];
    const StreamReport* sr = report.find(e.stream);
    os << "    {\"barrier\": \"" << e.stream << "\", \"bound\": ";
    if (sr && sr->bound.is_finite())
      os << format_rational(sr->bound.finite());
    else
      os << "\"inf\"";
    os << ", \"eps_i\": " << format_rational(e.epsilon) << ", \"scale\": ";
    if (sr && sr->bound.is_finite())
      os << format_rational(sr->bound.finite() / e.epsilon);
    else
      os << "\"inf\"";
    os << ", \"mechanism\": \"" << mechanism_name(e.mechanism) << "\"}";
    if (i + 1 < plan.barriers.size()) os << ",";
    os << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

}  // namespace dpmon
