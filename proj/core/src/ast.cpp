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

#include "dpmon/ast.hpp"

#include <algorithm>

namespace dpmon {

const char* agg_func_name(AggFunc f) {
  switch (f) {
    case AggFunc::Sum: return "sum";
    case AggFunc::Avg: return "avg";
    case AggFunc::Count: return "count";
    case AggFunc::Last: return "last";
  }
  return "?";
}

static std::shared_ptr<Expr> make(Expr::Kind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}

ExprPtr Expr::constant(Rat v) {
  auto e = make(Kind::Const);
  e->value = std::move(v);
  return e;
}

ExprPtr Expr::sync(std::string stream) {
  auto e = make(Kind::Sync);
  e->stream = std::move(stream);
  return e;
}

ExprPtr Expr::offset_of(std::string stream, long o) {
  auto e = make(Kind::Offset);
  e->stream = std::move(stream);
  e->offset = o;
  return e;
}

ExprPtr Expr::hold(std::string stream, std::optional<long> bound) {
  auto e = make(Kind::Hold);
  e->stream = std::move(stream);
  e->hold_bound = bound;
  return e;
}

ExprPtr Expr::aggregate(std::string stream, Rat window, AggFunc f) {
  auto e = make(Kind::Aggregate);
  e->stream = std::move(stream);
  e->window = std::move(window);
  e->func = f;
  return e;
}

ExprPtr Expr::defaults(ExprPtr x, ExprPtr dft) {
  auto e = make(Kind::Default);
  e->args = {std::move(x), std::move(dft)};
  return e;
}

ExprPtr Expr::ite(ExprPtr c, ExprPtr a, ExprPtr b) {
  auto e = make(Kind::Ite);
  e->args = {std::move(c), std::move(a), std::move(b)};
  return e;
}

ExprPtr Expr::binop(BinKind k, ExprPtr a, ExprPtr b) {
  auto e = make(Kind::BinOp);
  e->bin = k;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr Expr::clamp(ExprPtr x, Rat lo, Rat hi) {
  auto e = make(Kind::Clamp);
  e->args = {std::move(x)};
  e->lo = std::move(lo);
  e->hi = std::move(hi);
  return e;
}

ExprPtr Expr::compare(CmpKind k, ExprPtr a, ExprPtr b) {
  auto e = make(Kind::Cmp);
  e->cmp = k;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr Expr::laplace(Rat scale) {
  auto e = make(Kind::Laplace);
  e->scale = std::move(scale);
  return e;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  if (a.value != b.value || a.stream != b.stream || a.offset != b.offset ||
      a.hold_bound != b.hold_bound || a.window != b.window || a.func != b.func ||
      a.bin != b.bin || a.cmp != b.cmp || a.lo != b.lo || a.hi != b.hi ||
      a.scale != b.scale || a.tree_buckets != b.tree_buckets ||
      a.tree_bound != b.tree_bound || a.tree_eps != b.tree_eps ||
      a.tree_default != b.tree_default)
    return false;
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!expr_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

void visit_expr(const ExprPtr& e, const std::function<void(const Expr&)>& fn) {
  fn(*e);
  for (const auto& a : e->args) visit_expr(a, fn);
}

Pacing Pacing::event_based(std::set<std::string> t) {
  Pacing p;
  p.kind = Kind::EventBased;
  p.triggers = std::move(t);
  return p;
}

Pacing Pacing::periodic(Rat period) {
  Pacing p;
  p.kind = Kind::Periodic;
  p.period = std::move(period);
  return p;
}

bool Pacing::operator==(const Pacing& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::EventBased) return triggers == o.triggers;
  if (kind == Kind::Periodic) return period == o.period;
  return true;
}

const InputDecl* Specification::find_input(const std::string& name) const {
  for (const auto& i : inputs)
    if (i.name == name) return &i;
  return nullptr;
}

const OutputDecl* Specification::find_output(const std::string& name) const {
  for (const auto& o : outputs)
    if (o.name == name) return &o;
  return nullptr;
}

bool Specification::has_stream(const std::string& name) const {
  return find_input(name) || find_output(name);
}

std::vector<std::string> Specification::stream_names() const {
  std::vector<std::string> names;
  for (const auto& i : inputs) names.push_back(i.name);
  for (const auto& o : outputs) names.push_back(o.name);
  return names;
}

std::set<std::string> Specification::public_set() const {
  std::set<std::string> s;
  for (const auto& o : outputs)
    if (o.is_public) s.insert(o.name);
  return s;
}

bool spec_equal(const Specification& a, const Specification& b) {
  if (a.inputs.size() != b.inputs.size() || a.outputs.size() != b.outputs.size() ||
      a.group_size != b.group_size)
    return false;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    const auto& x = a.inputs[i];
    const auto& y = b.inputs[i];
    if (x.name != y.name || x.type != y.type || x.bounded != y.bounded) return false;
    if (x.bounded && (x.lo != y.lo || x.hi != y.hi)) return false;
  }
  for (std::size_t i = 0; i < a.outputs.size(); ++i) {
    const auto& x = a.outputs[i];
    const auto& y = b.outputs[i];
    if (x.name != y.name || x.is_public != y.is_public || !(x.pacing == y.pacing))
      return false;
    if (x.tuple_members != y.tuple_members) return false;
    if (!x.expr != !y.expr) return false;
    if (x.expr && !expr_equal(*x.expr, *y.expr)) return false;
  }
  return true;
}

}  // namespace dpmon
