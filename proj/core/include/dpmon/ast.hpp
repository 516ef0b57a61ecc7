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

#ifndef DPMON_AST_HPP
#define DPMON_AST_HPP

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpmon/rational.hpp"

namespace dpmon {

enum class AggFunc { Sum, Avg, Count, Last };
enum class BinKind { Add, Sub, Mul, Min, Max };
enum class CmpKind { Lt, Le, Eq, Gt, Ge };

const char* agg_func_name(AggFunc f);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// One node of a stream expression. Sync/Offset/Hold/Aggregate target a
// stream by name; the remaining operators combine subexpressions.
// Laplace and Tree are compiler intrinsics, rejected in user input.
struct Expr {
  enum class Kind {
    Const,      // value
    Sync,       // stream
    Offset,     // stream, offset >= 1
    Hold,       // stream, hold_bound (nullopt = unbounded)
    Aggregate,  // stream, window (seconds), func
    Default,    // args = {expr, fallback}
    Ite,        // args = {cond, then, else}
    BinOp,      // bin, args = {lhs, rhs}
    Clamp,      // args = {expr}, lo, hi
    Cmp,        // cmp, args = {lhs, rhs}; only valid as an Ite condition
    Laplace,    // scale
    Tree,       // tree-mechanism intrinsic, see fields below
  };

  Kind kind = Kind::Const;
  Rat value;                          // Const
  std::string stream;                 // Sync/Offset/Hold/Aggregate/Tree
  long offset = 0;                    // Offset
  std::optional<long> hold_bound;     // Hold
  Rat window;                         // Aggregate (seconds)
  AggFunc func = AggFunc::Sum;        // Aggregate/Tree
  BinKind bin = BinKind::Add;         // BinOp
  CmpKind cmp = CmpKind::Lt;          // Cmp
  Rat lo, hi;                         // Clamp
  Rat scale;                          // Laplace (= bound / eps_i)
  long tree_buckets = 0;              // Tree: window length in buckets; 0 = all
  Rat tree_bound;                     // Tree: L1 bound of the aggregated stream
  Rat tree_eps;                       // Tree: per-barrier privacy budget
  Rat tree_default;                   // Tree: value for an empty window (avg)
  std::vector<ExprPtr> args;

  static ExprPtr constant(Rat v);
  static ExprPtr sync(std::string stream);
  static ExprPtr offset_of(std::string stream, long o);
  static ExprPtr hold(std::string stream, std::optional<long> bound);
  static ExprPtr aggregate(std::string stream, Rat window, AggFunc f);
  static ExprPtr defaults(ExprPtr e, ExprPtr dft);
  static ExprPtr ite(ExprPtr c, ExprPtr a, ExprPtr b);
  static ExprPtr binop(BinKind k, ExprPtr a, ExprPtr b);
  static ExprPtr clamp(ExprPtr e, Rat lo, Rat hi);
  static ExprPtr compare(CmpKind k, ExprPtr a, ExprPtr b);
  static ExprPtr laplace(Rat scale);
};

bool expr_equal(const Expr& a, const Expr& b);

// Walks all nodes of an expression tree (pre-order).
void visit_expr(const ExprPtr& e, const std::function<void(const Expr&)>& fn);

struct Pacing {
  enum class Kind { Inferred, EventBased, Periodic };
  Kind kind = Kind::Inferred;
  std::set<std::string> triggers;  // EventBased
  Rat period;                      // Periodic, seconds > 0

  static Pacing inferred() { return {}; }
  static Pacing event_based(std::set<std::string> t);
  static Pacing periodic(Rat period);
  bool operator==(const Pacing& o) const;
};

struct InputDecl {
  std::string name;
  std::string type = "Float64";
  bool bounded = false;
  Rat lo, hi;  // valid iff bounded
};

struct OutputDecl {
  std::string name;
  Pacing pacing;
  ExprPtr expr;  // null iff this is a tuple alias
  bool is_public = false;
  // Tuple outputs like `output range := (low, high)` carry no value of their
  // own; the members are marked public and the alias stream is inert.
  std::vector<std::string> tuple_members;

  bool is_tuple() const { return !tuple_members.empty(); }
};

struct Specification {
  std::vector<InputDecl> inputs;
  std::vector<OutputDecl> outputs;
  long group_size = 1;  // w-consecutive group size; scales input distances

  const InputDecl* find_input(const std::string& name) const;
  const OutputDecl* find_output(const std::string& name) const;
  bool has_stream(const std::string& name) const;
  std::vector<std::string> stream_names() const;  // declaration order
  std::set<std::string> public_set() const;
};

bool spec_equal(const Specification& a, const Specification& b);

}  // namespace dpmon

#endif  // DPMON_AST_HPP
