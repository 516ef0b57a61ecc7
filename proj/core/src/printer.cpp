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

#include "dpmon/printer.hpp"

#include <sstream>

namespace dpmon {
namespace {

// Binding strength; parentheses are inserted when a child binds weaker than
// its context requires. Mirrors the parser's precedence ladder.
enum Level { kIte = 0, kCmp = 1, kAdd = 2, kMul = 3, kUnary = 4, kPostfix = 5, kPrimary = 6 };

int level_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Ite: return kIte;
    case Expr::Kind::Cmp: return kCmp;
    case Expr::Kind::BinOp:
      switch (e.bin) {
        case BinKind::Add: case BinKind::Sub: return kAdd;
        case BinKind::Mul: return kMul;
        case BinKind::Min: case BinKind::Max: return kPrimary;
      }
      return kPrimary;
    case Expr::Kind::Const: return e.value < 0 ? kUnary : kPrimary;
    case Expr::Kind::Offset:
    case Expr::Kind::Hold:
    case Expr::Kind::Aggregate:
    case Expr::Kind::Default: return kPostfix;
    default: return kPrimary;
  }
}

void render(std::ostream& os, const Expr& e, int min_level);

void render_child(std::ostream& os, const Expr& e, int min_level) {
  if (level_of(e) < min_level) {
    os << '(';
    render(os, e, kIte);
    os << ')';
  } else {
    render(os, e, min_level);
  }
}

void render(std::ostream& os, const Expr& e, int) {
  switch (e.kind) {
    case Expr::Kind::Const:
      os << format_rational(e.value);
      break;
    case Expr::Kind::Sync:
      os << e.stream;
      break;
    case Expr::Kind::Offset:
      os << e.stream << ".offset(by: -" << e.offset << ")";
      break;
    case Expr::Kind::Hold:
      os << e.stream << ".hold(";
      if (e.hold_bound) os << "for: " << *e.hold_bound;
      os << ")";
      break;
    case Expr::Kind::Aggregate:
      os << e.stream << ".aggregate(over: " << format_duration(e.window)
         << ", using: " << agg_func_name(e.func) << ")";
      break;
    case Expr::Kind::Default:
      render_child(os, *e.args[0], kPostfix);
      os << ".defaults(to: ";
      render_child(os, *e.args[1], kIte);
      os << ")";
      break;
    case Expr::Kind::Ite:
      os << "if ";
      render_child(os, *e.args[0], kIte);
      os << " then ";
      render_child(os, *e.args[1], kIte);
      os << " else ";
      render_child(os, *e.args[2], kIte);
      break;
    case Expr::Kind::BinOp:
      switch (e.bin) {
        case BinKind::Add:
          render_child(os, *e.args[0], kAdd);
          os << " + ";
          render_child(os, *e.args[1], kMul);
          break;
        case BinKind::Sub:
          render_child(os, *e.args[0], kAdd);
          os << " - ";
          render_child(os, *e.args[1], kMul);
          break;
        case BinKind::Mul:
          render_child(os, *e.args[0], kMul);
          os << " * ";
          render_child(os, *e.args[1], kUnary);
          break;
        case BinKind::Min:
        case BinKind::Max:
          os << (e.bin == BinKind::Min ? "min(" : "max(");
          render_child(os, *e.args[0], kIte);
          os << ", ";
          render_child(os, *e.args[1], kIte);
          os << ")";
          break;
      }
      break;
    case Expr::Kind::Clamp:
      os << "clamp(";
      render_child(os, *e.args[0], kIte);
      os << ", " << format_rational(e.lo) << ", " << format_rational(e.hi) << ")";
      break;
    case Expr::Kind::Cmp: {
      render_child(os, *e.args[0], kAdd);
      const char* op = "<";
      switch (e.cmp) {
        case CmpKind::Lt: op = "<"; break;
        case CmpKind::Le: op = "<="; break;
        case CmpKind::Eq: op = "=="; break;
        case CmpKind::Gt: op = ">"; break;
        case CmpKind::Ge: op = ">="; break;
      }
      os << ' ' << op << ' ';
      render_child(os, *e.args[1], kAdd);
      break;
    }
    case Expr::Kind::Laplace:
      os << "laplace(" << format_rational(e.scale) << ")";
      break;
    case Expr::Kind::Tree:
      if (e.tree_buckets > 0) {
        os << "tree_sliding(" << e.stream << ", buckets: " << e.tree_buckets;
      } else {
        os << "tree_all(" << e.stream;
      }
      os << ", using: " << agg_func_name(e.func)
         << ", bound: " << format_rational(e.tree_bound)
         << ", budget: " << format_rational(e.tree_eps);
      if (e.tree_buckets > 0 && e.func == AggFunc::Avg)
        os << ", default: " << format_rational(e.tree_default);
      os << ")";
      break;
  }
}

}  // namespace

std::string render_expr(const Expr& e) {
  std::ostringstream os;
  render(os, e, kIte);
  return os.str();
}

std::string render_specification(const Specification& spec) {
  std::ostringstream os;
  for (const auto& in : spec.inputs) {
    os << "input " << in.name << " : " << in.type;
    if (in.bounded)
      os << " range [" << format_rational(in.lo) << ", "
         << format_rational(in.hi) << "]";
    os << "\n";
  }
  for (const auto& out : spec.outputs) {
    if (out.is_public) os << "#[public]\n";
    os << "output " << out.name;
    if (out.pacing.kind == Pacing::Kind::Periodic) {
      os << " @" << format_duration(out.pacing.period);
    } else if (out.pacing.kind == Pacing::Kind::EventBased) {
      os << " @";
      bool first = true;
      for (const auto& t : out.pacing.triggers) {
        if (!first) os << ", ";
        os << t;
        first = false;
      }
    }
    if (out.is_tuple())
      os << " := (" << out.tuple_members[0] << ", " << out.tuple_members[1]
         << ")\n";
    else
      os << " := " << render_expr(*out.expr) << "\n";
  }
  return os.str();
}

}  // namespace dpmon
