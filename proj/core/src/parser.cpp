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

#include "dpmon/parser.hpp"

#include <cctype>
#include <map>
#include <vector>

#include "dpmon/diagnostics.hpp"

namespace dpmon {
namespace {

enum class Tok {
  Ident, Number, Duration,
  KwInput, KwOutput, KwRange, KwIf, KwThen, KwElse,
  KwMin, KwMax, KwClamp, KwPublic,
  LParen, RParen, LBracket, RBracket, Comma, Colon, Assign, Dot, At,
  Plus, Minus, Star, Slash, Hash,
  Lt, Le, Eq, Gt, Ge,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  Rat number;  // Number / Duration (seconds)
  int line, column, index;
};

const std::map<std::string, Tok>& keywords() {
  static const std::map<std::string, Tok> kw = {
      {"input", Tok::KwInput}, {"output", Tok::KwOutput},
      {"if", Tok::KwIf},       {"then", Tok::KwThen},     {"else", Tok::KwElse},
      {"min", Tok::KwMin},     {"max", Tok::KwMax},       {"clamp", Tok::KwClamp},
      {"public", Tok::KwPublic},
  };
  return kw;
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_trivia();
      if (pos_ >= text_.size()) break;
      tokens.push_back(next());
      tokens.back().index = static_cast<int>(tokens.size()) - 1;
    }
    tokens.push_back({Tok::End, "", Rat(0), line_, column_,
                      static_cast<int>(tokens.size())});
    return tokens;
  }

 private:
  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') { ++line_; column_ = 1; ++pos_; }
      else if (std::isspace(static_cast<unsigned char>(c))) { advance(); }
      else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else break;
    }
  }

  Token next() {
    int line = line_, col = column_;
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(line, col);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        word += text_[pos_];
        advance();
      }
      auto it = keywords().find(word);
      if (it != keywords().end()) return {it->second, word, Rat(0), line, col, 0};
      return {Tok::Ident, word, Rat(0), line, col, 0};
    }
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < text_.size() && text_[pos_ + 1] == b;
    };
    if (two(':', '=')) { advance(); advance(); return {Tok::Assign, ":=", Rat(0), line, col, 0}; }
    if (two('<', '=')) { advance(); advance(); return {Tok::Le, "<=", Rat(0), line, col, 0}; }
    if (two('>', '=')) { advance(); advance(); return {Tok::Ge, ">=", Rat(0), line, col, 0}; }
    if (two('=', '=')) { advance(); advance(); return {Tok::Eq, "==", Rat(0), line, col, 0}; }
    advance();
    switch (c) {
      case '(': return {Tok::LParen, "(", Rat(0), line, col, 0};
      case ')': return {Tok::RParen, ")", Rat(0), line, col, 0};
      case '[': return {Tok::LBracket, "[", Rat(0), line, col, 0};
      case ']': return {Tok::RBracket, "]", Rat(0), line, col, 0};
      case ',': return {Tok::Comma, ",", Rat(0), line, col, 0};
      case ':': return {Tok::Colon, ":", Rat(0), line, col, 0};
      case '.': return {Tok::Dot, ".", Rat(0), line, col, 0};
      case '@': return {Tok::At, "@", Rat(0), line, col, 0};
      case '+': return {Tok::Plus, "+", Rat(0), line, col, 0};
      case '-': return {Tok::Minus, "-", Rat(0), line, col, 0};
      case '*': return {Tok::Star, "*", Rat(0), line, col, 0};
      case '/': return {Tok::Slash, "/", Rat(0), line, col, 0};
      case '#': return {Tok::Hash, "#", Rat(0), line, col, 0};
      case '<': return {Tok::Lt, "<", Rat(0), line, col, 0};
      case '>': return {Tok::Gt, ">", Rat(0), line, col, 0};
      case '=': return {Tok::Eq, "=", Rat(0), line, col, 0};
      default:
        throw SpecError("SyntaxError", std::string("unexpected character '") + c + "'",
                        line, col);
    }
  }

  Token lex_number(int line, int col) {
    std::string digits;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      digits += text_[pos_];
      advance();
    }
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      digits += '.';
      advance();
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits += text_[pos_];
        advance();
      }
    }
    Rat value = *parse_rational(digits);
    // A trailing unit letter turns the literal into a duration in seconds.
    if (pos_ < text_.size()) {
      char u = text_[pos_];
      long long factor = 0;
      if (u == 's') factor = 1;
      else if (u == 'm') factor = 60;
      else if (u == 'h') factor = 3600;
      else if (u == 'd') factor = 86400;
      if (factor > 0) {
        bool more_ident = pos_ + 1 < text_.size() &&
                          (std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])) ||
                           text_[pos_ + 1] == '_');
        if (!more_ident) {
          advance();
          return {Tok::Duration, digits + u, value * factor, line, col, 0};
        }
      }
    }
    return {Tok::Number, digits, value, line, col, 0};
  }

  void advance() { ++pos_; ++column_; }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, column_ = 1;
};

struct TupleDecl {
  std::string name;
  std::string first, second;
  bool is_public;
  Token at;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseOptions& options)
      : tokens_(std::move(tokens)), options_(options) {}

  Specification run() {
    Specification spec;
    std::vector<TupleDecl> tuples;
    while (peek().kind != Tok::End) {
      bool is_public = false;
      if (peek().kind == Tok::Hash) {
        expect(Tok::Hash);
        expect(Tok::LBracket);
        expect(Tok::KwPublic, "'public'");
        expect(Tok::RBracket);
        is_public = true;
      }
      if (peek().kind == Tok::KwInput) {
        if (is_public)
          throw error("inputs cannot be marked public", peek());
        spec.inputs.push_back(parse_input());
      } else if (peek().kind == Tok::KwOutput) {
        parse_output(spec, tuples, is_public);
      } else {
        throw error("expected 'input' or 'output' declaration", peek());
      }
    }
    desugar_tuples(spec, tuples);
    validate(spec);
    return spec;
  }

 private:
  InputDecl parse_input() {
    expect(Tok::KwInput);
    InputDecl in;
    in.name = expect(Tok::Ident, "input name").text;
    expect(Tok::Colon);
    in.type = expect(Tok::Ident, "type name").text;
    // `range` is contextual: a keyword only in this position.
    if (peek().kind == Tok::Ident && peek().text == "range") {
      advance();
      expect(Tok::LBracket);
      in.lo = parse_signed_number();
      expect(Tok::Comma);
      in.hi = parse_signed_number();
      expect(Tok::RBracket);
      in.bounded = true;
      if (in.hi < in.lo)
        throw SpecError("SyntaxError", "input range has lo > hi");
    }
    return in;
  }

  void parse_output(Specification& spec, std::vector<TupleDecl>& tuples,
                    bool is_public) {
    Token kw = expect(Tok::KwOutput);
    OutputDecl out;
    out.is_public = is_public;
    out.name = expect(Tok::Ident, "output name").text;
    if (peek().kind == Tok::At) out.pacing = parse_pacing();
    expect(Tok::Assign, "':='");
    // Tuple form: (name, name) with nothing following on the declaration.
    // The alias stream carries no value; its members become public.
    if (peek().kind == Tok::LParen && peek(1).kind == Tok::Ident &&
        peek(2).kind == Tok::Comma && peek(3).kind == Tok::Ident &&
        peek(4).kind == Tok::RParen) {
      expect(Tok::LParen);
      out.tuple_members.push_back(expect(Tok::Ident).text);
      expect(Tok::Comma);
      out.tuple_members.push_back(expect(Tok::Ident, "stream name").text);
      expect(Tok::RParen);
      out.is_public = false;
      TupleDecl t;
      t.name = out.name;
      t.first = out.tuple_members[0];
      t.second = out.tuple_members[1];
      t.is_public = true;
      t.at = kw;
      tuples.push_back(std::move(t));
      spec.outputs.push_back(std::move(out));
      return;
    }
    out.expr = parse_expr();
    spec.outputs.push_back(std::move(out));
  }

  Pacing parse_pacing() {
    expect(Tok::At);
    Pacing p;
    if (peek().kind == Tok::Duration || peek().kind == Tok::Number) {
      Token t = advance();
      Rat period = t.kind == Tok::Duration ? t.number : t.number;  // bare = seconds
      if (period <= 0) throw error("periodic pacing requires a positive period", t);
      p = Pacing::periodic(period);
    } else if (peek().kind == Tok::Ident) {
      std::set<std::string> triggers;
      triggers.insert(expect(Tok::Ident).text);
      while (peek().kind == Tok::Comma) {
        expect(Tok::Comma);
        triggers.insert(expect(Tok::Ident, "input name").text);
      }
      p = Pacing::event_based(std::move(triggers));
    } else {
      throw error("expected a period or trigger list after '@'", peek());
    }
    if (peek().kind == Tok::At) expect(Tok::At);  // @1d@ and @1d both accepted
    return p;
  }

  Rat parse_signed_number() {
    bool neg = false;
    if (peek().kind == Tok::Minus) { expect(Tok::Minus); neg = true; }
    Token t = expect(Tok::Number, "number");
    Rat v = t.number;
    if (peek().kind == Tok::Slash) {
      expect(Tok::Slash);
      Token d = expect(Tok::Number, "denominator");
      if (d.number == 0) throw error("zero denominator", d);
      v /= d.number;
    }
    return neg ? Rat(-v) : v;
  }

  ExprPtr parse_expr() {
    if (peek().kind == Tok::KwIf) return parse_ite();
    return parse_cmp();
  }

  ExprPtr parse_ite() {
    expect(Tok::KwIf);
    ExprPtr c = parse_expr();
    expect(Tok::KwThen, "'then'");
    ExprPtr a = parse_expr();
    expect(Tok::KwElse, "'else'");
    ExprPtr b = parse_expr();
    return Expr::ite(std::move(c), std::move(a), std::move(b));
  }

  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_add();
    CmpKind k;
    switch (peek().kind) {
      case Tok::Lt: k = CmpKind::Lt; break;
      case Tok::Le: k = CmpKind::Le; break;
      case Tok::Eq: k = CmpKind::Eq; break;
      case Tok::Gt: k = CmpKind::Gt; break;
      case Tok::Ge: k = CmpKind::Ge; break;
      default: return lhs;
    }
    advance();
    ExprPtr rhs = parse_add();
    return Expr::compare(k, std::move(lhs), std::move(rhs));
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      BinKind k = peek().kind == Tok::Plus ? BinKind::Add : BinKind::Sub;
      advance();
      e = Expr::binop(k, std::move(e), parse_mul());
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (peek().kind == Tok::Star) {
      advance();
      e = Expr::binop(BinKind::Mul, std::move(e), parse_unary());
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (peek().kind == Tok::Minus) {
      Token m = advance();
      ExprPtr e = parse_unary();
      if (e->kind == Expr::Kind::Const) return Expr::constant(Rat(-e->value));
      return Expr::binop(BinKind::Sub, Expr::constant(Rat(0)), std::move(e));
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    while (peek().kind == Tok::Dot) {
      expect(Tok::Dot);
      Token method = expect(Tok::Ident, "method name");
      e = parse_method(std::move(e), method);
    }
    return e;
  }

  // Receiver of offset/hold/aggregate/last must be a bare stream name.
  std::string receiver_stream(const ExprPtr& e, const Token& at) {
    if (e->kind != Expr::Kind::Sync)
      throw error("temporal access requires a stream name receiver", at);
    return e->stream;
  }

  ExprPtr parse_method(ExprPtr recv, const Token& method) {
    expect(Tok::LParen);
    const std::string& m = method.text;
    if (m == "offset") {
      expect_label("by");
      Token at = peek();
      Rat o = parse_signed_number();
      expect(Tok::RParen);
      if (boost::multiprecision::denominator(o) != 1 || o >= 0)
        throw SpecError("InvalidOffset",
                        "offset must be a negative integer (use the bare name "
                        "for a synchronous access)",
                        at.line, at.column, at.index);
      return Expr::offset_of(
          receiver_stream(recv, method),
          static_cast<long>(boost::multiprecision::numerator(Rat(-o))));
    }
    if (m == "hold") {
      std::optional<long> bound;
      ExprPtr dft;
      while (peek().kind != Tok::RParen) {
        Token label = expect(Tok::Ident, "'for' or 'or'");
        expect(Tok::Colon);
        if (label.text == "for") {
          Token n = expect(Tok::Number, "hold bound");
          if (boost::multiprecision::denominator(n.number) != 1 || n.number < 1)
            throw error("hold bound must be a positive integer", n);
          bound = static_cast<long>(boost::multiprecision::numerator(n.number));
        } else if (label.text == "or") {
          dft = parse_expr();
        } else {
          throw error("expected 'for' or 'or'", label);
        }
        if (peek().kind == Tok::Comma) expect(Tok::Comma);
      }
      expect(Tok::RParen);
      ExprPtr h = Expr::hold(receiver_stream(recv, method), bound);
      return dft ? Expr::defaults(std::move(h), std::move(dft)) : h;
    }
    if (m == "last") {
      expect_label("or");
      ExprPtr dft = parse_expr();
      expect(Tok::RParen);
      return Expr::defaults(Expr::offset_of(receiver_stream(recv, method), 1),
                            std::move(dft));
    }
    if (m == "defaults") {
      expect_label("to");
      ExprPtr dft = parse_expr();
      expect(Tok::RParen);
      return Expr::defaults(std::move(recv), std::move(dft));
    }
    if (m == "aggregate") {
      expect_label("over");
      Token w = peek();
      if (w.kind != Tok::Duration && w.kind != Tok::Number)
        throw error("expected a window duration", w);
      advance();
      if (w.number <= 0) throw error("window duration must be positive", w);
      expect(Tok::Comma);
      expect_label("using");
      AggFunc f = parse_agg_func();
      expect(Tok::RParen);
      return Expr::aggregate(receiver_stream(recv, method), w.number, f);
    }
    throw error("unknown method '" + m + "'", method);
  }

  AggFunc parse_agg_func() {
    Token t = expect(Tok::Ident, "aggregation function");
    if (t.text == "sum") return AggFunc::Sum;
    if (t.text == "avg" || t.text == "average") return AggFunc::Avg;
    if (t.text == "count") return AggFunc::Count;
    if (t.text == "last") return AggFunc::Last;
    throw error("unknown aggregation function '" + t.text + "'", t);
  }

  ExprPtr parse_primary() {
    Token t = peek();
    switch (t.kind) {
      case Tok::Number: {
        advance();
        Rat v = t.number;
        if (peek().kind == Tok::Slash) {
          expect(Tok::Slash);
          Token d = expect(Tok::Number, "denominator");
          if (d.number == 0) throw error("zero denominator", d);
          v /= d.number;
        }
        return Expr::constant(v);
      }
      case Tok::Ident: {
        if (t.text == "laplace") return parse_laplace();
        if (t.text == "tree_sliding" || t.text == "tree_all") return parse_tree();
        advance();
        return Expr::sync(t.text);
      }
      case Tok::LParen: {
        expect(Tok::LParen);
        ExprPtr e = parse_expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::KwMin:
      case Tok::KwMax: {
        advance();
        expect(Tok::LParen);
        ExprPtr a = parse_expr();
        expect(Tok::Comma);
        ExprPtr b = parse_expr();
        expect(Tok::RParen);
        return Expr::binop(t.kind == Tok::KwMin ? BinKind::Min : BinKind::Max,
                           std::move(a), std::move(b));
      }
      case Tok::KwClamp: {
        advance();
        expect(Tok::LParen);
        ExprPtr e = parse_expr();
        expect(Tok::Comma);
        Rat lo = parse_signed_number();
        expect(Tok::Comma);
        Rat hi = parse_signed_number();
        expect(Tok::RParen);
        if (hi < lo)
          throw SpecError("InvalidClamp", "clamp bounds with lo > hi", t.line,
                          t.column, t.index);
        return Expr::clamp(std::move(e), std::move(lo), std::move(hi));
      }
      case Tok::KwIf:
        return parse_ite();
      default:
        throw error("expected an expression", t);
    }
  }

  ExprPtr parse_laplace() {
    Token t = expect(Tok::Ident);
    if (!options_.allow_intrinsics)
      throw SpecError("ReservedName",
                      "laplace(...) is inserted by the compiler and not "
                      "accepted in user specifications",
                      t.line, t.column, t.index);
    expect(Tok::LParen);
    Rat scale = parse_signed_number();
    expect(Tok::RParen);
    if (scale < 0) throw error("laplace scale must be non-negative", t);
    return Expr::laplace(scale);
  }

  ExprPtr parse_tree() {
    Token t = expect(Tok::Ident);
    if (!options_.allow_intrinsics)
      throw SpecError("ReservedName",
                      t.text + "(...) is inserted by the compiler and not "
                      "accepted in user specifications",
                      t.line, t.column, t.index);
    bool sliding = t.text == "tree_sliding";
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Tree;
    expect(Tok::LParen);
    e->stream = expect(Tok::Ident, "stream name").text;
    expect(Tok::Comma);
    if (sliding) {
      expect_label("buckets");
      Token n = expect(Tok::Number, "bucket count");
      e->tree_buckets = static_cast<long>(boost::multiprecision::numerator(n.number));
      if (e->tree_buckets < 1) throw error("bucket count must be positive", n);
      expect(Tok::Comma);
    }
    expect_label("using");
    e->func = parse_agg_func();
    expect(Tok::Comma);
    expect_label("bound");
    e->tree_bound = parse_signed_number();
    expect(Tok::Comma);
    expect_label("budget");
    e->tree_eps = parse_signed_number();
    if (peek().kind == Tok::Comma) {
      expect(Tok::Comma);
      expect_label("default");
      e->tree_default = parse_signed_number();
    }
    expect(Tok::RParen);
    return e;
  }

  void expect_label(const std::string& name) {
    Token t = expect(Tok::Ident, "'" + name + ":'");
    if (t.text != name) throw error("expected '" + name + ":'", t);
    expect(Tok::Colon);
  }

  void desugar_tuples(Specification& spec, const std::vector<TupleDecl>& tuples) {
    for (const auto& t : tuples) {
      for (const std::string& member : {t.first, t.second}) {
        bool found = false;
        for (auto& o : spec.outputs)
          if (o.name == member) { o.is_public = true; found = true; }
        if (!found)
          throw SpecError("UnknownReference",
                          "tuple member '" + member + "' is not an output",
                          t.at.line, t.at.column, t.at.index);
      }
    }
  }

  void validate(const Specification& spec) {
    std::set<std::string> seen;
    for (const auto& name : spec.stream_names())
      if (!seen.insert(name).second)
        throw SpecError("DuplicateStream", "stream '" + name + "' declared twice");
    for (const auto& out : spec.outputs) {
      if (out.pacing.kind == Pacing::Kind::EventBased)
        for (const auto& trig : out.pacing.triggers)
          if (!spec.find_input(trig))
            throw SpecError("UnknownReference",
                            "pacing trigger '" + trig + "' is not an input");
      if (out.expr) validate_expr(spec, out.expr, false);
    }
  }

  void validate_expr(const Specification& spec, const ExprPtr& e, bool cmp_ok) {
    if (e->kind == Expr::Kind::Cmp && !cmp_ok)
      throw SpecError("CmpOutsideIte",
                      "comparisons may appear only as an if-condition");
    if (!e->stream.empty() && !spec.has_stream(e->stream))
      throw SpecError("UnknownReference", "unknown stream '" + e->stream + "'");
    for (std::size_t i = 0; i < e->args.size(); ++i) {
      bool child_cmp_ok = e->kind == Expr::Kind::Ite && i == 0;
      validate_expr(spec, e->args[i], child_cmp_ok);
    }
  }

  const Token& peek(int ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }

  Token advance() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  Token expect(Tok kind, const std::string& what = "") {
    if (peek().kind != kind) {
      std::string msg = what.empty() ? "unexpected token '" + peek().text + "'"
                                     : "expected " + what;
      throw error(msg, peek());
    }
    return advance();
  }

  SpecError error(const std::string& msg, const Token& t) {
    return SpecError("SyntaxError", msg, t.line, t.column, t.index);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseOptions options_;
};

}  // namespace

Specification parse_specification(const std::string& text,
                                  const ParseOptions& options) {
  Lexer lexer(text);
  Parser parser(lexer.run(), options);
  return parser.run();
}

}  // namespace dpmon
