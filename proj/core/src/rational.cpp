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

#include "dpmon/rational.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace dpmon {

Rat rat_from_parts(const Int& numerator, const Int& denominator) {
  return Rat(numerator, denominator);
}

std::optional<Rat> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '-' || text[pos] == '+') {
    negative = text[pos] == '-';
    ++pos;
  }
  if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
    return std::nullopt;
  Int numerator = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    numerator = numerator * 10 + (text[pos] - '0');
    ++pos;
  }
  Int denominator = 1;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      return std::nullopt;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      numerator = numerator * 10 + (text[pos] - '0');
      denominator *= 10;
      ++pos;
    }
  } else if (pos < text.size() && text[pos] == '/') {
    ++pos;
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      return std::nullopt;
    Int den = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      den = den * 10 + (text[pos] - '0');
      ++pos;
    }
    if (den == 0) return std::nullopt;
    denominator = den;
  }
  if (pos != text.size()) return std::nullopt;
  Rat r(numerator, denominator);
  return negative ? Rat(-r) : r;
}

std::string format_rational(const Rat& r) {
  Int num = boost::multiprecision::numerator(r);
  Int den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  // Terminating decimal iff the denominator is of the form 2^a * 5^b.
  Int d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d == 1 && twos <= 18 && fives <= 18) {
    int digits = std::max(twos, fives);
    Int scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    Int scaled = num * scale / den;
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string s = scaled.str();
    while (static_cast<int>(s.size()) <= digits) s = "0" + s;
    s.insert(s.size() - digits, ".");
    // Trim trailing zeros but keep at least one fractional digit.
    while (s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
    return (neg ? "-" : "") + s;
  }
  return num.str() + "/" + den.str();
}

std::string format_duration(const Rat& seconds) {
  static const struct { const char* suffix; long long factor; } kUnits[] = {
      {"d", 86400}, {"h", 3600}, {"m", 60}, {"s", 1}};
  for (const auto& u : kUnits) {
    Rat scaled = seconds / u.factor;
    if (boost::multiprecision::denominator(scaled) == 1)
      return format_rational(scaled) + u.suffix;
  }
  return format_rational(seconds) + "s";
}

Rat ceil_div(const Rat& a, const Rat& b) {
  Rat q = a / b;
  Int num = boost::multiprecision::numerator(q);
  Int den = boost::multiprecision::denominator(q);
  Int fl = num / den;
  if (num % den != 0 && num > 0) fl += 1;
  return Rat(fl);
}

Rat floor_div(const Rat& a, const Rat& b) {
  Rat q = a / b;
  Int num = boost::multiprecision::numerator(q);
  Int den = boost::multiprecision::denominator(q);
  Int fl = num / den;
  if (num % den != 0 && num < 0) fl -= 1;
  return Rat(fl);
}

double ExtRat::to_double() const {
  switch (tag_) {
    case Tag::PosInf: return std::numeric_limits<double>::infinity();
    case Tag::NegInf: return -std::numeric_limits<double>::infinity();
    default: return dpmon::to_double(value_);
  }
}

ExtRat ExtRat::operator+(const ExtRat& o) const {
  if (is_finite() && o.is_finite()) return ExtRat(value_ + o.value_);
  if (is_pos_inf() || o.is_pos_inf()) {
    if (is_neg_inf() || o.is_neg_inf())
      throw std::domain_error("ExtRat: inf + -inf");
    return pos_inf();
  }
  return neg_inf();
}

ExtRat ExtRat::operator-() const {
  if (is_pos_inf()) return neg_inf();
  if (is_neg_inf()) return pos_inf();
  return ExtRat(Rat(-value_));
}

ExtRat ExtRat::operator*(const ExtRat& o) const {
  if (is_finite() && o.is_finite()) return ExtRat(value_ * o.value_);
  // Interval-arithmetic convention: 0 * inf = 0.
  auto sign = [](const ExtRat& e) -> int {
    if (e.is_pos_inf()) return 1;
    if (e.is_neg_inf()) return -1;
    if (e.value_ > 0) return 1;
    if (e.value_ < 0) return -1;
    return 0;
  };
  int s = sign(*this) * sign(o);
  if (s == 0) return ExtRat(0);
  return s > 0 ? pos_inf() : neg_inf();
}

bool ExtRat::operator==(const ExtRat& o) const {
  if (tag_ != o.tag_) return false;
  if (tag_ != Tag::Finite) return true;
  return value_ == o.value_;
}

bool ExtRat::operator<(const ExtRat& o) const {
  if (tag_ == o.tag_) return tag_ == Tag::Finite && value_ < o.value_;
  if (is_neg_inf()) return true;
  if (o.is_neg_inf()) return false;
  return o.is_pos_inf();
}

std::string ExtRat::str() const {
  if (is_pos_inf()) return "inf";
  if (is_neg_inf()) return "-inf";
  return format_rational(value_);
}

}  // namespace dpmon
