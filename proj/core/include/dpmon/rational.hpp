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

#ifndef DPMON_RATIONAL_HPP
#define DPMON_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace dpmon {

// Exact rational arithmetic for the static analysis; runtime stream values
// are plain doubles.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return static_cast<double>(r); }

Rat rat_from_parts(const Int& numerator, const Int& denominator);

// Parses "3", "-1.5", "51/2". Returns nullopt on malformed input.
std::optional<Rat> parse_rational(const std::string& text);

// Canonical text: integer ("15"), terminating decimal ("1.5"), or "p/q".
std::string format_rational(const Rat& r);

// Seconds rendered with the largest exact unit among d/h/m/s ("259200" -> "3d").
std::string format_duration(const Rat& seconds);

Rat ceil_div(const Rat& a, const Rat& b);   // smallest integer >= a/b
Rat floor_div(const Rat& a, const Rat& b);  // largest integer <= a/b

// A rational extended with +/- infinity; arithmetic saturates. Used for
// value ranges and sensitivity bounds where unboundedness is a value.
class ExtRat {
 public:
  ExtRat() : tag_(Tag::Finite), value_(0) {}
  ExtRat(Rat v) : tag_(Tag::Finite), value_(std::move(v)) {}
  ExtRat(int v) : tag_(Tag::Finite), value_(v) {}
  static ExtRat pos_inf() { return ExtRat(Tag::PosInf); }
  static ExtRat neg_inf() { return ExtRat(Tag::NegInf); }

  bool is_finite() const { return tag_ == Tag::Finite; }
  bool is_pos_inf() const { return tag_ == Tag::PosInf; }
  bool is_neg_inf() const { return tag_ == Tag::NegInf; }
  const Rat& finite() const { return value_; }
  double to_double() const;

  ExtRat operator+(const ExtRat& o) const;
  ExtRat operator-() const;
  ExtRat operator-(const ExtRat& o) const { return *this + (-o); }
  ExtRat operator*(const ExtRat& o) const;
  bool operator==(const ExtRat& o) const;
  bool operator<(const ExtRat& o) const;
  bool operator<=(const ExtRat& o) const { return *this < o || *this == o; }

  static ExtRat min(const ExtRat& a, const ExtRat& b) { return a < b ? a : b; }
  static ExtRat max(const ExtRat& a, const ExtRat& b) { return a < b ? b : a; }

  std::string str() const;

 private:
  enum class Tag { NegInf, Finite, PosInf };
  explicit ExtRat(Tag t) : tag_(t), value_(0) {}
  Tag tag_;
  Rat value_;
};

}  // namespace dpmon

#endif  // DPMON_RATIONAL_HPP
