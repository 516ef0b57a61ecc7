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

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "doctest.h"
#include "dpmon/diagnostics.hpp"
#include "dpmon/parser.hpp"
#include "dpmon/printer.hpp"
#include "golden.hpp"
#include "random_specs.hpp"

using namespace dpmon;

namespace {

struct Token {
  std::size_t begin, end;  // byte range in the source text
  int line;                // 1-based
};

// Comment-skipping scanner: identifier/number runs or single punctuation.
std::vector<Token> scan(const std::string& text) {
  std::vector<Token> tokens;
  int line = 1;
  std::size_t i = 0;
  auto word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (word(c)) {
      std::size_t b = i;
      while (i < text.size() && word(text[i])) ++i;
      tokens.push_back({b, i, line});
    } else {
      tokens.push_back({i, i + 1, line});
      ++i;
    }
  }
  return tokens;
}

}  // namespace

TEST_CASE("render/parse round trip on randomized specifications") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    dpmon::testing::SoundCase c = dpmon::testing::random_sound_case(seed);
    Specification a = parse_specification(c.spec_text);
    Specification b = parse_specification(render_specification(a));
    CAPTURE(seed);
    CHECK(spec_equal(a, b));
  }
  Specification a = parse_specification(feedback_spec_text());
  CHECK(spec_equal(a, parse_specification(render_specification(a))));
}

TEST_CASE("single-token deletion is rejected with a nearby diagnostic") {
  std::vector<std::string> sources = {feedback_spec_text()};
  for (std::uint64_t seed : {3u, 17u, 42u})
    sources.push_back(dpmon::testing::random_sound_case(seed).spec_text);
  long mutants = 0, rejected = 0, localized = 0;
  for (const std::string& text : sources) {
    for (const Token& tok : scan(text)) {
      std::string mutated =
          text.substr(0, tok.begin) + text.substr(tok.end);
      ++mutants;
      try {
        parse_specification(mutated);
      } catch (const SpecError& e) {
        ++rejected;
        if (e.line() >= 0 && std::abs(e.line() - tok.line) <= 1) ++localized;
      }
    }
  }
  CAPTURE(mutants);
  CAPTURE(rejected);
  CAPTURE(localized);
  // Most deletions must be caught, and the diagnostics must point close to
  // the damage (same or adjacent line).
  CHECK(rejected > 0.80 * mutants);
  CHECK(localized > 0.80 * rejected);
}
