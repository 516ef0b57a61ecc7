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

#include "dpmon/tree.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace dpmon;

TEST_CASE("dyadic cover is canonical and tight") {
  // Buckets [1, 5): block of four is misaligned, expect [1,2)+[2,4)+[4,5).
  auto cover = dyadic_cover(1, 5);
  REQUIRE(cover.size() == 3);
  CHECK(cover[0].level == 1);
  CHECK(cover[0].index == 1);
  CHECK(cover[1].level == 2);
  CHECK(cover[1].index == 1);
  CHECK(cover[2].level == 1);
  CHECK(cover[2].index == 4);
  // Aligned power of two collapses to one node.
  auto big = dyadic_cover(0, 8);
  REQUIRE(big.size() == 1);
  CHECK(big[0].level == 4);
  CHECK(big[0].index == 0);
  CHECK(dyadic_cover(3, 3).empty());
  // Cover always partitions the interval.
  for (long lo = 0; lo < 40; ++lo)
    for (long hi = lo; hi < 40; ++hi) {
      long total = 0;
      long expect = lo;
      for (const auto& n : dyadic_cover(lo, hi)) {
        long width = 1L << (n.level - 1);
        CHECK(n.index * width == expect);
        expect += width;
        total += width;
      }
      CHECK(total == hi - lo);
      CHECK(expect == hi);
    }
}

TEST_CASE("geometric budgets sum to eps") {
  double sum = 0;
  for (long k = 1; k <= 200000; ++k) sum += geometric_budget(k, 1.0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(geometric_budget(1, 2.0) ==
        doctest::Approx(12.0 / (std::numbers::pi * std::numbers::pi)));
}

TEST_CASE("noise-free trees reproduce exact sums to 256 buckets") {
  TreeState all(0, 10.0, 1.0, TreeState::BudgetMode::Geometric, 1, 1, true);
  TreeState sliding(16, 10.0, 1.0, TreeState::BudgetMode::UniformSliding, 1,
                    2, true);
  std::vector<double> values;
  for (long i = 0; i < 256; ++i) {
    double v = std::fmod(i * 37.0, 11.0) - 5.0;
    values.push_back(v);
    all.ingest_bucket(v, 1);
    sliding.ingest_bucket(v, 1);
    double prefix = 0;
    for (double x : values) prefix += x;
    CHECK(all.release_sum() == doctest::Approx(prefix).epsilon(1e-12));
    CHECK(all.release_count() == i + 1);
    double window = 0;
    for (long j = std::max(0L, i - 15); j <= i; ++j) window += values[j];
    CHECK(sliding.release_sum() == doctest::Approx(window).epsilon(1e-12));
    CHECK(sliding.release_count() == std::min<long>(16, i + 1));
  }
}

TEST_CASE("sliding budget splits uniformly over capped levels") {
  // 16 buckets -> ceil(log2 16) + 1 = 5 levels.
  TreeState t(16, 1.0, 1.0, TreeState::BudgetMode::UniformSliding, 1, 1, true);
  for (long k = 1; k <= 5; ++k)
    CHECK(t.level_budget(k) == doctest::Approx(0.2));
  TreeState g(0, 1.0, 1.0, TreeState::BudgetMode::Geometric, 1, 1, true);
  CHECK(g.level_budget(3) == doctest::Approx(geometric_budget(3, 1.0)));
}

TEST_CASE("noisy releases are deterministic per seed and cache node noise") {
  auto run = [](std::uint64_t seed) {
    TreeState t(8, 5.0, 1.0, TreeState::BudgetMode::UniformSliding, seed, 9,
                false);
    std::vector<double> out;
    for (long i = 0; i < 32; ++i) {
      t.ingest_bucket(1.0, 1);
      out.push_back(t.release_sum());
    }
    return out;
  };
  auto a = run(5), b = run(5), c = run(6);
  CHECK(a == b);
  CHECK(a != c);
  // Re-releasing without new data must reuse cached node noise.
  TreeState t(8, 5.0, 1.0, TreeState::BudgetMode::UniformSliding, 5, 9, false);
  for (long i = 0; i < 12; ++i) t.ingest_bucket(2.0, 1);
  CHECK(t.release_sum() == t.release_sum());
}
