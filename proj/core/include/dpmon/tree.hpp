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

#ifndef DPMON_TREE_HPP
#define DPMON_TREE_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "dpmon/rational.hpp"
#include "dpmon/rng.hpp"

namespace dpmon {

// Per-level budget of the infinite binary-tree mechanism: 6*eps/(pi^2 k^2),
// summing to eps over all levels.
double geometric_budget(long level, double eps);

// A dyadic block: level k >= 1 covers buckets [j*2^(k-1), (j+1)*2^(k-1)).
struct DyadicNode {
  long level;
  long index;
};

// Canonical cover of the bucket interval [lo, hi) by maximal aligned dyadic
// blocks; at most 2*log2(hi-lo)+O(1) nodes.
std::vector<DyadicNode> dyadic_cover(long lo, long hi);

// Continual-release state for one tree barrier. Each dyadic node is noised
// exactly once (on first use) and the noisy value cached across releases.
class TreeState {
 public:
  enum class BudgetMode { Geometric, UniformSliding, RenormalizedSliding };

  // window_buckets = 0 means all-time aggregation (prefix release).
  TreeState(long window_buckets, double bound, double eps, BudgetMode mode,
            std::uint64_t seed, std::uint64_t stream_key, bool zero_noise);

  void ingest_bucket(double sum, long count);
  long buckets() const { return static_cast<long>(bucket_sums_.size()); }

  // Noisy sum over the current window (or the whole prefix); exact count of
  // contributing events (counts have zero sensitivity).
  double release_sum();
  long release_count() const;

  double level_budget(long level) const;

 private:
  double node_value(const DyadicNode& node);

  long window_buckets_;
  double bound_, eps_;
  BudgetMode mode_;
  std::uint64_t seed_, stream_key_;
  bool zero_noise_;
  long capped_levels_;  // sliding trees never need deeper nodes
  std::vector<double> bucket_sums_;
  std::vector<long> bucket_counts_;
  std::vector<double> prefix_counts_;
  std::map<std::pair<long, long>, double> noisy_nodes_;
};

}  // namespace dpmon

#endif  // DPMON_TREE_HPP
