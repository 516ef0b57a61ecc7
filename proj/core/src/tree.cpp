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

#include <cmath>
#include <numbers>

namespace dpmon {

double geometric_budget(long level, double eps) {
  double k = static_cast<double>(level);
  return 6.0 * eps / (std::numbers::pi * std::numbers::pi * k * k);
}

std::vector<DyadicNode> dyadic_cover(long lo, long hi) {
  std::vector<DyadicNode> nodes;
  while (lo < hi) {
    long size = 1;
    // Largest aligned power of two starting at lo that fits in [lo, hi).
    while (lo % (size * 2) == 0 && lo + size * 2 <= hi) size *= 2;
    long level = 1;
    for (long s = size; s > 1; s /= 2) ++level;
    nodes.push_back({level, lo / size});
    lo += size;
  }
  return nodes;
}

TreeState::TreeState(long window_buckets, double bound, double eps,
                     BudgetMode mode, std::uint64_t seed,
                     std::uint64_t stream_key, bool zero_noise)
    : window_buckets_(window_buckets),
      bound_(bound),
      eps_(eps),
      mode_(mode),
      seed_(seed),
      stream_key_(stream_key),
      zero_noise_(zero_noise) {
  capped_levels_ = 1;
  if (window_buckets_ > 0) {
    long size = 1;
    while (size < window_buckets_) {
      size *= 2;
      ++capped_levels_;
    }
  }
}

double TreeState::level_budget(long level) const {
  switch (mode_) {
    case BudgetMode::Geometric:
      return geometric_budget(level, eps_);
    case BudgetMode::UniformSliding:
      return eps_ / static_cast<double>(capped_levels_);
    case BudgetMode::RenormalizedSliding: {
      double total = 0;
      for (long k = 1; k <= capped_levels_; ++k)
        total += geometric_budget(k, 1.0);
      return geometric_budget(level, eps_) / total;
    }
  }
  return eps_;
}

void TreeState::ingest_bucket(double sum, long count) {
  bucket_sums_.push_back(sum);
  bucket_counts_.push_back(count);
}

double TreeState::node_value(const DyadicNode& node) {
  auto key = std::make_pair(node.level, node.index);
  auto it = noisy_nodes_.find(key);
  if (it != noisy_nodes_.end()) return it->second;
  long size = 1L << (node.level - 1);
  long lo = node.index * size;
  double exact = 0;
  for (long i = lo; i < lo + size; ++i) exact += bucket_sums_[i];
  double value = exact;
  if (!zero_noise_ && bound_ > 0 && eps_ > 0) {
    CounterRng rng(seed_, stream_key_,
                   (static_cast<std::uint64_t>(node.level) << 40) ^
                       static_cast<std::uint64_t>(node.index));
    value += sample_laplace(bound_ / level_budget(node.level), rng);
  }
  noisy_nodes_[key] = value;
  return value;
}

double TreeState::release_sum() {
  long n = buckets();
  long lo = window_buckets_ > 0 ? std::max(0L, n - window_buckets_) : 0;
  double total = 0;
  for (const DyadicNode& node : dyadic_cover(lo, n)) total += node_value(node);
  return total;
}

long TreeState::release_count() const {
  long n = buckets();
  long lo = window_buckets_ > 0 ? std::max(0L, n - window_buckets_) : 0;
  long total = 0;
  for (long i = lo; i < n; ++i) total += bucket_counts_[i];
  return total;
}

}  // namespace dpmon
