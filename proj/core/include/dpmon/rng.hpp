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

#ifndef DPMON_RNG_HPP
#define DPMON_RNG_HPP

#include <cmath>
#include <cstdint>

namespace dpmon {

// Counter-based generator (SplitMix64 finalizer over a keyed counter).
// Draws are a pure function of (seed, key, counter), so results do not
// depend on evaluation interleaving; distinct keys give independent
// substreams.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t key_a, std::uint64_t key_b = 0)
      : state_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(key_a)) ^
               mix(key_b + 0x94d049bb133111ebULL)) {}

  std::uint64_t next_u64() {
    std::uint64_t z = state_ + 0x9e3779b97f4a7c15ULL * ++counter_;
    return mix(z);
  }

  // Uniform in (0, 1), never exactly 0 or 1.
  double next_unit() {
    std::uint64_t bits = next_u64() >> 11;  // 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1p-53;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

 private:
  std::uint64_t state_;
  std::uint64_t counter_ = 0;
};

// Inverse-CDF Laplace sample with the given scale (mean 0, variance
// 2*scale^2); scale 0 returns exactly 0.
inline double sample_laplace(double scale, CounterRng& rng) {
  if (scale <= 0) return 0.0;
  double u = rng.next_unit() - 0.5;  // (-1/2, 1/2)
  double mag = std::log(1.0 - 2.0 * std::fabs(u));
  return u < 0 ? scale * mag : -scale * mag;
}

}  // namespace dpmon

#endif  // DPMON_RNG_HPP
