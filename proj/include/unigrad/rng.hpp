// Copyright 2026 The UniGrad Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNIGRAD_RNG_HPP_
#define UNIGRAD_RNG_HPP_

#include <cmath>
#include <cstdint>

#include "unigrad/common.hpp"

namespace unigrad {

// Counter-based generator (splitmix64 over a mixed key). Draws depend only on
// (seed, stream, counter), so per-round randomness is reproducible without
// storing a stream state and independent of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Modulo bias is negligible for n << 2^64.
    return next_u64() % n;
  }

  /// Standard normal via Box-Muller (no library distribution, so the stream
  /// is identical across standard library implementations).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Vec gaussian_vec(int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = gaussian();
    return v;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stateless hash of (seed, stream, t); used for lazily generated per-round
/// draws in horizonless runs.
inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t t) {
  return Rng::mix(Rng::mix(seed ^ (stream * 0xda942042e4dd58b5ULL)) ^ t);
}

}  // namespace unigrad

#endif  // UNIGRAD_RNG_HPP_
