// Copyright 2026 The Taxlog Authors
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

#ifndef TAXLOG_RNG_HPP_
#define TAXLOG_RNG_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace taxlog {

/// Deterministic RNG (splitmix64). The standard <random> distributions are
/// not bit-stable across implementations, so every seeded artifact in the
/// toolkit draws through this generator instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [lo, hi], inclusive. Rejection-free modulo is fine
  /// here: ranges are tiny relative to 2^64 so bias is negligible and, more
  /// importantly, the draw sequence is reproducible everywhere.
  std::int64_t next_in_range(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Stable sub-stream derivation so generation order never matters:
  /// two pipelines deriving Rng(seed, "case-17") get identical draws.
  static Rng derive(std::uint64_t seed, const std::string& label) {
    std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
    for (unsigned char c : label) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return Rng(h);
  }

 private:
  std::uint64_t state_;
};

}  // namespace taxlog

#endif  // TAXLOG_RNG_HPP_
