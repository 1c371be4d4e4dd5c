// Copyright 2026 The CATK Authors
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

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "catk/error.hpp"

namespace catk {

/// Seeded pseudorandom source. The algorithm is pinned so that streams are
/// reproducible bit-for-bit across platforms and runs:
///   engine   = std::mt19937_64(seed)   (standardized output sequence)
///   bounded  = rejection sampling below the largest multiple of the range,
///              then reduction modulo the range (no modulo bias)
/// std::uniform_int_distribution is deliberately avoided; its mapping is
/// implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform draw in [0, n).
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) throw InvalidInput("bounded draw with empty range");
    // Largest multiple of n that fits in 64 bits; draws at or above it
    // are rejected so every residue is equally likely.
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [-1, 1).
  double symmetric() { return 2.0 * unit() - 1.0; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer. Used as a stateless mixing function for
/// deterministic, key-addressable pseudorandom values (word embeddings,
/// projection matrices) where a sequential stream would be awkward.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// FNV-1a 64-bit string hash.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Deterministic value in [-1, 1) addressed by (seed, key, index).
inline double keyed_unit(std::uint64_t seed, std::uint64_t key,
                         std::uint64_t index) {
  const std::uint64_t x = splitmix64(seed ^ splitmix64(key ^ splitmix64(index)));
  return 2.0 * (static_cast<double>(x >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace catk
