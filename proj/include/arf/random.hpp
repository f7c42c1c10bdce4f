// Copyright 2026 The arfcpp Authors
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

// Random number plumbing.
//
// Every random component draws from an Engine seeded by derive_seed(seed,
// stream...), so results depend only on the user seed and the logical
// position of the draw (tree index, row index, round), never on scheduling.
// Variates are produced by the helpers below rather than by <random>
// distributions, whose output is implementation-defined.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "arf/normal.hpp"

namespace arf {

__extension__ typedef __int128 int128_t;
__extension__ typedef unsigned __int128 uint128_t;

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a path of stream
// identifiers, e.g. derive_seed(seed, {kTreeStream, round, tree}).
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  return h;
}

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
  return Engine(derive_seed(seed, path));
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1).
inline double uniform_open01(Engine& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Unbiased integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
inline std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
  uint128_t m = static_cast<uint128_t>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<uint128_t>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

inline double standard_normal(Engine& rng) { return normal_quantile(uniform_open01(rng)); }

inline bool bernoulli(Engine& rng, double p) { return uniform01(rng) < p; }

// Stream identifiers used with derive_seed.
namespace stream {
inline constexpr std::uint64_t kTree = 1;
inline constexpr std::uint64_t kSynthetic = 2;
inline constexpr std::uint64_t kForgeRow = 3;
inline constexpr std::uint64_t kSplit = 4;
inline constexpr std::uint64_t kSimulate = 5;
inline constexpr std::uint64_t kLearner = 6;
inline constexpr std::uint64_t kGenerator = 7;
inline constexpr std::uint64_t kDiscriminator = 8;
}  // namespace stream

}  // namespace arf
