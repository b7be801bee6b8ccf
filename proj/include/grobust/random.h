// Copyright 2026 The grobust Authors.
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

#ifndef GROBUST_RANDOM_H_
#define GROBUST_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace grobust {

using Rng = std::mt19937_64;

// Derives an independent, reproducible stream seed from a base seed and a
// purpose tag. Two trainers asking for the same (seed, tag) get the same
// stream, which is what makes same-seed trajectory comparisons exact.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view tag) {
  // FNV-1a over the tag, then a splitmix64 finalizer.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng MakeRng(std::uint64_t seed, std::string_view tag) {
  return Rng(DeriveSeed(seed, tag));
}

// Uniform integer in [0, n). Avoids std::uniform_int_distribution so the
// sequence does not depend on the standard library implementation.
inline std::size_t UniformIndex(Rng& rng, std::size_t n) {
  const std::uint64_t limit = Rng::max() - Rng::max() % n;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return static_cast<std::size_t>(draw % n);
}

// Uniform double in [0, 1) with 53 random bits.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via the Box-Muller transform, one value per call.
double StandardNormal(Rng& rng);

// Gamma(shape, 1) by Marsaglia and Tsang; shape < 1 uses the boosting
// identity Gamma(a) = Gamma(a + 1) * U^(1/a).
double Gamma(Rng& rng, double shape);

}  // namespace grobust

#endif  // GROBUST_RANDOM_H_
