// Copyright 2026 The qinet Authors.
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

// Seeded randomness used for tie-breaking and fixture generation.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are not (their algorithms are
// implementation-defined), so the samplers below are written out explicitly
// and every seeded result is identical across compilers and platforms.

#ifndef QINET_RNG_HPP
#define QINET_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace qinet {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform integer in [0, bound). Rejection sampling removes modulo bias.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform_unit(rng) < p; }

// Poisson(mean) by multiplication of uniforms (Knuth). Means used here are
// small, so the O(mean) cost is irrelevant.
inline int poisson(Rng& rng, double mean) {
  const double threshold = std::exp(-mean);
  int k = 0;
  double product = uniform_unit(rng);
  while (product > threshold) {
    ++k;
    product *= uniform_unit(rng);
  }
  return k;
}

}  // namespace qinet

#endif  // QINET_RNG_HPP
