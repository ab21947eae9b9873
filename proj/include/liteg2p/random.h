// Copyright (c) 2026 The liteg2p Authors
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

#ifndef LITEG2P_RANDOM_H_
#define LITEG2P_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace liteg2p {

// mt19937_64 is specified bit-exactly by the standard; the std::*_distribution
// classes are not, so the helpers below derive everything from raw draws.
using Rng = std::mt19937_64;

// Unbiased integer in [0, n).
inline uint64_t UniformIndex(Rng& rng, uint64_t n) {
  const uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
  uint64_t x = rng();
  while (x > limit) x = rng();
  return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double UniformRange(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * UniformUnit(rng);
}

// Box-Muller; consumes two draws per sample.
inline double Normal(Rng& rng, double mean, double stddev) {
  double u1 = UniformUnit(rng);
  while (u1 <= 0.0) u1 = UniformUnit(rng);
  const double u2 = UniformUnit(rng);
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(2.0 * 3.14159265358979323846 * u2);
}

template <typename T>
void Shuffle(std::vector<T>* items, Rng& rng) {
  for (size_t i = items->size(); i > 1; --i) {
    const size_t j = UniformIndex(rng, i);
    std::swap((*items)[i - 1], (*items)[j]);
  }
}

std::string SerializeRng(const Rng& rng);
Rng DeserializeRng(const std::string& state);

}  // namespace liteg2p

#endif  // LITEG2P_RANDOM_H_
