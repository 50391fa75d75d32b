// Copyright 2026 optmct Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace optmct {

// Deterministic random source. Draws use modular reduction, not library
// distributions, so streams are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  /// Uniform-ish draw from {0..n-1}; n = 0 returns 0.
  std::size_t pick(std::size_t n) {
    return n == 0 ? 0 : static_cast<std::size_t>(eng_() % n);
  }

  bool coin() { return (eng_() & 1) != 0; }

  /// Independent per-case seed derived from a master seed.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master ^ (index + 0x9E3779B97F4A7C15ULL +
                                (master << 6) + (master >> 2));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace optmct
