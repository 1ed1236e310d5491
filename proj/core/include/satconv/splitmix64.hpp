// Copyright 2026 The satconv Authors. All Rights Reserved.
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

namespace satconv {

// SplitMix64 (Steele, Lea, Flood 2014). The only PRNG used for model and
// input generation, so generated artifacts are reproducible across platforms.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Top byte of the next output, reinterpreted as two's complement.
  constexpr std::int8_t next_int8() {
    return static_cast<std::int8_t>(static_cast<std::uint8_t>(next() >> 56));
  }

  // Top 16 bits of the next output, reinterpreted as two's complement.
  constexpr std::int16_t next_int16() {
    return static_cast<std::int16_t>(static_cast<std::uint16_t>(next() >> 48));
  }

  // Uniform in [0, bound) by multiply-shift; bound must be nonzero.
  constexpr std::uint64_t next_below(std::uint64_t bound) {
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(next()) * bound) >> 64);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  constexpr double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace satconv
