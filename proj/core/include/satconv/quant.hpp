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

// Fixed-point rescaling of an int32 accumulator into the int8 output domain.
// Represents the real ratio M / 2^(31 + shift).
struct RequantParams {
  std::int32_t multiplier = 1 << 30;  // in [2^30, 2^31)
  int shift = 0;                      // in [-30, kMaxShift]
  std::int32_t zero_point = 0;
  std::int32_t q_lo = -128;
  std::int32_t q_hi = 127;

  friend bool operator==(const RequantParams&, const RequantParams&) = default;
};

inline constexpr int kMinShift = -30;
// 31 + shift must stay below 63 so the 64-bit product can be shifted.
inline constexpr int kMaxShift = 31;

struct Multiplier {
  std::int32_t multiplier;
  int shift;
};

// Nearest (M, s) for a ratio in (0, 2]. Throws InvalidArgument otherwise, or
// when the ratio is too small to be represented with shift <= kMaxShift.
Multiplier derive_multiplier(double ratio);

// The real ratio represented by (M, s).
double multiplier_ratio(std::int32_t multiplier, int shift);

// Throws ValidationError describing the first violated field.
void validate(const RequantParams& p);

// clamp(((acc * M + 2^(30+s)) >> (31+s)) + zo, q_lo, q_hi), computed in
// 64 bits. Single rounding, ties toward +infinity. Monotone in acc.
inline std::int8_t requantize(std::int32_t acc, const RequantParams& p) {
  const int total_shift = 31 + p.shift;
  const std::int64_t round = std::int64_t{1} << (total_shift - 1);
  std::int64_t v =
      ((static_cast<std::int64_t>(acc) * p.multiplier + round) >> total_shift) +
      p.zero_point;
  if (v < p.q_lo) v = p.q_lo;
  if (v > p.q_hi) v = p.q_hi;
  return static_cast<std::int8_t>(v);
}

}  // namespace satconv
