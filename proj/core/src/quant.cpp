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

#include "satconv/quant.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "satconv/error.hpp"

namespace satconv {

Multiplier derive_multiplier(double ratio) {
  if (!(ratio > 0.0) || !(ratio <= 2.0) || !std::isfinite(ratio)) {
    throw InvalidArgument("invalid ratio " + std::to_string(ratio) +
                          ": must lie in (0, 2]");
  }
  int exponent = 0;
  const double fraction = std::frexp(ratio, &exponent);  // [0.5, 1)
  std::int64_t m = std::llround(std::ldexp(fraction, 31));
  int shift = -exponent;
  if (m == (std::int64_t{1} << 31)) {
    m = std::int64_t{1} << 30;
    shift -= 1;
  }
  if (shift > kMaxShift) {
    throw InvalidArgument("invalid ratio " + std::to_string(ratio) +
                          ": too small for a 64-bit shift");
  }
  return {static_cast<std::int32_t>(m), shift};
}

double multiplier_ratio(std::int32_t multiplier, int shift) {
  return std::ldexp(static_cast<double>(multiplier), -(31 + shift));
}

void validate(const RequantParams& p) {
  constexpr std::int32_t lo = std::numeric_limits<std::int8_t>::min();
  constexpr std::int32_t hi = std::numeric_limits<std::int8_t>::max();
  if (p.multiplier < (1 << 30)) {
    throw ValidationError("requant.M: " + std::to_string(p.multiplier) +
                          " outside [2^30, 2^31)");
  }
  if (p.shift < kMinShift || p.shift > kMaxShift) {
    throw ValidationError("requant.s: " + std::to_string(p.shift) +
                          " outside [-30, 31]");
  }
  if (multiplier_ratio(p.multiplier, p.shift) > 2.0) {
    throw ValidationError("requant.s: represented ratio exceeds 2");
  }
  if (p.zero_point < lo || p.zero_point > hi) {
    throw ValidationError("requant.zo: outside int8 range");
  }
  if (p.q_lo < lo || p.q_hi > hi || p.q_lo > p.q_hi) {
    throw ValidationError("requant.q_lo/q_hi: invalid clamp range [" +
                          std::to_string(p.q_lo) + ", " +
                          std::to_string(p.q_hi) + "]");
  }
}

}  // namespace satconv
