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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "satconv/quant.hpp"

namespace satconv {

// Accumulator-domain saturation thresholds. Every accumulator <= lo
// requantizes to q_lo, every accumulator >= hi requantizes to q_hi. An
// unreachable side holds the matching infinity sentinel.
struct AccBounds {
  static constexpr std::int64_t kNegInf = std::numeric_limits<std::int64_t>::min();
  static constexpr std::int64_t kPosInf = std::numeric_limits<std::int64_t>::max();

  std::int64_t lo = kNegInf;
  std::int64_t hi = kPosInf;

  bool has_lo() const { return lo != kNegInf; }
  bool has_hi() const { return hi != kPosInf; }

  friend bool operator==(const AccBounds&, const AccBounds&) = default;
};

// lo = max{a : requantize(a) = q_lo}, hi = min{a : requantize(a) = q_hi},
// by binary search over int32.
AccBounds acc_boundaries(const RequantParams& p);

// Extreme values of (x - zx) the remaining inputs may take.
struct InputRange {
  std::int32_t lo = -128;
  std::int32_t hi = 127;

  static InputRange for_zero_point(std::int32_t zx) { return {-128 - zx, 127 - zx}; }

  friend bool operator==(const InputRange&, const InputRange&) = default;
};

// Indices sorted by |w| descending, ties by ascending index.
std::vector<int> build_redirection(std::span<const std::int8_t> weights);
std::vector<int> identity_order(int m);

// Interval containing the contribution of every MAC not yet executed, for
// inputs within an InputRange. Indexed by the number of executed reordered
// steps k in [0, m]; k = 0 covers the whole kernel, k = m is (0, 0).
struct DeviationTable {
  std::vector<std::int64_t> min;
  std::vector<std::int64_t> max;

  int m() const { return static_cast<int>(min.size()) - 1; }
};

DeviationTable deviation_tables(std::span<const std::int8_t> weights,
                                std::span<const int> redirection, InputRange range);

enum class Side { kLow, kHigh };

struct Trigger {
  int step;  // executed MACs when the check fires, in [1, m - 1]
  Side side;
};

// Earliest step j at which [acc_j + dev.min[j], acc_j + dev.max[j]] lies
// entirely at or below bounds.lo or at or above bounds.hi. Accumulation
// starts at bias and follows `redirection`.
std::optional<Trigger> earliest_trigger(std::span<const std::int8_t> weights,
                                        std::span<const int> redirection,
                                        const DeviationTable& dev,
                                        std::span<const std::int8_t> patch_row,
                                        std::int32_t bias, std::int32_t zx,
                                        const AccBounds& bounds);

// Largest k such that truncating the original-order accumulation after any of
// m - k, ..., m MACs requantizes to the final output.
int effectless_suffix(std::span<const std::int8_t> weights,
                      std::span<const std::int8_t> patch_row, std::int32_t bias,
                      std::int32_t zx, const RequantParams& requant);

}  // namespace satconv
