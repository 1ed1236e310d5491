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

#include "satconv/saturation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "satconv/error.hpp"

namespace satconv {

namespace {

constexpr std::int32_t kAccMin = std::numeric_limits<std::int32_t>::min();
constexpr std::int32_t kAccMax = std::numeric_limits<std::int32_t>::max();

void check_lengths(std::size_t w, std::size_t r, std::size_t x, const char* op) {
  if (w != r || w != x) {
    throw InvalidArgument(std::string(op) + ": length mismatch (weights " +
                          std::to_string(w) + ", redirection " +
                          std::to_string(r) + ", patch " + std::to_string(x) + ")");
  }
}

}  // namespace

AccBounds acc_boundaries(const RequantParams& p) {
  AccBounds b;
  if (requantize(kAccMin, p) == p.q_lo) {
    if (requantize(kAccMax, p) == p.q_lo) {
      b.lo = kAccMax;
    } else {
      // Invariant: requantize(lo) == q_lo, requantize(hi) > q_lo.
      std::int64_t lo = kAccMin;
      std::int64_t hi = kAccMax;
      while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (requantize(static_cast<std::int32_t>(mid), p) == p.q_lo) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      b.lo = lo;
    }
  }
  if (requantize(kAccMax, p) == p.q_hi) {
    if (requantize(kAccMin, p) == p.q_hi) {
      b.hi = kAccMin;
    } else {
      // Invariant: requantize(lo) < q_hi, requantize(hi) == q_hi.
      std::int64_t lo = kAccMin;
      std::int64_t hi = kAccMax;
      while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (requantize(static_cast<std::int32_t>(mid), p) == p.q_hi) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      b.hi = hi;
    }
  }
  return b;
}

std::vector<int> build_redirection(std::span<const std::int8_t> weights) {
  std::vector<int> order = identity_order(static_cast<int>(weights.size()));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(int{weights[a]}) > std::abs(int{weights[b]});
  });
  return order;
}

std::vector<int> identity_order(int m) {
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

DeviationTable deviation_tables(std::span<const std::int8_t> weights,
                                std::span<const int> redirection, InputRange range) {
  if (weights.size() != redirection.size()) {
    throw InvalidArgument("deviation_tables: length mismatch");
  }
  if (range.lo > 0 || range.hi < 0) {
    throw InvalidArgument("deviation_tables: input range must contain 0");
  }
  const std::size_t m = weights.size();
  DeviationTable t;
  t.min.assign(m + 1, 0);
  t.max.assign(m + 1, 0);
  for (std::size_t k = m; k-- > 0;) {
    const std::int64_t w = weights[redirection[k]];
    const std::int64_t low = w >= 0 ? range.lo * w : range.hi * w;
    const std::int64_t high = w >= 0 ? range.hi * w : range.lo * w;
    t.min[k] = t.min[k + 1] + low;
    t.max[k] = t.max[k + 1] + high;
  }
  return t;
}

std::optional<Trigger> earliest_trigger(std::span<const std::int8_t> weights,
                                        std::span<const int> redirection,
                                        const DeviationTable& dev,
                                        std::span<const std::int8_t> patch_row,
                                        std::int32_t bias, std::int32_t zx,
                                        const AccBounds& bounds) {
  check_lengths(weights.size(), redirection.size(), patch_row.size(),
                "earliest_trigger");
  const int m = static_cast<int>(weights.size());
  if (dev.m() != m) throw InvalidArgument("earliest_trigger: table length mismatch");
  std::int64_t acc = bias;
  for (int j = 1; j < m; ++j) {
    const int idx = redirection[j - 1];
    acc += (std::int64_t{patch_row[idx]} - zx) * weights[idx];
    if (acc + dev.max[j] <= bounds.lo) return Trigger{j, Side::kLow};
    if (acc + dev.min[j] >= bounds.hi) return Trigger{j, Side::kHigh};
  }
  return std::nullopt;
}

int effectless_suffix(std::span<const std::int8_t> weights,
                      std::span<const std::int8_t> patch_row, std::int32_t bias,
                      std::int32_t zx, const RequantParams& requant) {
  if (weights.size() != patch_row.size()) {
    throw InvalidArgument("effectless_suffix: length mismatch");
  }
  const std::size_t m = weights.size();
  std::vector<std::int32_t> prefix(m + 1);
  std::int64_t acc = bias;
  prefix[0] = bias;
  for (std::size_t i = 0; i < m; ++i) {
    acc += (std::int64_t{patch_row[i]} - zx) * weights[i];
    prefix[i + 1] = static_cast<std::int32_t>(acc);
  }
  const std::int8_t final_out = requantize(prefix[m], requant);
  int k = 0;
  for (std::size_t t = m; t-- > 0;) {
    if (requantize(prefix[t], requant) != final_out) break;
    ++k;
  }
  return k;
}

}  // namespace satconv
