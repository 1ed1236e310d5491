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

#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "satconv/saturation.hpp"

using namespace satconv;

TEST_CASE("acc_boundaries against an exhaustive scan") {
  SplitMix64 rng(31);
  for (int i = 0; i < 200; ++i) {
    const RequantParams p = oracle::rand_requant(rng, -10.0);
    const AccBounds b = acc_boundaries(p);
    REQUIRE(b.has_lo());
    REQUIRE(b.has_hi());
    for (std::int64_t a = b.lo - 512; a <= b.hi + 512; ++a) {
      const int q = oracle::requantize(a, p);
      REQUIRE((q == p.q_lo) == (a <= b.lo));
      REQUIRE((q == p.q_hi) == (a >= b.hi));
    }
  }
}

TEST_CASE("acc_boundaries for unreachable sides") {
  RequantParams p;
  p.multiplier = 1 << 30;
  p.shift = 31;  // ratio 2^-32: everything rounds to zero
  p.zero_point = 0;
  const AccBounds b = acc_boundaries(p);
  CHECK(!b.has_lo());
  CHECK(!b.has_hi());

  // A single-value clamp: all of int32 maps to both q_lo and q_hi.
  p.zero_point = 10;
  p.q_lo = 5;
  p.q_hi = 5;
  const AccBounds flat = acc_boundaries(p);
  CHECK(flat.lo == std::numeric_limits<std::int32_t>::max());
  CHECK(flat.hi == std::numeric_limits<std::int32_t>::min());
}

TEST_CASE("build_redirection sorts by magnitude, stable") {
  const std::vector<std::int8_t> w = {3, -7, 7, 0, -128, 3};
  CHECK(build_redirection(w) == std::vector<int>{4, 1, 2, 0, 5, 3});
  CHECK(identity_order(3) == std::vector<int>{0, 1, 2});
}

TEST_CASE("deviation tables by hand") {
  const std::vector<std::int8_t> w = {2, -3};
  const std::vector<int> order = {1, 0};
  const DeviationTable d = deviation_tables(w, order, {-10, 5});
  REQUIRE(d.m() == 2);
  // Remaining after 0 steps: -3*x in [-15, 30], 2*x in [-20, 10].
  CHECK(d.min[0] == -35);
  CHECK(d.max[0] == 40);
  CHECK(d.min[1] == -20);
  CHECK(d.max[1] == 10);
  CHECK(d.min[2] == 0);
  CHECK(d.max[2] == 0);
}

TEST_CASE("deviation bounds are sound and attained") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_below(6));
    const auto w = oracle::rand_vec(rng, m);
    const int zx = static_cast<int>(rng.next_below(256)) - 128;
    const InputRange r = InputRange::for_zero_point(zx);
    const auto order = build_redirection(w);
    const DeviationTable d = deviation_tables(w, order, r);
    for (int k = 0; k <= m; ++k) {
      // Enumerate every corner of the remaining inputs; the extremes over
      // corners are the extremes over the box since the sum is linear.
      std::int64_t lo = std::numeric_limits<std::int64_t>::max();
      std::int64_t hi = std::numeric_limits<std::int64_t>::min();
      const int rest = m - k;
      for (int mask = 0; mask < (1 << rest); ++mask) {
        std::int64_t s = 0;
        for (int t = 0; t < rest; ++t) {
          const int x = (mask >> t) & 1 ? r.hi : r.lo;
          s += static_cast<std::int64_t>(w[order[k + t]]) * x;
        }
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      REQUIRE(d.min[k] == lo);
      REQUIRE(d.max[k] == hi);
    }
  }
}

TEST_CASE("earliest_trigger agrees with a direct interval scan") {
  SplitMix64 rng(43);
  int fired = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_below(20));
    const auto w = oracle::rand_vec(rng, m);
    const auto x = oracle::rand_vec(rng, m);
    const int zx = static_cast<int>(rng.next_below(256)) - 128;
    const auto bias = static_cast<std::int32_t>(rng.next_below(40001)) - 20000;
    const RequantParams p = oracle::rand_requant(rng, -12.0);
    const AccBounds b = acc_boundaries(p);
    const auto order = rng.next_below(2) ? build_redirection(w) : identity_order(m);
    const InputRange r = InputRange::for_zero_point(zx);
    const DeviationTable d = deviation_tables(w, order, r);
    const auto got = earliest_trigger(w, order, d, x, bias, zx, b);

    std::optional<Trigger> want;
    std::int64_t acc = bias;
    for (int j = 1; j <= m - 1 && !want; ++j) {
      acc += static_cast<std::int64_t>(x[order[j - 1]] - zx) * w[order[j - 1]];
      std::int64_t rest_lo = 0;
      std::int64_t rest_hi = 0;
      for (int t = j; t < m; ++t) {
        const std::int64_t a = static_cast<std::int64_t>(w[order[t]]) * r.lo;
        const std::int64_t c = static_cast<std::int64_t>(w[order[t]]) * r.hi;
        rest_lo += std::min(a, c);
        rest_hi += std::max(a, c);
      }
      if (acc + rest_hi <= b.lo) want = Trigger{j, Side::kLow};
      else if (acc + rest_lo >= b.hi) want = Trigger{j, Side::kHigh};
    }
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      ++fired;
      CHECK(got->step == want->step);
      CHECK(got->side == want->side);
      // A trigger guarantees the final value is saturated on that side.
      const int q = oracle::requantize(oracle::partial(w, x, bias, zx, m), p);
      CHECK(q == (got->side == Side::kLow ? p.q_lo : p.q_hi));
    }
  }
  CHECK(fired > 100);
}

TEST_CASE("effectless_suffix matches brute-force truncation") {
  SplitMix64 rng(47);
  for (int trial = 0; trial < 3000; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_below(16));
    const auto w = oracle::rand_vec(rng, m);
    const auto x = oracle::rand_vec(rng, m);
    const int zx = static_cast<int>(rng.next_below(256)) - 128;
    const auto bias = static_cast<std::int32_t>(rng.next_below(20001)) - 10000;
    const RequantParams p = oracle::rand_requant(rng, -10.0);
    REQUIRE(effectless_suffix(w, x, bias, zx, p) == oracle::effectless(w, x, bias, zx, p));
  }
}

TEST_CASE("final accumulator is invariant under reordering") {
  SplitMix64 rng(53);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_below(40));
    const auto w = oracle::rand_vec(rng, m);
    const auto x = oracle::rand_vec(rng, m);
    const int zx = static_cast<int>(rng.next_below(256)) - 128;
    const auto order = build_redirection(w);
    std::int64_t a = 0;
    std::int64_t b = 0;
    for (int i = 0; i < m; ++i) {
      a += static_cast<std::int64_t>(x[i] - zx) * w[i];
      b += static_cast<std::int64_t>(x[order[i]] - zx) * w[order[i]];
    }
    REQUIRE(a == b);
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(sorted == identity_order(m));
  }
}
