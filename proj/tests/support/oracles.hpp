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

// Independent re-derivations used as test oracles. Nothing here calls the
// library code it is compared against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <vector>

#include "satconv/model.hpp"
#include "satconv/quant.hpp"
#include "satconv/splitmix64.hpp"
#include "satconv/tensor.hpp"

namespace satconv::oracle {

__extension__ using i128 = __int128;

inline i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// floor(acc * M / 2^(31+s) + 1/2) + zo, clamped, with exact rationals.
inline int requantize(std::int64_t acc, const RequantParams& p) {
  const i128 den = i128{1} << (31 + p.shift);
  const i128 v = floor_div(2 * i128{acc} * p.multiplier + den, 2 * den) + p.zero_point;
  return static_cast<int>(std::clamp<i128>(v, p.q_lo, p.q_hi));
}

// Direct NHWC convolution, padding derived from scratch.
inline QuantTensor conv(const QuantTensor& in, const LayerSpec& l) {
  const Shape& is = in.shape();
  const Shape& os = l.output_shape;
  QuantTensor out(os, l.output_quant);
  const int zx = in.quant().zero_point;
  if (l.kind == LayerKind::kFullyConnected) {
    const int m = is.h * is.w * is.c;
    for (int n = 0; n < is.n; ++n) {
      for (int o = 0; o < os.c; ++o) {
        std::int64_t acc = l.bias[o];
        for (int i = 0; i < m; ++i) {
          const int v = in.data()[static_cast<std::size_t>(n) * m + i];
          acc += static_cast<std::int64_t>(v - zx) * l.weights[static_cast<std::size_t>(o) * m + i];
        }
        out.at(n, 0, 0, o) = static_cast<std::int8_t>(requantize(acc, l.requant[o]));
      }
    }
    return out;
  }
  const int kh = l.geometry.kernel_h;
  const int kw = l.geometry.kernel_w;
  const int st = l.geometry.stride;
  int pad_t = 0;
  int pad_l = 0;
  if (l.geometry.padding == Padding::kSame) {
    pad_t = std::max(0, ((is.h + st - 1) / st - 1) * st + kh - is.h) / 2;
    pad_l = std::max(0, ((is.w + st - 1) / st - 1) * st + kw - is.w) / 2;
  }
  const bool dw = l.kind == LayerKind::kDepthwiseConv2d;
  for (int n = 0; n < is.n; ++n) {
    for (int oy = 0; oy < os.h; ++oy) {
      for (int ox = 0; ox < os.w; ++ox) {
        for (int o = 0; o < os.c; ++o) {
          std::int64_t acc = l.bias[o];
          int widx = 0;
          for (int dy = 0; dy < kh; ++dy) {
            for (int dx = 0; dx < kw; ++dx) {
              const int iy = oy * st + dy - pad_t;
              const int ix = ox * st + dx - pad_l;
              const bool inside = iy >= 0 && iy < is.h && ix >= 0 && ix < is.w;
              const int c0 = dw ? o : 0;
              const int c1 = dw ? o + 1 : is.c;
              for (int ci = c0; ci < c1; ++ci) {
                const int w = dw ? l.weights[static_cast<std::size_t>(o) * kh * kw + dy * kw + dx]
                                 : l.weights[((static_cast<std::size_t>(o) * kh + dy) * kw + dx) *
                                                 is.c + ci];
                const int v = inside ? in.at(n, iy, ix, ci) : zx;
                acc += static_cast<std::int64_t>(v - zx) * w;
                ++widx;
              }
            }
          }
          out.at(n, oy, ox, o) = static_cast<std::int8_t>(requantize(acc, l.requant[o]));
        }
      }
    }
  }
  return out;
}

// Truncated original-order sum after `t` MACs.
inline std::int64_t partial(std::span<const std::int8_t> w, std::span<const std::int8_t> x,
                            std::int32_t bias, std::int32_t zx, int t) {
  std::int64_t acc = bias;
  for (int i = 0; i < t; ++i) acc += static_cast<std::int64_t>(x[i] - zx) * w[i];
  return acc;
}

// Largest k with every truncation to t >= m - k MACs giving the final output,
// each truncation re-executed from scratch.
inline int effectless(std::span<const std::int8_t> w, std::span<const std::int8_t> x,
                      std::int32_t bias, std::int32_t zx, const RequantParams& p) {
  const int m = static_cast<int>(w.size());
  const int final_q = requantize(partial(w, x, bias, zx, m), p);
  int k = 0;
  for (int cand = 1; cand <= m; ++cand) {
    bool ok = true;
    for (int t = m - cand; t <= m && ok; ++t) {
      ok = requantize(partial(w, x, bias, zx, t), p) == final_q;
    }
    if (ok) k = cand;
  }
  return k;
}

// Expected saving of checks at `pos` by walking every trigger outcome.
inline double expected_gain(std::span<const double> cdf, int m, std::span<const int> pos,
                            double cost) {
  double total = 0.0;
  double prev = 0.0;
  for (int t = 1; t <= m; ++t) {
    const double p = t < m ? cdf[t - 1] - prev : 1.0 - prev;
    if (t < m) prev = cdf[t - 1];
    if (p == 0.0) continue;
    double gain = 0.0;
    for (const int j : pos) {
      gain -= cost;
      if (t <= j) {
        gain += m - j;
        break;
      }
    }
    total += p * gain;
  }
  return total;
}

struct Best {
  std::vector<int> positions;
  double gain = 0.0;
};

// Every ascending tuple of size <= k, lexicographic order, keeping the first
// strictly better (by more than eps) tuple.
inline Best exhaustive_checks(std::span<const double> cdf, int m, int k, double cost) {
  Best best;
  std::vector<int> cur;
  const auto rec = [&](auto&& self, int from) -> void {
    const double g = expected_gain(cdf, m, cur, cost);
    if (g > best.gain + 1e-9) best = {cur, g};
    if (static_cast<int>(cur.size()) == k) return;
    for (int j = from; j <= m - 1; ++j) {
      cur.push_back(j);
      self(self, j + 1);
      cur.pop_back();
    }
  };
  rec(rec, 1);
  return best;
}

inline std::int8_t rand_i8(SplitMix64& rng) { return rng.next_int8(); }

inline std::vector<std::int8_t> rand_vec(SplitMix64& rng, std::size_t n) {
  std::vector<std::int8_t> v(n);
  for (auto& e : v) e = rng.next_int8();
  return v;
}

inline RequantParams rand_requant(SplitMix64& rng, double min_log2 = -12.0) {
  RequantParams p;
  const double ratio = std::exp2(min_log2 + rng.next_unit() * (1.0 - min_log2));
  int e = 0;
  const double f = std::frexp(ratio, &e);
  std::int64_t mult = static_cast<std::int64_t>(std::llround(f * 2147483648.0));
  if (mult == (std::int64_t{1} << 31)) {
    mult >>= 1;
    ++e;
  }
  p.multiplier = static_cast<std::int32_t>(mult);
  p.shift = -e;
  p.zero_point = static_cast<std::int32_t>(rng.next_below(256)) - 128;
  const int a = static_cast<int>(rng.next_below(256)) - 128;
  int b = static_cast<int>(rng.next_below(256)) - 128;
  if (a == b) b = a == 127 ? -128 : 127;
  p.q_lo = std::min(a, b);
  p.q_hi = std::max(a, b);
  return p;
}

}  // namespace satconv::oracle
