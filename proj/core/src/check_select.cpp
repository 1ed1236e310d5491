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

#include "satconv/check_select.hpp"

#include <algorithm>
#include <string>

#include "satconv/error.hpp"

namespace satconv {

namespace {

constexpr double kTieEpsilon = 1e-9;

void check_cdf(std::span<const double> cdf, int m) {
  if (m < 1 || cdf.size() != static_cast<std::size_t>(m - 1)) {
    throw InvalidArgument("select_checks: cdf must hold m - 1 = " +
                          std::to_string(m - 1) + " entries");
  }
}

}  // namespace

double expected_gain(std::span<const double> cdf, int m,
                     std::span<const int> positions, double check_cost) {
  check_cdf(cdf, m);
  double gain = 0.0;
  double prev = 0.0;
  for (int j : positions) {
    if (j < 1 || j >= m) throw InvalidArgument("expected_gain: position out of range");
    const double p = cdf[j - 1];
    gain += (m - j) * (p - prev) - check_cost * (1.0 - prev);
    prev = p;
  }
  return gain;
}

CheckSelection select_checks(std::span<const double> cdf, int m, int max_checks,
                             double check_cost) {
  check_cdf(cdf, m);
  if (max_checks < 0) throw InvalidArgument("select_checks: max_checks must be >= 0");
  if (check_cost < 0.0) throw InvalidArgument("select_checks: check_cost must be >= 0");
  const int k = std::min(max_checks, m - 1);
  if (k == 0) return {};

  // best[t][j]: best gain from checks strictly after position j (j = 0 means
  // no check yet) with at most t more checks. The gain of adding check j
  // after prev depends only on (prev, j), so the optimum decomposes.
  const auto P = [&](int j) { return j == 0 ? 0.0 : cdf[j - 1]; };
  const auto step = [&](int prev, int j) {
    return (m - j) * (P(j) - P(prev)) - check_cost * (1.0 - P(prev));
  };
  std::vector<std::vector<double>> best(k + 1, std::vector<double>(m, 0.0));
  std::vector<std::vector<int>> next(k + 1, std::vector<int>(m, 0));
  for (int t = 1; t <= k; ++t) {
    for (int prev = 0; prev < m; ++prev) {
      double top = 0.0;  // stopping here
      for (int j = prev + 1; j < m; ++j) top = std::max(top, step(prev, j) + best[t - 1][j]);
      // Stopping is the lexicographically smallest continuation, then
      // ascending j.
      int choice = 0;
      if (top > kTieEpsilon) {
        for (int j = prev + 1; j < m; ++j) {
          if (step(prev, j) + best[t - 1][j] >= top - kTieEpsilon) {
            choice = j;
            break;
          }
        }
      }
      best[t][prev] = choice == 0 ? 0.0 : step(prev, choice) + best[t - 1][choice];
      next[t][prev] = choice;
    }
    // A budget that no longer changes any decision never will again.
    if (t > 1 && best[t] == best[t - 1] && next[t] == next[t - 1]) {
      best.resize(t + 1);
      next.resize(t + 1);
      break;
    }
  }

  CheckSelection sel;
  const int last = static_cast<int>(next.size()) - 1;
  for (int t = k, prev = 0; t > 0; --t) {
    const int j = next[std::min(t, last)][prev];
    if (j == 0) break;
    sel.positions.push_back(j);
    prev = j;
  }
  sel.expected_gain = expected_gain(cdf, m, sel.positions, check_cost);
  return sel;
}

}  // namespace satconv
