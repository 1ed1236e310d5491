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

#include <span>
#include <vector>

namespace satconv {

struct CheckSelection {
  std::vector<int> positions;  // ascending, each in [1, m - 1]
  double expected_gain = 0.0;  // MAC-equivalents saved per neuron
};

// Expected MACs saved by checks at `positions` (ascending):
//   sum_t (m - j_t) * (P[j_t] - P[j_{t-1}]) - sum_t cost * (1 - P[j_{t-1}])
// with P[j_0] = 0. `cdf[j - 1]` holds P[j] for j in [1, m - 1].
double expected_gain(std::span<const double> cdf, int m,
                     std::span<const int> positions, double check_cost);

// Gain-maximizing ascending tuple of at most `max_checks` positions. Ties
// (within 1e-9) resolve to the lexicographically smallest tuple, a prefix
// ordering before its extensions; the empty tuple is returned when nothing
// has positive gain.
CheckSelection select_checks(std::span<const double> cdf, int m, int max_checks,
                             double check_cost);

}  // namespace satconv
