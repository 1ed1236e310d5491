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
#include <span>
#include <string>
#include <vector>

#include "satconv/model.hpp"
#include "satconv/profile.hpp"
#include "satconv/tensor.hpp"

namespace satconv {

// Retrospective saturation statistics over the accumulating layers.
struct LayerStats {
  std::size_t layer_index = 0;
  LayerKind kind = LayerKind::kConv2d;
  std::uint64_t neurons = 0;
  std::uint64_t macs = 0;
  std::uint64_t saturated = 0;  // neurons whose output equals q_lo or q_hi
  std::uint64_t effectless = 0;
  std::uint64_t omittable_ordered = 0;    // |w|-descending order
  std::uint64_t omittable_unordered = 0;  // original order

  LayerStats& operator+=(const LayerStats& o);
};

struct AnalysisReport {
  std::vector<LayerStats> layers;
  LayerStats total;
  std::uint64_t inputs = 0;

  static double pct(std::uint64_t part, std::uint64_t whole) {
    return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
  }
};

// For every neuron: its effectless suffix (hindsight, original order) and
// m - earliest trigger with checks at every step, with and without
// reordering.
AnalysisReport analyze_stats(const Model& model, std::span<const QuantTensor> inputs,
                             XRangePolicy policy = XRangePolicy::kDtype);

// CSV: layer,kind,neurons,macs,saturated_pct,effectless_pct,
// omittable_ordered_pct,omittable_unordered_pct plus a totals row.
std::string analysis_csv(const AnalysisReport& report);

}  // namespace satconv
