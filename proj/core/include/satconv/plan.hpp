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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satconv/model.hpp"
#include "satconv/profile.hpp"
#include "satconv/saturation.hpp"

namespace satconv {

// A saturation check after `pos` reordered MACs with the deviation interval
// of the MACs still to run.
struct CheckPoint {
  int pos = 0;
  std::int64_t d_min = 0;
  std::int64_t d_max = 0;

  friend bool operator==(const CheckPoint&, const CheckPoint&) = default;
};

struct ChannelPlan {
  std::vector<int> redirection;
  std::vector<CheckPoint> checks;
  AccBounds bounds;

  friend bool operator==(const ChannelPlan&, const ChannelPlan&) = default;
};

struct LayerPlan {
  std::size_t layer_index = 0;
  bool fused_reduce_max = false;
  InputRange x_range;
  // nullopt: pass-through, the channel runs the conventional kernel.
  std::vector<std::optional<ChannelPlan>> channels;

  std::size_t instrumented() const;

  friend bool operator==(const LayerPlan&, const LayerPlan&) = default;
};

inline constexpr int kPlanFormatVersion = 1;

struct PlanConfig {
  // Negative means a check after every step.
  int max_checks = 2;
  double check_cost = 4.0;
  XRangePolicy policy = XRangePolicy::kDtype;
};

struct KernelPlan {
  std::string model_name;
  double check_cost = 4.0;
  int max_checks = 2;
  XRangePolicy policy = XRangePolicy::kDtype;
  std::vector<LayerPlan> layers;

  const LayerPlan* find(std::size_t layer_index) const;

  friend bool operator==(const KernelPlan&, const KernelPlan&) = default;
};

// Plans every accumulating layer from its profile. Throws ValidationError when
// a profile is missing or does not match the model and config.
KernelPlan build_plan(const Model& model, const ModelProfile& profile,
                      const PlanConfig& config = {});

// Plan for one channel with checks at the given positions.
ChannelPlan make_channel_plan(std::span<const std::int8_t> weights,
                              const RequantParams& requant, InputRange range,
                              std::span<const int> positions);

// Structural consistency with the model: layer kinds, channel counts,
// permutations, check positions. Throws ValidationError.
void validate(const KernelPlan& plan, const Model& model);

std::string plan_to_json(const KernelPlan& plan);
KernelPlan plan_from_json(std::string_view text);

// Storage an embedded target needs for the plan: per instrumented channel a
// redirection array (u8 indices when m <= 256, else u16), 10 bytes per check
// (u16 position, two int32 deviations) and 8 bytes of bounds.
std::size_t plan_bytes(const KernelPlan& plan);

struct PlanOverhead {
  std::size_t plan_bytes = 0;
  std::size_t model_bytes = 0;
  double ratio() const {
    return model_bytes == 0 ? 0.0
                            : static_cast<double>(plan_bytes) / static_cast<double>(model_bytes);
  }
};

PlanOverhead plan_overhead(const KernelPlan& plan, const Model& model);

}  // namespace satconv
