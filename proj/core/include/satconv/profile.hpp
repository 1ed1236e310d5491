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
#include <string_view>
#include <vector>

#include "satconv/model.hpp"
#include "satconv/saturation.hpp"
#include "satconv/tensor.hpp"

namespace satconv {

// How the planner bounds (x - zx) for inputs not yet accumulated.
enum class XRangePolicy {
  // Full int8 range: [-128 - zx, 127 - zx].
  kDtype,
  // Union of the producing layer's clamp ranges (through max-pooling), or the
  // dtype range for the model input.
  kProducerClamp,
};

std::string_view to_string(XRangePolicy policy);
XRangePolicy parse_x_range_policy(std::string_view name);

InputRange layer_input_range(const Model& model, std::size_t layer_index,
                             XRangePolicy policy);

// Trigger-step histogram of one output channel. hits[j - 1] counts neuron
// evaluations whose earliest trigger is step j.
inline constexpr int kProfileFormatVersion = 1;

struct ChannelProfile {
  std::vector<std::uint64_t> hits;
  std::uint64_t sample_count = 0;

  // P[j] for j in [1, m - 1], stored at index j - 1.
  std::vector<double> cdf() const;

  friend bool operator==(const ChannelProfile&, const ChannelProfile&) = default;
};

struct LayerProfile {
  std::size_t layer_index = 0;
  int m = 0;
  std::uint64_t inputs = 0;
  InputRange x_range;
  // Triggers used the running reduce-max bound of a fused consumer.
  bool dynamic = false;
  std::vector<ChannelProfile> channels;

  friend bool operator==(const LayerProfile&, const LayerProfile&) = default;
};

struct ModelProfile {
  std::string model_name;
  XRangePolicy policy = XRangePolicy::kDtype;
  std::vector<LayerProfile> layers;

  const LayerProfile* find(std::size_t layer_index) const;

  friend bool operator==(const ModelProfile&, const ModelProfile&) = default;
};

// Trigger histogram of one accumulating layer over `samples` (model inputs).
// Positions are visited row-major; when a reduce_max consumes the layer the
// low bound at each position is max(A_lo, best accumulator so far).
LayerProfile profile_layer(const Model& model, std::size_t layer_index,
                           std::span<const QuantTensor> samples,
                           XRangePolicy policy = XRangePolicy::kDtype);

// Profiles every accumulating layer with one baseline pass per sample.
ModelProfile profile_model(const Model& model, std::span<const QuantTensor> samples,
                           XRangePolicy policy = XRangePolicy::kDtype);

// Adds histograms of `other` into `into`; layouts must match.
void merge(LayerProfile& into, const LayerProfile& other);

std::string profile_to_json(const ModelProfile& profile);
ModelProfile profile_from_json(std::string_view text);

}  // namespace satconv
