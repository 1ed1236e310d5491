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
#include "satconv/tensor.hpp"

namespace satconv {

// Names accepted by gen_synthetic, in documentation order.
std::span<const std::string_view> preset_names();

// Deterministic synthetic model. Parameters are drawn from one SplitMix64
// stream seeded with `seed`: for every accumulating layer in order, all
// weights channel-major (top byte of each output), then one bias per channel
// (top 16 bits of each output, arithmetic-shifted right by the preset's
// per-layer bias shift). Throws InvalidArgument for unknown presets.
Model gen_synthetic(std::string_view preset, std::uint64_t seed);

// Input tensor with every element the top byte of a SplitMix64 output.
QuantTensor random_input(const Shape& shape, const QuantParams& quant,
                         std::uint64_t seed);

// `count` inputs for `model`, input k seeded with seed + k.
std::vector<QuantTensor> random_inputs(const Model& model, std::size_t count,
                                       std::uint64_t seed);

}  // namespace satconv
