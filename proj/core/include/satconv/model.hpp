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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satconv/quant.hpp"
#include "satconv/tensor.hpp"

namespace satconv {

enum class LayerKind { kConv2d, kDepthwiseConv2d, kFullyConnected, kMaxPool, kReduceMax };

std::string_view to_string(LayerKind kind);
// Throws FormatError for unknown names.
LayerKind parse_layer_kind(std::string_view name);

// Layers whose neurons are dot products and can be saturation-aware.
constexpr bool is_accumulating(LayerKind kind) {
  return kind == LayerKind::kConv2d || kind == LayerKind::kDepthwiseConv2d ||
         kind == LayerKind::kFullyConnected;
}

enum class Padding { kValid, kSame };

struct Geometry {
  int kernel_h = 1;
  int kernel_w = 1;
  int stride = 1;
  Padding padding = Padding::kValid;

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

// Resolved spatial mapping of a windowed layer on a concrete input.
struct Window {
  int out_h = 0;
  int out_w = 0;
  int pad_top = 0;
  int pad_left = 0;
};

// TF-style SAME/VALID resolution. Throws ValidationError when the kernel does
// not fit a VALID input or a field is out of range.
Window resolve_window(const Geometry& g, int in_h, int in_w);

struct LayerSpec {
  LayerKind kind = LayerKind::kConv2d;
  Geometry geometry;
  // Channel-major: all m weights of output channel 0, then channel 1, ...
  // Within a channel the order is (kh, kw, cin) row-major.
  std::vector<std::int8_t> weights;
  std::vector<std::int32_t> bias;
  std::vector<RequantParams> requant;
  Shape input_shape;
  QuantParams input_quant;
  Shape output_shape;
  QuantParams output_quant;

  // Weights per output channel (the dot-product length).
  int weights_per_channel() const;
  int output_channels() const { return output_shape.c; }
  std::span<const std::int8_t> channel_weights(int c) const;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Output shape implied by kind, geometry and input; `out_channels` is used by
// conv2d and fully_connected only.
Shape infer_output_shape(LayerKind kind, const Geometry& g, const Shape& in,
                         int out_channels);

struct Model {
  std::string name;
  std::string preset;
  std::uint64_t seed = 0;
  Shape input_shape;
  QuantParams input_quant;
  std::vector<LayerSpec> layers;

  const Shape& output_shape() const {
    return layers.empty() ? input_shape : layers.back().output_shape;
  }

  // Index of a reduce_max layer that directly consumes layer `i`, if any.
  std::optional<std::size_t> reduce_max_consumer(std::size_t i) const;

  friend bool operator==(const Model&, const Model&) = default;
};

// Checks every structural invariant; throws ValidationError with the layer
// index and field name.
void validate(const Model& model);

// Bytes taken by the parameters of accumulating layers: 1 per weight, 4 per
// bias, 8 per requantization record.
std::size_t parameter_bytes(const Model& model);

std::uint64_t count_macs(const Model& model);

}  // namespace satconv
