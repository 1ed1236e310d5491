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

#include "satconv/presets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "satconv/error.hpp"
#include "satconv/quant.hpp"
#include "satconv/splitmix64.hpp"

namespace satconv {

namespace {

constexpr std::array<std::string_view, 5> kPresetNames = {
    "tiny", "har-like", "gmp-like", "mnist-like", "sat-heavy"};

// Nominal real scale of int8 weights, only used for output-scale metadata.
constexpr double kWeightScale = 1.0 / 128.0;

struct Recipe {
  LayerKind kind;
  Geometry geometry;
  int out_channels = 0;  // conv2d / fully_connected
  bool relu = false;
  // Requantization ratio of channel c is gain / ||w_c||_2, capped at 2.
  double gain = 0.0;
  int bias_shift = 0;
};

struct Architecture {
  Shape input;
  QuantParams input_quant;
  std::vector<Recipe> layers;
};

Recipe conv(int k, int stride, Padding pad, int out, bool relu, double gain,
            int bias_shift) {
  return {LayerKind::kConv2d, {k, k, stride, pad}, out, relu, gain, bias_shift};
}

Recipe conv_hw(int kh, int kw, Padding pad, int out, bool relu, double gain,
               int bias_shift) {
  return {LayerKind::kConv2d, {kh, kw, 1, pad}, out, relu, gain, bias_shift};
}

Recipe dwconv(int k, int stride, bool relu, double gain, int bias_shift) {
  return {LayerKind::kDepthwiseConv2d, {k, k, stride, Padding::kSame}, 0, relu,
          gain, bias_shift};
}

Recipe fc(int out, bool relu, double gain, int bias_shift) {
  return {LayerKind::kFullyConnected, {}, out, relu, gain, bias_shift};
}

Recipe maxpool(int kh, int kw, int stride) {
  return {LayerKind::kMaxPool, {kh, kw, stride, Padding::kValid}, 0, false, 0, 0};
}

Recipe reduce_max() { return {LayerKind::kReduceMax, {}, 0, false, 0, 0}; }

Architecture architecture(std::string_view preset) {
  constexpr Padding kSame = Padding::kSame;
  constexpr Padding kValid = Padding::kValid;
  if (preset == "tiny") {
    return {{1, 8, 8, 1}, {1.0 / 128, 0},
            {conv(3, 1, kSame, 4, true, 0.5, 2), maxpool(2, 2, 2),
             fc(10, false, 0.35, 3)}};
  }
  if (preset == "har-like") {
    return {{1, 24, 3, 1}, {1.0 / 64, 0},
            {conv_hw(5, 3, kValid, 16, true, 0.5, 2), maxpool(2, 1, 2),
             fc(32, true, 0.5, 3), fc(6, false, 0.35, 3)}};
  }
  if (preset == "gmp-like") {
    return {{1, 24, 3, 1}, {1.0 / 64, 0},
            {conv(3, 1, kSame, 8, true, 0.5, 2),
             conv(3, 1, kValid, 6, false, 0.4, 2), reduce_max()}};
  }
  if (preset == "mnist-like") {
    return {{1, 28, 28, 1}, {1.0 / 255, -128},
            {conv(3, 2, kSame, 8, true, 0.5, 2), dwconv(3, 1, true, 0.5, 2),
             conv(1, 1, kValid, 16, true, 0.5, 2), maxpool(2, 2, 2),
             dwconv(3, 2, true, 0.5, 2), conv(1, 1, kValid, 32, true, 0.5, 2),
             fc(10, false, 0.35, 3)}};
  }
  if (preset == "sat-heavy") {
    return {{1, 12, 12, 2}, {1.0 / 128, 0},
            {conv(3, 1, kSame, 8, true, 2.0, 0),
             conv(3, 1, kValid, 8, true, 2.0, 0), maxpool(2, 2, 2),
             fc(10, false, 1.5, 0)}};
  }
  throw InvalidArgument("unknown preset '" + std::string(preset) + "'");
}

}  // namespace

std::span<const std::string_view> preset_names() { return kPresetNames; }

Model gen_synthetic(std::string_view preset, std::uint64_t seed) {
  const Architecture arch = architecture(preset);
  SplitMix64 rng(seed);

  Model model;
  model.name = std::string(preset) + "-s" + std::to_string(seed);
  model.preset = std::string(preset);
  model.seed = seed;
  model.input_shape = arch.input;
  model.input_quant = arch.input_quant;

  Shape shape = arch.input;
  QuantParams quant = arch.input_quant;
  for (const Recipe& r : arch.layers) {
    LayerSpec l;
    l.kind = r.kind;
    l.geometry = r.geometry;
    l.input_shape = shape;
    l.input_quant = quant;
    l.output_shape = infer_output_shape(r.kind, r.geometry, shape, r.out_channels);
    l.output_quant = quant;
    if (is_accumulating(r.kind)) {
      const int cout = l.output_shape.c;
      const int m = l.weights_per_channel();
      l.weights.resize(static_cast<std::size_t>(cout) * m);
      for (auto& w : l.weights) w = rng.next_int8();
      l.bias.resize(cout);
      for (auto& b : l.bias) b = rng.next_int16() >> r.bias_shift;

      // ReLU maps real zero to the lowest code; otherwise zero sits mid-range.
      const std::int32_t zo = r.relu ? -128 : 0;
      double mean_ratio = 0.0;
      for (int c = 0; c < cout; ++c) {
        std::int64_t sq = 0;
        for (std::int8_t w : l.channel_weights(c)) sq += std::int64_t{w} * w;
        const double norm = std::sqrt(static_cast<double>(std::max<std::int64_t>(sq, 1)));
        const double ratio = std::min(2.0, r.gain / norm);
        const Multiplier mult = derive_multiplier(ratio);
        l.requant.push_back({mult.multiplier, mult.shift, zo, -128, 127});
        mean_ratio += ratio / cout;
      }
      l.output_quant = {quant.scale * kWeightScale / mean_ratio, zo};
    }
    shape = l.output_shape;
    quant = l.output_quant;
    model.layers.push_back(std::move(l));
  }
  validate(model);
  return model;
}

QuantTensor random_input(const Shape& shape, const QuantParams& quant,
                         std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::int8_t> data(shape.elements());
  for (auto& v : data) v = rng.next_int8();
  return QuantTensor(shape, quant, std::move(data));
}

std::vector<QuantTensor> random_inputs(const Model& model, std::size_t count,
                                       std::uint64_t seed) {
  std::vector<QuantTensor> inputs;
  inputs.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    inputs.push_back(random_input(model.input_shape, model.input_quant, seed + k));
  }
  return inputs;
}

}  // namespace satconv
