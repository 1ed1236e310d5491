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

#include "satconv/model.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "satconv/error.hpp"

namespace satconv {

namespace {

std::string layer_ctx(std::size_t i) {
  return "layers[" + std::to_string(i) + "]";
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2d:
      return "conv2d";
    case LayerKind::kDepthwiseConv2d:
      return "dwconv2d";
    case LayerKind::kFullyConnected:
      return "fully_connected";
    case LayerKind::kMaxPool:
      return "maxpool";
    case LayerKind::kReduceMax:
      return "reduce_max";
  }
  return "?";
}

LayerKind parse_layer_kind(std::string_view name) {
  for (LayerKind k : {LayerKind::kConv2d, LayerKind::kDepthwiseConv2d,
                      LayerKind::kFullyConnected, LayerKind::kMaxPool,
                      LayerKind::kReduceMax}) {
    if (to_string(k) == name) return k;
  }
  throw FormatError("unknown layer kind '" + std::string(name) + "'");
}

Window resolve_window(const Geometry& g, int in_h, int in_w) {
  if (g.kernel_h < 1 || g.kernel_w < 1) {
    throw ValidationError("kernel: dimensions must be >= 1");
  }
  if (g.stride < 1) throw ValidationError("stride: must be >= 1");
  Window win;
  if (g.padding == Padding::kValid) {
    if (in_h < g.kernel_h || in_w < g.kernel_w) {
      throw ValidationError("kernel: larger than VALID input");
    }
    win.out_h = (in_h - g.kernel_h) / g.stride + 1;
    win.out_w = (in_w - g.kernel_w) / g.stride + 1;
    return win;
  }
  win.out_h = (in_h + g.stride - 1) / g.stride;
  win.out_w = (in_w + g.stride - 1) / g.stride;
  const int pad_h = std::max((win.out_h - 1) * g.stride + g.kernel_h - in_h, 0);
  const int pad_w = std::max((win.out_w - 1) * g.stride + g.kernel_w - in_w, 0);
  win.pad_top = pad_h / 2;
  win.pad_left = pad_w / 2;
  return win;
}

int LayerSpec::weights_per_channel() const {
  switch (kind) {
    case LayerKind::kConv2d:
      return geometry.kernel_h * geometry.kernel_w * input_shape.c;
    case LayerKind::kDepthwiseConv2d:
      return geometry.kernel_h * geometry.kernel_w;
    case LayerKind::kFullyConnected:
      return input_shape.h * input_shape.w * input_shape.c;
    default:
      return 0;
  }
}

std::span<const std::int8_t> LayerSpec::channel_weights(int c) const {
  const auto m = static_cast<std::size_t>(weights_per_channel());
  return std::span<const std::int8_t>(weights).subspan(c * m, m);
}

Shape infer_output_shape(LayerKind kind, const Geometry& g, const Shape& in,
                         int out_channels) {
  switch (kind) {
    case LayerKind::kConv2d: {
      const Window w = resolve_window(g, in.h, in.w);
      return {in.n, w.out_h, w.out_w, out_channels};
    }
    case LayerKind::kDepthwiseConv2d:
    case LayerKind::kMaxPool: {
      const Window w = resolve_window(g, in.h, in.w);
      return {in.n, w.out_h, w.out_w, in.c};
    }
    case LayerKind::kFullyConnected:
      return {in.n, 1, 1, out_channels};
    case LayerKind::kReduceMax:
      return {in.n, 1, 1, in.c};
  }
  return in;
}

std::optional<std::size_t> Model::reduce_max_consumer(std::size_t i) const {
  if (i + 1 < layers.size() && layers[i + 1].kind == LayerKind::kReduceMax) {
    return i + 1;
  }
  return std::nullopt;
}

void validate(const Model& model) {
  validate(model.input_shape, "input");
  validate(model.input_quant, "input");
  if (model.layers.empty()) throw ValidationError("layers: model has no layers");

  Shape shape = model.input_shape;
  QuantParams quant = model.input_quant;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& l = model.layers[i];
    const std::string ctx = layer_ctx(i);
    if (l.input_shape != shape) {
      throw ValidationError(ctx + ".input.shape: " + l.input_shape.str() +
                            " does not match producer " + shape.str());
    }
    if (l.input_quant != quant) {
      throw ValidationError(ctx + ".input: quantization differs from producer");
    }
    validate(l.output_shape, ctx + ".output");
    validate(l.output_quant, ctx + ".output");

    Shape expected;
    try {
      expected = infer_output_shape(l.kind, l.geometry, l.input_shape,
                                    l.output_shape.c);
    } catch (const ValidationError& e) {
      throw ValidationError(ctx + ".geometry." + e.what());
    }
    if (expected != l.output_shape) {
      throw ValidationError(ctx + ".output.shape: " + l.output_shape.str() +
                            " inconsistent with geometry (expected " +
                            expected.str() + ")");
    }

    if (is_accumulating(l.kind)) {
      const auto m = static_cast<std::size_t>(l.weights_per_channel());
      const auto cout = static_cast<std::size_t>(l.output_channels());
      if (l.kind == LayerKind::kDepthwiseConv2d &&
          l.output_shape.c != l.input_shape.c) {
        throw ValidationError(ctx + ".output.shape: depthwise channel count");
      }
      if (l.weights.size() != m * cout) {
        throw ValidationError(ctx + ".weights: length " +
                              std::to_string(l.weights.size()) + " != " +
                              std::to_string(m * cout));
      }
      if (l.bias.size() != cout) {
        throw ValidationError(ctx + ".bias: length " +
                              std::to_string(l.bias.size()) + " != " +
                              std::to_string(cout));
      }
      if (l.requant.size() != cout) {
        throw ValidationError(ctx + ".requant: length " +
                              std::to_string(l.requant.size()) + " != " +
                              std::to_string(cout));
      }
      // Bound on |sum (x - zx) * w| keeps every partial sum inside int32.
      const std::int64_t max_dot = static_cast<std::int64_t>(m) * 255 * 128;
      for (std::size_t c = 0; c < cout; ++c) {
        try {
          validate(l.requant[c]);
        } catch (const ValidationError& e) {
          throw ValidationError(ctx + "." + e.what() + " (channel " +
                                std::to_string(c) + ")");
        }
        if (l.requant[c].zero_point != l.output_quant.zero_point) {
          throw ValidationError(ctx + ".requant.zo: channel " +
                                std::to_string(c) +
                                " differs from output zero_point");
        }
        const std::int64_t b = l.bias[c];
        if ((b < 0 ? -b : b) + max_dot > std::numeric_limits<std::int32_t>::max()) {
          throw ValidationError(ctx + ".bias: channel " + std::to_string(c) +
                                " may overflow the int32 accumulator");
        }
      }
    } else {
      if (!l.weights.empty() || !l.bias.empty() || !l.requant.empty()) {
        throw ValidationError(ctx + ".weights: " +
                              std::string(to_string(l.kind)) +
                              " takes no parameters");
      }
      if (l.output_quant != l.input_quant) {
        throw ValidationError(ctx + ".output: " +
                              std::string(to_string(l.kind)) +
                              " must preserve quantization");
      }
    }
    shape = l.output_shape;
    quant = l.output_quant;
  }
}

std::size_t parameter_bytes(const Model& model) {
  std::size_t bytes = 0;
  for (const LayerSpec& l : model.layers) {
    if (!is_accumulating(l.kind)) continue;
    bytes += l.weights.size() + 4 * l.bias.size() + 8 * l.requant.size();
  }
  return bytes;
}

std::uint64_t count_macs(const Model& model) {
  std::uint64_t macs = 0;
  for (const LayerSpec& l : model.layers) {
    if (!is_accumulating(l.kind)) continue;
    macs += static_cast<std::uint64_t>(l.output_shape.elements()) *
            l.weights_per_channel();
  }
  return macs;
}

}  // namespace satconv
