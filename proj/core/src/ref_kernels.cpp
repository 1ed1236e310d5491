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

#include "satconv/ref_kernels.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "satconv/error.hpp"
#include "satconv/quant.hpp"

namespace satconv::ref {

PatchMatrix im2col(const QuantTensor& input, const Geometry& geometry, int n) {
  const Shape& s = input.shape();
  if (n < 0 || n >= s.n) throw ValidationError("im2col: batch index out of range");
  const Window win = resolve_window(geometry, s.h, s.w);
  const auto zp = static_cast<std::int8_t>(input.quant().zero_point);

  PatchMatrix p;
  p.out_h = win.out_h;
  p.out_w = win.out_w;
  p.rows = win.out_h * win.out_w;
  p.m = geometry.kernel_h * geometry.kernel_w * s.c;
  p.values.assign(static_cast<std::size_t>(p.rows) * p.m, zp);
  auto dst = p.values.begin();
  for (int y = 0; y < win.out_h; ++y) {
    for (int x = 0; x < win.out_w; ++x) {
      for (int dy = 0; dy < geometry.kernel_h; ++dy) {
        const int iy = y * geometry.stride + dy - win.pad_top;
        for (int dx = 0; dx < geometry.kernel_w; ++dx) {
          const int ix = x * geometry.stride + dx - win.pad_left;
          if (iy >= 0 && iy < s.h && ix >= 0 && ix < s.w) {
            const auto src = input.data().subspan(input.offset(n, iy, ix, 0), s.c);
            std::copy(src.begin(), src.end(), dst);
          }
          dst += s.c;
        }
      }
    }
  }
  return p;
}

void gather_channel(std::span<const std::int8_t> row, int cin, int c,
                    std::vector<std::int8_t>& out) {
  out.clear();
  for (std::size_t i = static_cast<std::size_t>(c); i < row.size(); i += cin) {
    out.push_back(row[i]);
  }
}

LayerPatches::LayerPatches(const QuantTensor& input, const LayerSpec& layer, int n)
    : kind_(layer.kind), cin_(input.shape().c), m_(layer.weights_per_channel()) {
  if (!is_accumulating(layer.kind)) {
    throw InvalidArgument("LayerPatches: layer is not conv/dwconv/fc");
  }
  check_layer_input(input, layer);
  if (kind_ == LayerKind::kFullyConnected) {
    const auto row = input.data().subspan(static_cast<std::size_t>(n) * m_, m_);
    patches_.rows = 1;
    patches_.m = m_;
    patches_.out_h = 1;
    patches_.out_w = 1;
    patches_.values.assign(row.begin(), row.end());
  } else {
    patches_ = im2col(input, layer.geometry, n);
  }
  positions_ = patches_.rows;
  out_w_ = patches_.out_w;
}

std::span<const std::int8_t> LayerPatches::patch(int pos, int c,
                                                 std::vector<std::int8_t>& scratch) const {
  if (kind_ == LayerKind::kDepthwiseConv2d) {
    gather_channel(patches_.row(pos), cin_, c, scratch);
    return scratch;
  }
  return patches_.row(pos);
}

std::int32_t dot_ref(std::span<const std::int8_t> patch_row,
                     std::span<const std::int8_t> weights, std::int32_t bias,
                     std::int32_t zx) {
  if (patch_row.size() != weights.size()) {
    throw InvalidArgument("dot_ref: patch length " +
                          std::to_string(patch_row.size()) +
                          " != weight length " + std::to_string(weights.size()));
  }
  std::int64_t acc = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += (std::int64_t{patch_row[i]} - zx) * weights[i];
  }
  if (acc < std::numeric_limits<std::int32_t>::min() ||
      acc > std::numeric_limits<std::int32_t>::max()) {
    throw InvariantViolation("dot_ref: accumulator overflows int32");
  }
  return static_cast<std::int32_t>(acc);
}

void check_layer_input(const QuantTensor& input, const LayerSpec& layer) {
  if (input.shape() != layer.input_shape) {
    throw ValidationError("layer input shape " + input.shape().str() +
                          " does not match expected " + layer.input_shape.str());
  }
}

QuantTensor conv2d_ref(const QuantTensor& input, const LayerSpec& layer) {
  if (!is_accumulating(layer.kind)) {
    throw InvalidArgument("conv2d_ref: layer is not conv/dwconv/fc");
  }
  check_layer_input(input, layer);
  QuantTensor out(layer.output_shape, layer.output_quant);
  const std::int32_t zx = input.quant().zero_point;
  const Shape& in = input.shape();

  if (layer.kind == LayerKind::kFullyConnected) {
    const std::size_t m = static_cast<std::size_t>(layer.weights_per_channel());
    for (int n = 0; n < in.n; ++n) {
      const auto row = input.data().subspan(n * m, m);
      for (int c = 0; c < layer.output_channels(); ++c) {
        out.at(n, 0, 0, c) = requantize(
            dot_ref(row, layer.channel_weights(c), layer.bias[c], zx),
            layer.requant[c]);
      }
    }
    return out;
  }

  std::vector<std::int8_t> channel_patch;
  for (int n = 0; n < in.n; ++n) {
    const PatchMatrix patches = im2col(input, layer.geometry, n);
    for (int r = 0; r < patches.rows; ++r) {
      const int y = r / patches.out_w;
      const int x = r % patches.out_w;
      for (int c = 0; c < layer.output_channels(); ++c) {
        std::span<const std::int8_t> row = patches.row(r);
        if (layer.kind == LayerKind::kDepthwiseConv2d) {
          gather_channel(row, in.c, c, channel_patch);
          row = channel_patch;
        }
        out.at(n, y, x, c) = requantize(
            dot_ref(row, layer.channel_weights(c), layer.bias[c], zx),
            layer.requant[c]);
      }
    }
  }
  return out;
}

QuantTensor maxpool_ref(const QuantTensor& input, const Geometry& geometry) {
  const Shape& s = input.shape();
  const Window win = resolve_window(geometry, s.h, s.w);
  QuantTensor out({s.n, win.out_h, win.out_w, s.c}, input.quant());
  for (int n = 0; n < s.n; ++n) {
    for (int y = 0; y < win.out_h; ++y) {
      for (int x = 0; x < win.out_w; ++x) {
        for (int c = 0; c < s.c; ++c) {
          int best = std::numeric_limits<int>::min();
          for (int dy = 0; dy < geometry.kernel_h; ++dy) {
            const int iy = y * geometry.stride + dy - win.pad_top;
            if (iy < 0 || iy >= s.h) continue;
            for (int dx = 0; dx < geometry.kernel_w; ++dx) {
              const int ix = x * geometry.stride + dx - win.pad_left;
              if (ix < 0 || ix >= s.w) continue;
              best = std::max<int>(best, input.at(n, iy, ix, c));
            }
          }
          out.at(n, y, x, c) = static_cast<std::int8_t>(best);
        }
      }
    }
  }
  return out;
}

QuantTensor reduce_max_ref(const QuantTensor& input) {
  const Shape& s = input.shape();
  QuantTensor out({s.n, 1, 1, s.c}, input.quant());
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      int best = std::numeric_limits<int>::min();
      for (int y = 0; y < s.h; ++y) {
        for (int x = 0; x < s.w; ++x) best = std::max<int>(best, input.at(n, y, x, c));
      }
      out.at(n, 0, 0, c) = static_cast<std::int8_t>(best);
    }
  }
  return out;
}

QuantTensor run_layer_ref(const QuantTensor& input, const LayerSpec& layer) {
  switch (layer.kind) {
    case LayerKind::kConv2d:
    case LayerKind::kDepthwiseConv2d:
    case LayerKind::kFullyConnected:
      return conv2d_ref(input, layer);
    case LayerKind::kMaxPool:
      check_layer_input(input, layer);
      return maxpool_ref(input, layer.geometry);
    case LayerKind::kReduceMax:
      check_layer_input(input, layer);
      return reduce_max_ref(input);
  }
  throw InvalidArgument("run_layer_ref: unknown layer kind");
}

std::vector<QuantTensor> run_model_ref(const Model& model, const QuantTensor& input) {
  std::vector<QuantTensor> outputs;
  outputs.reserve(model.layers.size());
  const QuantTensor* current = &input;
  for (const LayerSpec& layer : model.layers) {
    outputs.push_back(run_layer_ref(*current, layer));
    current = &outputs.back();
  }
  return outputs;
}

std::size_t argmax(std::span<const std::int8_t> values) {
  if (values.empty()) throw InvalidArgument("argmax: empty input");
  return static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace satconv::ref
