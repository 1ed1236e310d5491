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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "satconv/model.hpp"
#include "satconv/tensor.hpp"

namespace satconv::ref {

// One im2col row per output position (y, x), each of length m with elements
// ordered (kh, kw, cin). Raw int8 inputs; out-of-bounds cells hold the input
// zero point.
struct PatchMatrix {
  int rows = 0;
  int m = 0;
  int out_h = 0;
  int out_w = 0;
  std::vector<std::int8_t> values;

  std::span<const std::int8_t> row(int r) const {
    return std::span<const std::int8_t>(values).subspan(
        static_cast<std::size_t>(r) * m, m);
  }
};

// Patches for batch item `n`. Throws ValidationError on bad geometry.
PatchMatrix im2col(const QuantTensor& input, const Geometry& geometry, int n = 0);

// Extracts channel c of a (kh, kw, cin) patch row: the depthwise patch.
void gather_channel(std::span<const std::int8_t> row, int cin, int c,
                    std::vector<std::int8_t>& out);

// Per-neuron input rows of an accumulating layer for one batch item: one row
// per output position (row-major y then x) and channel.
class LayerPatches {
 public:
  LayerPatches(const QuantTensor& input, const LayerSpec& layer, int n = 0);

  int positions() const { return positions_; }
  int out_w() const { return out_w_; }
  int m() const { return m_; }
  // Patch feeding output channel c at position `pos`. Depthwise rows are
  // gathered into `scratch`; other layers return a view into owned storage.
  std::span<const std::int8_t> patch(int pos, int c,
                                     std::vector<std::int8_t>& scratch) const;

 private:
  LayerKind kind_;
  int cin_ = 1;
  int positions_ = 1;
  int out_w_ = 1;
  int m_ = 0;
  PatchMatrix patches_;
};

// bias + sum (x_i - zx) * w_i in 64-bit. Throws InvalidArgument on a length
// mismatch.
std::int32_t dot_ref(std::span<const std::int8_t> patch_row,
                     std::span<const std::int8_t> weights, std::int32_t bias,
                     std::int32_t zx);

// conv2d, dwconv2d and fully_connected.
QuantTensor conv2d_ref(const QuantTensor& input, const LayerSpec& layer);
QuantTensor maxpool_ref(const QuantTensor& input, const Geometry& geometry);
QuantTensor reduce_max_ref(const QuantTensor& input);

// Dispatch on layer kind.
QuantTensor run_layer_ref(const QuantTensor& input, const LayerSpec& layer);

// Output of every layer, in order; the last entry is the model output.
std::vector<QuantTensor> run_model_ref(const Model& model, const QuantTensor& input);

// Index of the largest value; ties resolve to the lowest index.
std::size_t argmax(std::span<const std::int8_t> values);

// Throws ValidationError unless `input` matches the layer's input shape.
void check_layer_input(const QuantTensor& input, const LayerSpec& layer);

}  // namespace satconv::ref
