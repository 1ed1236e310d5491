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

#include "doctest.h"
#include "oracles.hpp"
#include "satconv/error.hpp"
#include "satconv/presets.hpp"
#include "satconv/ref_kernels.hpp"

using namespace satconv;

namespace {

LayerSpec random_layer(SplitMix64& rng, LayerKind kind, const Shape& in, QuantParams in_q,
                       Geometry g, int out_c) {
  LayerSpec l;
  l.kind = kind;
  l.geometry = g;
  l.input_shape = in;
  l.input_quant = in_q;
  if (kind == LayerKind::kDepthwiseConv2d) out_c = in.c;
  l.output_shape = infer_output_shape(kind, g, in, out_c);
  l.output_quant = {0.1, static_cast<std::int32_t>(rng.next_below(256)) - 128};
  const int m = l.weights_per_channel();
  l.weights = oracle::rand_vec(rng, static_cast<std::size_t>(m) * out_c);
  for (int c = 0; c < out_c; ++c) {
    l.bias.push_back(static_cast<std::int32_t>(rng.next_below(4001)) - 2000);
    RequantParams p = oracle::rand_requant(rng, -14.0);
    p.zero_point = l.output_quant.zero_point;
    l.requant.push_back(p);
  }
  return l;
}

}  // namespace

TEST_CASE("conv2d_ref equals the nested-loop oracle") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int kind_pick = static_cast<int>(rng.next_below(3));
    const LayerKind kind = kind_pick == 0   ? LayerKind::kConv2d
                           : kind_pick == 1 ? LayerKind::kDepthwiseConv2d
                                            : LayerKind::kFullyConnected;
    Geometry g;
    g.kernel_h = 1 + static_cast<int>(rng.next_below(4));
    g.kernel_w = 1 + static_cast<int>(rng.next_below(4));
    g.stride = 1 + static_cast<int>(rng.next_below(3));
    g.padding = rng.next_below(2) ? Padding::kSame : Padding::kValid;
    Shape in{1 + static_cast<int>(rng.next_below(2)), g.kernel_h + static_cast<int>(rng.next_below(6)),
             g.kernel_w + static_cast<int>(rng.next_below(6)), 1 + static_cast<int>(rng.next_below(4))};
    if (kind == LayerKind::kFullyConnected) g = {};
    const QuantParams q{0.05, static_cast<std::int32_t>(rng.next_below(256)) - 128};
    const LayerSpec l = random_layer(rng, kind, in, q, g, 1 + static_cast<int>(rng.next_below(5)));
    const QuantTensor x = random_input(in, q, rng.next());
    CAPTURE(trial);
    REQUIRE(ref::conv2d_ref(x, l) == oracle::conv(x, l));
  }
}

TEST_CASE("im2col pads with the input zero point") {
  const QuantTensor x({1, 2, 2, 1}, {1.0, 7}, {1, 2, 3, 4});
  const ref::PatchMatrix p = ref::im2col(x, {3, 3, 1, Padding::kSame});
  CHECK(p.rows == 4);
  CHECK(p.m == 9);
  const std::vector<std::int8_t> first(p.row(0).begin(), p.row(0).end());
  CHECK(first == std::vector<std::int8_t>{7, 7, 7, 7, 1, 2, 7, 3, 4});
}

TEST_CASE("maxpool and reduce_max") {
  const QuantTensor x({1, 2, 4, 1}, {1.0, 0}, {1, 5, -3, 2, 4, 0, 9, -8});
  const QuantTensor p = ref::maxpool_ref(x, {2, 2, 2, Padding::kValid});
  CHECK(p.shape() == Shape{1, 1, 2, 1});
  CHECK(p.at(0, 0, 0, 0) == 5);
  CHECK(p.at(0, 0, 1, 0) == 9);
  const QuantTensor y({2, 1, 2, 2}, {1.0, 0}, {1, -4, 3, -9, -1, -2, -5, -3});
  const QuantTensor r = ref::reduce_max_ref(y);
  CHECK(r.shape() == Shape{2, 1, 1, 2});
  CHECK(r.at(0, 0, 0, 0) == 3);
  CHECK(r.at(0, 0, 0, 1) == -4);
  CHECK(r.at(1, 0, 0, 0) == -1);
  CHECK(r.at(1, 0, 0, 1) == -2);
}

TEST_CASE("dot_ref") {
  const std::vector<std::int8_t> x = {1, 2, 3};
  const std::vector<std::int8_t> w = {4, -5, 6};
  CHECK(ref::dot_ref(x, w, 10, 1) == 10 + 0 * 4 + 1 * -5 + 2 * 6);
  CHECK_THROWS_AS(ref::dot_ref(x, std::vector<std::int8_t>{1}, 0, 0), InvalidArgument);
}

TEST_CASE("argmax picks the first maximum") {
  const std::vector<std::int8_t> v = {3, 9, -1, 9};
  CHECK(ref::argmax(v) == 1);
}

TEST_CASE("run_model_ref checks input shape and returns every layer") {
  const Model m = gen_synthetic("har-like", 0);
  const QuantTensor x = random_input(m.input_shape, m.input_quant, 1);
  const auto outs = ref::run_model_ref(m, x);
  CHECK(outs.size() == m.layers.size());
  CHECK(outs.back().shape() == m.output_shape());
  const QuantTensor wrong = random_input({1, 3, 3, 1}, m.input_quant, 1);
  CHECK_THROWS_AS(ref::run_model_ref(m, wrong), ValidationError);
}
