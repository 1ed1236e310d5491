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

#include "satconv/trace.hpp"

#include "satconv/error.hpp"
#include "satconv/ref_kernels.hpp"
#include "satconv/saturation.hpp"

namespace satconv::exec {

std::vector<TraceRow> trace_neuron(const Model& model, const KernelPlan* plan,
                                   const QuantTensor& input, std::size_t layer, int channel,
                                   int y, int x) {
  if (layer >= model.layers.size() || !is_accumulating(model.layers[layer].kind)) {
    throw InvalidArgument("trace: layer " + std::to_string(layer) +
                          " is not conv2d, dwconv2d or fully_connected");
  }
  const LayerSpec& l = model.layers[layer];
  if (channel < 0 || channel >= l.output_channels() || y < 0 || y >= l.output_shape.h ||
      x < 0 || x >= l.output_shape.w) {
    throw InvalidArgument("trace: neuron (" + std::to_string(channel) + ", " +
                          std::to_string(y) + ", " + std::to_string(x) +
                          ") outside output " + l.output_shape.str());
  }

  QuantTensor layer_input = input;
  for (std::size_t i = 0; i < layer; ++i) {
    layer_input = ref::run_layer_ref(layer_input, model.layers[i]);
  }
  ref::check_layer_input(layer_input, l);
  const ref::LayerPatches patches(layer_input, l, 0);
  std::vector<std::int8_t> scratch;
  const auto row = patches.patch(y * patches.out_w() + x, channel, scratch);
  const auto w = l.channel_weights(channel);
  const std::int32_t zx = layer_input.quant().zero_point;

  const LayerPlan* lp = plan != nullptr ? plan->find(layer) : nullptr;
  const ChannelPlan* cp = lp != nullptr && lp->channels[channel] ? &*lp->channels[channel] : nullptr;
  const XRangePolicy policy = plan != nullptr ? plan->policy : XRangePolicy::kDtype;
  const InputRange range = lp != nullptr ? lp->x_range : layer_input_range(model, layer, policy);
  const std::vector<int> order = cp != nullptr ? cp->redirection : build_redirection(w);
  const AccBounds bounds = cp != nullptr ? cp->bounds : acc_boundaries(l.requant[channel]);
  const DeviationTable dev = deviation_tables(w, order, range);

  std::vector<TraceRow> rows;
  rows.reserve(w.size());
  std::int64_t acc = l.bias[channel];
  std::size_t next_check = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const int idx = order[k];
    TraceRow r;
    r.step = static_cast<int>(k) + 1;
    r.orig_index = idx;
    r.weight = w[idx];
    r.x_minus_zx = row[idx] - zx;
    acc += static_cast<std::int64_t>(r.x_minus_zx) * r.weight;
    r.acc = acc;
    r.env_lo = acc + dev.min[k + 1];
    r.env_hi = acc + dev.max[k + 1];
    if (cp != nullptr && next_check < cp->checks.size() && cp->checks[next_check].pos == r.step) {
      const CheckPoint& ck = cp->checks[next_check++];
      r.check_fired = acc + ck.d_max <= bounds.lo || acc + ck.d_min >= bounds.hi;
    }
    rows.push_back(r);
  }
  return rows;
}

std::string trace_csv(std::span<const TraceRow> rows) {
  std::string out = "step,orig_index,w,x,acc,env_lo,env_hi,check_fired\n";
  for (const TraceRow& r : rows) {
    out += std::to_string(r.step) + "," + std::to_string(r.orig_index) + "," +
           std::to_string(r.weight) + "," + std::to_string(r.x_minus_zx) + "," +
           std::to_string(r.acc) + "," + std::to_string(r.env_lo) + "," +
           std::to_string(r.env_hi) + "," + (r.check_fired ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace satconv::exec
