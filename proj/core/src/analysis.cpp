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

#include "satconv/analysis.hpp"

#include <cstdio>

#include "satconv/error.hpp"
#include "satconv/ref_kernels.hpp"
#include "satconv/saturation.hpp"

namespace satconv {

LayerStats& LayerStats::operator+=(const LayerStats& o) {
  neurons += o.neurons;
  macs += o.macs;
  saturated += o.saturated;
  effectless += o.effectless;
  omittable_ordered += o.omittable_ordered;
  omittable_unordered += o.omittable_unordered;
  return *this;
}

AnalysisReport analyze_stats(const Model& model, std::span<const QuantTensor> inputs,
                             XRangePolicy policy) {
  if (inputs.empty()) throw InvalidArgument("analyze: at least one input required");

  struct Channel {
    std::vector<int> ordered;
    std::vector<int> unordered;
    DeviationTable dev_ordered;
    DeviationTable dev_unordered;
    AccBounds bounds;
  };
  AnalysisReport report;
  std::vector<std::vector<Channel>> channels(model.layers.size());
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& l = model.layers[i];
    if (!is_accumulating(l.kind)) continue;
    const InputRange range = layer_input_range(model, i, policy);
    for (int c = 0; c < l.output_channels(); ++c) {
      const auto w = l.channel_weights(c);
      Channel ch;
      ch.ordered = build_redirection(w);
      ch.unordered = identity_order(static_cast<int>(w.size()));
      ch.dev_ordered = deviation_tables(w, ch.ordered, range);
      ch.dev_unordered = deviation_tables(w, ch.unordered, range);
      ch.bounds = acc_boundaries(l.requant[c]);
      channels[i].push_back(std::move(ch));
    }
    LayerStats s;
    s.layer_index = i;
    s.kind = l.kind;
    report.layers.push_back(s);
  }

  std::vector<std::int8_t> scratch;
  for (const QuantTensor& input : inputs) {
    const std::vector<QuantTensor> outputs = ref::run_model_ref(model, input);
    for (LayerStats& stats : report.layers) {
      const std::size_t i = stats.layer_index;
      const LayerSpec& l = model.layers[i];
      const QuantTensor& in = i == 0 ? input : outputs[i - 1];
      const std::int32_t zx = in.quant().zero_point;
      const int m = l.weights_per_channel();
      for (int n = 0; n < in.shape().n; ++n) {
        const ref::LayerPatches patches(in, l, n);
        for (int pos = 0; pos < patches.positions(); ++pos) {
          for (int c = 0; c < l.output_channels(); ++c) {
            const Channel& ch = channels[i][c];
            const auto w = l.channel_weights(c);
            const auto x = patches.patch(pos, c, scratch);
            const std::int32_t bias = l.bias[c];
            ++stats.neurons;
            stats.macs += m;
            const std::int8_t out = requantize(ref::dot_ref(x, w, bias, zx), l.requant[c]);
            if (out == l.requant[c].q_lo || out == l.requant[c].q_hi) ++stats.saturated;
            stats.effectless += effectless_suffix(w, x, bias, zx, l.requant[c]);
            if (auto t = earliest_trigger(w, ch.ordered, ch.dev_ordered, x, bias, zx, ch.bounds)) {
              stats.omittable_ordered += m - t->step;
            }
            if (auto t = earliest_trigger(w, ch.unordered, ch.dev_unordered, x, bias, zx,
                                          ch.bounds)) {
              stats.omittable_unordered += m - t->step;
            }
          }
        }
      }
    }
    ++report.inputs;
  }
  for (const LayerStats& s : report.layers) report.total += s;
  return report;
}

std::string analysis_csv(const AnalysisReport& report) {
  std::string out =
      "layer,kind,neurons,macs,saturated_pct,effectless_pct,omittable_ordered_pct,"
      "omittable_unordered_pct\n";
  char buf[256];
  const auto row = [&](const std::string& name, const std::string& kind, const LayerStats& s) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%llu,%llu,%.4f,%.4f,%.4f,%.4f\n", name.c_str(),
                  kind.c_str(), static_cast<unsigned long long>(s.neurons),
                  static_cast<unsigned long long>(s.macs),
                  AnalysisReport::pct(s.saturated, s.neurons),
                  AnalysisReport::pct(s.effectless, s.macs),
                  AnalysisReport::pct(s.omittable_ordered, s.macs),
                  AnalysisReport::pct(s.omittable_unordered, s.macs));
    out += buf;
  };
  for (const LayerStats& s : report.layers) {
    row(std::to_string(s.layer_index), std::string(to_string(s.kind)), s);
  }
  row("total", "all", report.total);
  return out;
}

}  // namespace satconv
