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

#include "satconv/executor.hpp"

#include <algorithm>

#include "satconv/error.hpp"
#include "satconv/ref_kernels.hpp"

namespace satconv::exec {

LayerCounters ExecReport::totals() const {
  LayerCounters t;
  for (const LayerReport& l : layers) t += l.counters;
  return t;
}

double ExecReport::omitted_fraction() const {
  const LayerCounters t = totals();
  return t.macs_total == 0 ? 0.0
                           : static_cast<double>(t.macs_omitted) / static_cast<double>(t.macs_total);
}

double ExecReport::estimated_saving() const {
  const LayerCounters t = totals();
  if (t.macs_total == 0) return 0.0;
  return (static_cast<double>(t.macs_omitted) -
          check_cost * static_cast<double>(t.checks_executed)) /
         static_cast<double>(t.macs_total);
}

ExecReport& ExecReport::operator+=(const ExecReport& o) {
  if (layers.empty()) {
    layers = o.layers;
    check_cost = o.check_cost;
    return *this;
  }
  for (std::size_t i = 0; i < layers.size() && i < o.layers.size(); ++i) {
    layers[i].counters += o.layers[i].counters;
  }
  return *this;
}

RunResult run_inference(const Model& model, const KernelPlan* plan, const QuantTensor& input,
                        Mode mode, const ExecOptions& options) {
  if (mode == Mode::kSat && plan == nullptr) {
    throw InvalidArgument("sat mode requires a plan");
  }
  if (input.shape() != model.input_shape) {
    throw ValidationError("input shape " + input.shape().str() + " does not match model input " +
                          model.input_shape.str());
  }
  RunResult result;
  result.report.check_cost = plan != nullptr ? plan->check_cost : 4.0;
  result.report.layers.resize(model.layers.size());
  if (options.keep_intermediates) result.intermediates.resize(model.layers.size());

  QuantTensor current(input.shape(), model.input_quant,
                      std::vector<std::int8_t>(input.data().begin(), input.data().end()));
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& layer = model.layers[i];
    LayerReport& rep = result.report.layers[i];
    rep.layer_index = i;
    rep.kind = layer.kind;
    ref::check_layer_input(current, layer);

    const LayerPlan* lp = nullptr;
    if (mode == Mode::kSat && is_accumulating(layer.kind)) lp = plan->find(i);

    if (lp != nullptr && lp->fused_reduce_max) {
      if (!model.reduce_max_consumer(i)) {
        throw ValidationError("plan flags layer " + std::to_string(i) +
                              " fused_reduce_max without a reduce_max consumer");
      }
      current = conv_reduce_max_fused(current, layer, *lp, rep.counters,
                                      {options.high_short_circuit, options.variant});
      ++i;
      result.report.layers[i].layer_index = i;
      result.report.layers[i].kind = model.layers[i].kind;
    } else if (lp != nullptr) {
      current = conv2d_sat(current, layer, *lp, rep.counters, options.variant);
    } else {
      if (is_accumulating(layer.kind)) {
        const std::uint64_t n = layer.output_shape.elements();
        const std::uint64_t m = static_cast<std::uint64_t>(layer.weights_per_channel());
        rep.counters.neurons_total += n;
        rep.counters.macs_total += n * m;
        rep.counters.macs_executed += n * m;
      }
      current = ref::run_layer_ref(current, layer);
    }
    if (options.keep_intermediates) result.intermediates[i] = current;
  }
  result.output = std::move(current);
  return result;
}

ComparisonReport compare_modes(const Model& model, const KernelPlan& plan,
                               std::span<const QuantTensor> inputs, const ExecOptions& options) {
  ComparisonReport report;
  ExecOptions opts = options;
  opts.keep_intermediates = true;
  double sum_omitted = 0.0;
  double sum_saving = 0.0;
  for (const QuantTensor& input : inputs) {
    const RunResult base = run_inference(model, nullptr, input, Mode::kBaseline, opts);
    const RunResult sat = run_inference(model, &plan, input, Mode::kSat, opts);
    InputComparison cmp;
    cmp.equal = sat.output == base.output;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
      if (sat.intermediates[i] && !(*sat.intermediates[i] == *base.intermediates[i])) {
        cmp.equal = false;
      }
      const LayerCounters& c = sat.report.layers[i].counters;
      cmp.layer_omitted_pct.push_back(
          c.macs_total == 0 ? 0.0 : 100.0 * static_cast<double>(c.macs_omitted) / c.macs_total);
    }
    cmp.omitted_pct = 100.0 * sat.report.omitted_fraction();
    cmp.estimated_saving_pct = 100.0 * sat.report.estimated_saving();
    if (cmp.equal) ++report.equal_count;
    sum_omitted += cmp.omitted_pct;
    sum_saving += cmp.estimated_saving_pct;
    report.max_omitted_pct = std::max(report.max_omitted_pct, cmp.omitted_pct);
    report.max_saving_pct = report.inputs.empty()
                                ? cmp.estimated_saving_pct
                                : std::max(report.max_saving_pct, cmp.estimated_saving_pct);
    report.sat_totals += sat.report;
    report.inputs.push_back(std::move(cmp));
  }
  if (!report.inputs.empty()) {
    report.mean_omitted_pct = sum_omitted / report.inputs.size();
    report.mean_saving_pct = sum_saving / report.inputs.size();
  }
  return report;
}

std::string report_csv(const ExecReport& report) {
  std::string out =
      "layer,kind,macs_total,macs_executed,macs_omitted,checks_executed,exits_low,exits_high,"
      "exits_dyn\n";
  const auto row = [&](const std::string& name, std::string_view kind, const LayerCounters& c) {
    out += name + "," + std::string(kind) + "," + std::to_string(c.macs_total) + "," +
           std::to_string(c.macs_executed) + "," + std::to_string(c.macs_omitted) + "," +
           std::to_string(c.checks_executed) + "," + std::to_string(c.exits_low) + "," +
           std::to_string(c.exits_high) + "," + std::to_string(c.exits_dynamic) + "\n";
  };
  for (const LayerReport& l : report.layers) {
    row(std::to_string(l.layer_index), to_string(l.kind), l.counters);
  }
  row("total", "all", report.totals());
  return out;
}

}  // namespace satconv::exec
