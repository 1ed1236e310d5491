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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satconv/model.hpp"
#include "satconv/plan.hpp"
#include "satconv/sat_kernels.hpp"
#include "satconv/tensor.hpp"

namespace satconv::exec {

enum class Mode { kBaseline, kSat };

struct ExecOptions {
  bool high_short_circuit = true;
  KernelVariant variant = KernelVariant::kSpecialized;
  bool keep_intermediates = false;
};

struct LayerReport {
  std::size_t layer_index = 0;
  LayerKind kind = LayerKind::kConv2d;
  LayerCounters counters;
};

struct ExecReport {
  std::vector<LayerReport> layers;
  double check_cost = 4.0;

  LayerCounters totals() const;
  // macs_omitted / macs_total.
  double omitted_fraction() const;
  // (macs_omitted - check_cost * checks_executed) / macs_total.
  double estimated_saving() const;
  ExecReport& operator+=(const ExecReport& o);
};

struct RunResult {
  QuantTensor output;
  // Output of every layer when keep_intermediates is set; a layer fused into
  // its reduce-max consumer has no materialized output.
  std::vector<std::optional<QuantTensor>> intermediates;
  ExecReport report;
};

// Executes the model layer by layer. In sat mode, layers with a plan use the
// saturation-aware kernels (fused with a following reduce_max when flagged).
// Throws InvalidArgument for sat mode without a plan, ValidationError for an
// input that does not match the model.
RunResult run_inference(const Model& model, const KernelPlan* plan, const QuantTensor& input,
                        Mode mode, const ExecOptions& options = {});

struct InputComparison {
  bool equal = false;
  double omitted_pct = 0.0;
  double estimated_saving_pct = 0.0;
  std::vector<double> layer_omitted_pct;  // per model layer
};

struct ComparisonReport {
  std::vector<InputComparison> inputs;
  ExecReport sat_totals;  // counters summed over inputs
  std::size_t equal_count = 0;
  double mean_omitted_pct = 0.0;
  double max_omitted_pct = 0.0;
  double mean_saving_pct = 0.0;
  double max_saving_pct = 0.0;

  double equality_pct() const {
    return inputs.empty() ? 100.0 : 100.0 * static_cast<double>(equal_count) / inputs.size();
  }
};

// Runs baseline and sat mode on every input and compares every tensor that
// sat mode materializes.
ComparisonReport compare_modes(const Model& model, const KernelPlan& plan,
                               std::span<const QuantTensor> inputs,
                               const ExecOptions& options = {});

// CSV: layer,kind,macs_total,macs_executed,macs_omitted,checks_executed,
// exits_low,exits_high,exits_dyn plus a totals row.
std::string report_csv(const ExecReport& report);

}  // namespace satconv::exec
