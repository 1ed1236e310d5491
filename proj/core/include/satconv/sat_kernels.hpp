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

#include "satconv/model.hpp"
#include "satconv/plan.hpp"
#include "satconv/tensor.hpp"

namespace satconv::exec {

struct LayerCounters {
  std::uint64_t macs_total = 0;
  std::uint64_t macs_executed = 0;
  std::uint64_t macs_omitted = 0;
  std::uint64_t checks_executed = 0;
  std::uint64_t exits_low = 0;
  std::uint64_t exits_high = 0;
  // Exits caused by the running reduce-max bound, including positions skipped
  // after a channel saturated high.
  std::uint64_t exits_dynamic = 0;
  std::uint64_t neurons_total = 0;

  LayerCounters& operator+=(const LayerCounters& o);
  friend bool operator==(const LayerCounters&, const LayerCounters&) = default;
};

enum class ExitKind { kNone, kLow, kHigh, kDynamic };

struct DotResult {
  ExitKind exit = ExitKind::kNone;
  std::int32_t acc = 0;  // final accumulator when exit == kNone
  int steps = 0;         // MACs executed
};

// kSpecialized dispatches to unrolled 0/1/2-check kernels and a loop for more;
// kGeneric always takes the loop. Both must agree exactly.
enum class KernelVariant { kSpecialized, kGeneric };

// Accumulates from `bias` in redirection order, stopping at the first check
// whose deviation interval clears the low bound (max(A_lo, dyn_bound) when a
// dynamic bound is given) or the high bound A_hi.
DotResult sat_dot(std::span<const std::int8_t> patch_row,
                  std::span<const std::int8_t> weights, std::int32_t bias,
                  std::int32_t zx, const ChannelPlan& plan,
                  std::optional<std::int64_t> dyn_bound, LayerCounters& counters,
                  KernelVariant variant = KernelVariant::kSpecialized);

// Output value implied by a non-dynamic result.
std::int8_t resolve_output(const DotResult& r, const RequantParams& requant);

// Saturation-aware conv2d / dwconv2d / fully_connected; output equals
// ref::conv2d_ref.
QuantTensor conv2d_sat(const QuantTensor& input, const LayerSpec& layer,
                       const LayerPlan& plan, LayerCounters& counters,
                       KernelVariant variant = KernelVariant::kSpecialized);

struct FusedOptions {
  // After a high-side exit the channel's maximum is known to be q_hi, so its
  // remaining positions are skipped.
  bool high_short_circuit = true;
  KernelVariant variant = KernelVariant::kSpecialized;
};

// conv followed by a global reduce-max, producing the 1x1xC result directly.
// Equals ref::reduce_max_ref(ref::conv2d_ref(input, layer)).
QuantTensor conv_reduce_max_fused(const QuantTensor& input, const LayerSpec& layer,
                                  const LayerPlan& plan, LayerCounters& counters,
                                  const FusedOptions& options = {});

}  // namespace satconv::exec
