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
#include <span>
#include <string>
#include <vector>

#include "satconv/model.hpp"
#include "satconv/plan.hpp"
#include "satconv/tensor.hpp"

namespace satconv::exec {

struct TraceRow {
  int step = 0;  // 1-based, reordered
  int orig_index = 0;
  int weight = 0;
  int x_minus_zx = 0;
  std::int64_t acc = 0;
  std::int64_t env_lo = 0;  // acc + d_min
  std::int64_t env_hi = 0;  // acc + d_max
  bool check_fired = false;
};

// Full reordered accumulation of one neuron (batch item 0) with its envelope
// of reachable final values. A configured check fires where its interval
// clears the static bounds; the trace never stops early. Channels the plan
// leaves pass-through (or a null plan) are traced in |w| order with no checks.
// Throws InvalidArgument for out-of-range coordinates.
std::vector<TraceRow> trace_neuron(const Model& model, const KernelPlan* plan,
                                   const QuantTensor& input, std::size_t layer, int channel,
                                   int y, int x);

// CSV: step,orig_index,w,x,acc,env_lo,env_hi,check_fired
std::string trace_csv(std::span<const TraceRow> rows);

}  // namespace satconv::exec
