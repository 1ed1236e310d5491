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

#include "satconv/sat_kernels.hpp"

#include <algorithm>

#include "satconv/error.hpp"
#include "satconv/quant.hpp"
#include "satconv/ref_kernels.hpp"

namespace satconv::exec {

LayerCounters& LayerCounters::operator+=(const LayerCounters& o) {
  macs_total += o.macs_total;
  macs_executed += o.macs_executed;
  macs_omitted += o.macs_omitted;
  checks_executed += o.checks_executed;
  exits_low += o.exits_low;
  exits_high += o.exits_high;
  exits_dynamic += o.exits_dynamic;
  neurons_total += o.neurons_total;
  return *this;
}

namespace {

struct Operands {
  const std::int8_t* x;
  const std::int8_t* w;
  const int* order;
  std::int32_t zx;
};

struct Limits {
  std::int64_t lo;         // effective low bound
  std::int64_t static_lo;  // A_lo, to tell static from dynamic exits
  std::int64_t hi;
};

struct Run {
  DotResult result;
  int checks = 0;
};

inline std::int32_t mac(std::int32_t acc, const Operands& op, int from, int to) {
  for (int k = from; k < to; ++k) {
    const int idx = op.order[k];
    acc += (static_cast<std::int32_t>(op.x[idx]) - op.zx) * op.w[idx];
  }
  return acc;
}

inline ExitKind test(std::int32_t acc, const CheckPoint& ck, const Limits& lim) {
  if (acc + ck.d_max <= lim.lo) {
    return acc + ck.d_max <= lim.static_lo ? ExitKind::kLow : ExitKind::kDynamic;
  }
  if (acc + ck.d_min >= lim.hi) return ExitKind::kHigh;
  return ExitKind::kNone;
}

Run run_0(const Operands& op, int m, std::int32_t bias) {
  return {{ExitKind::kNone, mac(bias, op, 0, m), m}, 0};
}

Run run_1(const Operands& op, int m, std::int32_t bias, const CheckPoint* ck,
          const Limits& lim) {
  const std::int32_t acc = mac(bias, op, 0, ck[0].pos);
  if (const ExitKind e = test(acc, ck[0], lim); e != ExitKind::kNone) {
    return {{e, acc, ck[0].pos}, 1};
  }
  return {{ExitKind::kNone, mac(acc, op, ck[0].pos, m), m}, 1};
}

Run run_2(const Operands& op, int m, std::int32_t bias, const CheckPoint* ck,
          const Limits& lim) {
  std::int32_t acc = mac(bias, op, 0, ck[0].pos);
  if (const ExitKind e = test(acc, ck[0], lim); e != ExitKind::kNone) {
    return {{e, acc, ck[0].pos}, 1};
  }
  acc = mac(acc, op, ck[0].pos, ck[1].pos);
  if (const ExitKind e = test(acc, ck[1], lim); e != ExitKind::kNone) {
    return {{e, acc, ck[1].pos}, 2};
  }
  return {{ExitKind::kNone, mac(acc, op, ck[1].pos, m), m}, 2};
}

Run run_k(const Operands& op, int m, std::int32_t bias, std::span<const CheckPoint> checks,
          const Limits& lim) {
  std::int32_t acc = bias;
  int done = 0;
  int executed = 0;
  for (const CheckPoint& ck : checks) {
    acc = mac(acc, op, done, ck.pos);
    done = ck.pos;
    ++executed;
    if (const ExitKind e = test(acc, ck, lim); e != ExitKind::kNone) {
      return {{e, acc, done}, executed};
    }
  }
  return {{ExitKind::kNone, mac(acc, op, done, m), m}, executed};
}

void count(LayerCounters& counters, int m, const Run& run) {
  ++counters.neurons_total;
  counters.macs_total += m;
  counters.macs_executed += run.result.steps;
  counters.macs_omitted += m - run.result.steps;
  counters.checks_executed += run.checks;
  switch (run.result.exit) {
    case ExitKind::kLow:
      ++counters.exits_low;
      break;
    case ExitKind::kHigh:
      ++counters.exits_high;
      break;
    case ExitKind::kDynamic:
      ++counters.exits_dynamic;
      break;
    case ExitKind::kNone:
      break;
  }
}

std::int32_t plain_dot(std::span<const std::int8_t> x, std::span<const std::int8_t> w,
                       std::int32_t bias, std::int32_t zx, LayerCounters& counters) {
  std::int32_t acc = bias;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += (static_cast<std::int32_t>(x[i]) - zx) * w[i];
  }
  ++counters.neurons_total;
  counters.macs_total += w.size();
  counters.macs_executed += w.size();
  return acc;
}

void check_layer_plan(const LayerSpec& layer, const LayerPlan& plan) {
  if (!is_accumulating(layer.kind)) {
    throw InvalidArgument("sat kernel: layer is not conv/dwconv/fc");
  }
  if (plan.channels.size() != static_cast<std::size_t>(layer.output_channels())) {
    throw ValidationError("sat kernel: plan has " + std::to_string(plan.channels.size()) +
                          " channels, layer has " + std::to_string(layer.output_channels()));
  }
}

}  // namespace

DotResult sat_dot(std::span<const std::int8_t> patch_row,
                  std::span<const std::int8_t> weights, std::int32_t bias,
                  std::int32_t zx, const ChannelPlan& plan,
                  std::optional<std::int64_t> dyn_bound, LayerCounters& counters,
                  KernelVariant variant) {
  const int m = static_cast<int>(weights.size());
  if (patch_row.size() != weights.size() || plan.redirection.size() != weights.size()) {
    throw InvalidArgument("sat_dot: patch, weights and redirection lengths differ");
  }
  if (!plan.checks.empty() && plan.checks.back().pos >= m) {
    throw InvalidArgument("sat_dot: check position beyond kernel length");
  }
  const Operands op{patch_row.data(), weights.data(), plan.redirection.data(), zx};
  Limits lim{plan.bounds.lo, plan.bounds.lo, plan.bounds.hi};
  if (dyn_bound) lim.lo = std::max(lim.lo, *dyn_bound);

  Run run;
  if (variant == KernelVariant::kGeneric) {
    run = run_k(op, m, bias, plan.checks, lim);
  } else {
    switch (plan.checks.size()) {
      case 0:
        run = run_0(op, m, bias);
        break;
      case 1:
        run = run_1(op, m, bias, plan.checks.data(), lim);
        break;
      case 2:
        run = run_2(op, m, bias, plan.checks.data(), lim);
        break;
      default:
        run = run_k(op, m, bias, plan.checks, lim);
        break;
    }
  }
  count(counters, m, run);
  return run.result;
}

std::int8_t resolve_output(const DotResult& r, const RequantParams& requant) {
  switch (r.exit) {
    case ExitKind::kNone:
      return requantize(r.acc, requant);
    case ExitKind::kLow:
      return static_cast<std::int8_t>(requant.q_lo);
    case ExitKind::kHigh:
      return static_cast<std::int8_t>(requant.q_hi);
    case ExitKind::kDynamic:
      break;
  }
  throw InvariantViolation("resolve_output: dynamic exit has no materialized value");
}

QuantTensor conv2d_sat(const QuantTensor& input, const LayerSpec& layer,
                       const LayerPlan& plan, LayerCounters& counters, KernelVariant variant) {
  check_layer_plan(layer, plan);
  QuantTensor out(layer.output_shape, layer.output_quant);
  const std::int32_t zx = input.quant().zero_point;
  std::vector<std::int8_t> scratch;
  for (int n = 0; n < input.shape().n; ++n) {
    const ref::LayerPatches patches(input, layer, n);
    for (int pos = 0; pos < patches.positions(); ++pos) {
      const int y = pos / patches.out_w();
      const int x = pos % patches.out_w();
      for (int c = 0; c < layer.output_channels(); ++c) {
        const auto row = patches.patch(pos, c, scratch);
        const auto w = layer.channel_weights(c);
        const RequantParams& rq = layer.requant[c];
        if (const auto& cp = plan.channels[c]) {
          const DotResult r =
              sat_dot(row, w, layer.bias[c], zx, *cp, std::nullopt, counters, variant);
          out.at(n, y, x, c) = resolve_output(r, rq);
        } else {
          out.at(n, y, x, c) = requantize(plain_dot(row, w, layer.bias[c], zx, counters), rq);
        }
      }
    }
  }
  return out;
}

QuantTensor conv_reduce_max_fused(const QuantTensor& input, const LayerSpec& layer,
                                  const LayerPlan& plan, LayerCounters& counters,
                                  const FusedOptions& options) {
  check_layer_plan(layer, plan);
  if (!plan.fused_reduce_max) {
    throw ValidationError("conv_reduce_max_fused: layer plan is not flagged fused_reduce_max");
  }
  const Shape& in = input.shape();
  QuantTensor out({in.n, 1, 1, layer.output_channels()}, layer.output_quant);
  const std::int32_t zx = input.quant().zero_point;
  const int m = layer.weights_per_channel();
  std::vector<std::int8_t> scratch;
  for (int n = 0; n < in.n; ++n) {
    const ref::LayerPatches patches(input, layer, n);
    for (int c = 0; c < layer.output_channels(); ++c) {
      const auto w = layer.channel_weights(c);
      const RequantParams& rq = layer.requant[c];
      const auto& cp = plan.channels[c];
      if (!cp) {
        std::int32_t best = 0;
        for (int pos = 0; pos < patches.positions(); ++pos) {
          const std::int32_t acc =
              plain_dot(patches.patch(pos, c, scratch), w, layer.bias[c], zx, counters);
          best = pos == 0 ? acc : std::max(best, acc);
        }
        out.at(n, 0, 0, c) = requantize(best, rq);
        continue;
      }
      // Running best accumulator; A_lo loses nothing since anything at or
      // below it requantizes to q_lo.
      std::int64_t best = cp->bounds.lo;
      bool saturated_high = false;
      for (int pos = 0; pos < patches.positions(); ++pos) {
        if (saturated_high && options.high_short_circuit) {
          ++counters.neurons_total;
          counters.macs_total += m;
          counters.macs_omitted += m;
          ++counters.exits_dynamic;
          continue;
        }
        const DotResult r = sat_dot(patches.patch(pos, c, scratch), w, layer.bias[c], zx,
                                    *cp, best, counters, options.variant);
        if (r.exit == ExitKind::kNone) {
          best = std::max<std::int64_t>(best, r.acc);
        } else if (r.exit == ExitKind::kHigh) {
          saturated_high = true;
          best = std::max(best, cp->bounds.hi);
        }
      }
      out.at(n, 0, 0, c) = saturated_high ? static_cast<std::int8_t>(rq.q_hi)
                                          : requantize(static_cast<std::int32_t>(best), rq);
    }
  }
  return out;
}

}  // namespace satconv::exec
