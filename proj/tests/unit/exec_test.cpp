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
#include "satconv/analysis.hpp"
#include "satconv/error.hpp"
#include "satconv/executor.hpp"
#include "satconv/plan.hpp"
#include "satconv/presets.hpp"
#include "satconv/profile.hpp"
#include "satconv/ref_kernels.hpp"
#include "satconv/trace.hpp"

using namespace satconv;
using namespace satconv::exec;

namespace {

KernelPlan plan_for(const Model& m, int max_checks = 2, double cost = 4.0) {
  const ModelProfile prof = profile_model(m, random_inputs(m, 8, 1000));
  PlanConfig cfg;
  cfg.max_checks = max_checks;
  cfg.check_cost = cost;
  return build_plan(m, prof, cfg);
}

void check_conservation(const ExecReport& r) {
  for (const LayerReport& l : r.layers) {
    const LayerCounters& c = l.counters;
    CHECK(c.macs_executed + c.macs_omitted == c.macs_total);
    CHECK(c.exits_low + c.exits_high + c.exits_dynamic <= c.neurons_total);
  }
}

}  // namespace

TEST_CASE("sat mode is bit-identical to baseline on every preset") {
  for (const std::string_view name : preset_names()) {
    CAPTURE(name);
    const Model m = gen_synthetic(name, 5);
    for (const int k : {0, 1, 2, 3, -1}) {
      CAPTURE(k);
      const KernelPlan plan = plan_for(m, k, k < 0 ? 0.0 : 4.0);
      const auto inputs = random_inputs(m, 6, 77);
      const ComparisonReport cmp = compare_modes(m, plan, inputs);
      CHECK(cmp.equal_count == inputs.size());
      check_conservation(cmp.sat_totals);
    }
  }
}

TEST_CASE("baseline mode equals the reference interpreter and counts every MAC") {
  const Model m = gen_synthetic("mnist-like", 1);
  const QuantTensor x = random_input(m.input_shape, m.input_quant, 4);
  ExecOptions opts;
  opts.keep_intermediates = true;
  const RunResult r = run_inference(m, nullptr, x, Mode::kBaseline, opts);
  const auto ref_outs = ref::run_model_ref(m, x);
  for (std::size_t i = 0; i < m.layers.size(); ++i) CHECK(*r.intermediates[i] == ref_outs[i]);
  CHECK(r.report.totals().macs_total == count_macs(m));
  CHECK(r.report.totals().macs_omitted == 0);
  CHECK_THROWS_AS(run_inference(m, nullptr, x, Mode::kSat), InvalidArgument);
}

TEST_CASE("specialized and generic kernels agree exactly") {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 3000; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_below(30));
    const auto w = oracle::rand_vec(rng, m);
    const auto x = oracle::rand_vec(rng, m);
    const int zx = static_cast<int>(rng.next_below(256)) - 128;
    const auto bias = static_cast<std::int32_t>(rng.next_below(20001)) - 10000;
    const RequantParams rq = oracle::rand_requant(rng, -12.0);
    std::vector<int> pos;
    const int nchecks = static_cast<int>(rng.next_below(5));
    for (int j = 1; j < m && static_cast<int>(pos.size()) < nchecks; ++j) {
      if (rng.next_below(3) == 0) pos.push_back(j);
    }
    const ChannelPlan cp = make_channel_plan(w, rq, InputRange::for_zero_point(zx), pos);
    std::optional<std::int64_t> dyn;
    if (rng.next_below(2)) dyn = static_cast<std::int64_t>(rng.next_below(40001)) - 20000;
    LayerCounters a;
    LayerCounters b;
    const DotResult ra = sat_dot(x, w, bias, zx, cp, dyn, a, KernelVariant::kSpecialized);
    const DotResult rb = sat_dot(x, w, bias, zx, cp, dyn, b, KernelVariant::kGeneric);
    REQUIRE(ra.exit == rb.exit);
    REQUIRE(ra.steps == rb.steps);
    REQUIRE(a == b);
    CHECK(a.macs_executed + a.macs_omitted == a.macs_total);
    if (ra.exit == ExitKind::kNone) {
      CHECK(ra.acc == oracle::partial(w, x, bias, zx, m));
      CHECK(ra.steps == m);
    } else if (ra.exit != ExitKind::kDynamic) {
      CHECK(resolve_output(ra, rq) == oracle::requantize(oracle::partial(w, x, bias, zx, m), rq));
    } else {
      CHECK(oracle::partial(w, x, bias, zx, m) <= *dyn);
      CHECK_THROWS_AS(resolve_output(ra, rq), InvariantViolation);
    }
  }
}

TEST_CASE("fused reduce-max equals the reference with and without short-circuit") {
  const Model m = gen_synthetic("gmp-like", 0);
  const KernelPlan plan = plan_for(m);
  const LayerPlan* lp = plan.find(1);
  REQUIRE(lp != nullptr);
  REQUIRE(lp->fused_reduce_max);
  for (const QuantTensor& x : random_inputs(m, 10, 300)) {
    const QuantTensor in1 = ref::run_layer_ref(x, m.layers[0]);
    const QuantTensor want = ref::reduce_max_ref(ref::conv2d_ref(in1, m.layers[1]));
    for (const bool sc : {true, false}) {
      LayerCounters c;
      const QuantTensor got = conv_reduce_max_fused(in1, m.layers[1], *lp, c, {sc});
      CHECK(got == want);
      CHECK(c.macs_executed + c.macs_omitted == c.macs_total);
    }
  }
}

TEST_CASE("fused intermediates are not materialized") {
  const Model m = gen_synthetic("gmp-like", 0);
  const KernelPlan plan = plan_for(m);
  ExecOptions opts;
  opts.keep_intermediates = true;
  const RunResult r =
      run_inference(m, &plan, random_input(m.input_shape, m.input_quant, 1), Mode::kSat, opts);
  CHECK(r.intermediates[0].has_value());
  CHECK(!r.intermediates[1].has_value());
  CHECK(r.intermediates[2].has_value());
}

TEST_CASE("report CSV layout") {
  const Model m = gen_synthetic("tiny", 0);
  const KernelPlan plan = plan_for(m);
  const RunResult r =
      run_inference(m, &plan, random_input(m.input_shape, m.input_quant, 1), Mode::kSat);
  const std::string csv = report_csv(r.report);
  CHECK(csv.rfind("layer,kind,macs_total,macs_executed,macs_omitted,checks_executed,exits_low,"
                  "exits_high,exits_dyn\n",
                  0) == 0);
  CHECK(csv.find("\ntotal,all,") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(m.layers.size()) + 2);
}

TEST_CASE("trace has one row per MAC and ends at the true accumulator") {
  const Model m = gen_synthetic("sat-heavy", 0);
  const KernelPlan plan = plan_for(m);
  const QuantTensor x = random_input(m.input_shape, m.input_quant, 2);
  const auto l1_in = ref::run_layer_ref(x, m.layers[0]);
  for (const KernelPlan* p : {static_cast<const KernelPlan*>(nullptr), &plan}) {
    const auto rows = trace_neuron(m, p, x, 1, 3, 2, 1);
    const int mm = m.layers[1].weights_per_channel();
    REQUIRE(rows.size() == static_cast<std::size_t>(mm));
    std::vector<std::int8_t> scratch;
    const ref::LayerPatches patches(l1_in, m.layers[1], 0);
    const auto row = patches.patch(2 * patches.out_w() + 1, 3, scratch);
    const auto acc = oracle::partial(m.layers[1].channel_weights(3), row, m.layers[1].bias[3],
                                     l1_in.quant().zero_point, mm);
    CHECK(rows.back().acc == acc);
    CHECK(rows.back().env_lo == acc);
    CHECK(rows.back().env_hi == acc);
    for (const TraceRow& t : rows) {
      CHECK(t.env_lo <= acc);
      CHECK(t.env_hi >= acc);
    }
  }
  CHECK_THROWS_AS(trace_neuron(m, &plan, x, 2, 0, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(trace_neuron(m, &plan, x, 1, 99, 0, 0), InvalidArgument);
  const std::string csv = trace_csv(trace_neuron(m, &plan, x, 0, 0, 0, 0));
  CHECK(csv.rfind("step,orig_index,w,x,acc,env_lo,env_hi,check_fired\n", 0) == 0);
}

TEST_CASE("analysis relations hold") {
  for (const std::string_view name : preset_names()) {
    CAPTURE(name);
    const Model m = gen_synthetic(name, 0);
    const AnalysisReport r = analyze_stats(m, random_inputs(m, 4, 9));
    CHECK(r.inputs == 4);
    for (const LayerStats& s : r.layers) {
      CHECK(s.effectless >= s.omittable_unordered);
      CHECK(s.effectless <= s.macs);
      CHECK(s.omittable_ordered <= s.macs);
      CHECK(s.saturated <= s.neurons);
    }
    const std::string csv = analysis_csv(r);
    CHECK(csv.rfind("layer,kind,neurons,macs,saturated_pct,effectless_pct,"
                    "omittable_ordered_pct,omittable_unordered_pct\n",
                    0) == 0);
  }
}

TEST_CASE("high-side short-circuit skips positions and stays exact") {
  Model m = gen_synthetic("gmp-like", 0);
  // Ratio 2 on the pooled conv: many channels saturate high somewhere.
  for (RequantParams& p : m.layers[1].requant) {
    p.multiplier = 1 << 30;
    p.shift = -2;
  }
  validate(m);
  const KernelPlan plan = build_plan(m, profile_model(m, random_inputs(m, 16, 5)));
  const LayerPlan* lp = plan.find(1);
  REQUIRE(lp != nullptr);
  LayerCounters on;
  LayerCounters off;
  for (const QuantTensor& x : random_inputs(m, 20, 50)) {
    const QuantTensor in1 = ref::run_layer_ref(x, m.layers[0]);
    const QuantTensor want = ref::reduce_max_ref(ref::conv2d_ref(in1, m.layers[1]));
    CHECK(conv_reduce_max_fused(in1, m.layers[1], *lp, on, {true}) == want);
    CHECK(conv_reduce_max_fused(in1, m.layers[1], *lp, off, {false}) == want);
  }
  CHECK(on.exits_high > 0);
  CHECK(on.exits_dynamic > off.exits_dynamic);
  CHECK(on.macs_omitted > off.macs_omitted);
  CHECK(on.macs_total == off.macs_total);
  CHECK(on.macs_executed + on.macs_omitted == on.macs_total);
  ExecOptions no_sc;
  no_sc.high_short_circuit = false;
  const auto inputs = random_inputs(m, 10, 90);
  CHECK(compare_modes(m, plan, inputs).equal_count == inputs.size());
  CHECK(compare_modes(m, plan, inputs, no_sc).equal_count == inputs.size());
}
