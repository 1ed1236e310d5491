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
#include "satconv/plan.hpp"
#include "satconv/presets.hpp"
#include "satconv/profile.hpp"
#include "satconv/ref_kernels.hpp"

using namespace satconv;

TEST_CASE("x-range policies") {
  const Model m = gen_synthetic("sat-heavy", 0);
  CHECK(layer_input_range(m, 0, XRangePolicy::kDtype) ==
        InputRange::for_zero_point(m.input_quant.zero_point));
  // Layer 1 consumes a ReLU conv with zo = -128 and clamp [-128, 127].
  const InputRange dtype = layer_input_range(m, 1, XRangePolicy::kDtype);
  const InputRange clamp = layer_input_range(m, 1, XRangePolicy::kProducerClamp);
  CHECK(dtype == InputRange{0, 255});
  CHECK(clamp.lo <= 0);
  CHECK(clamp.hi >= 0);
  CHECK(clamp.lo >= dtype.lo);
  CHECK(clamp.hi <= dtype.hi);
  CHECK(parse_x_range_policy("producer-clamp") == XRangePolicy::kProducerClamp);
  CHECK(to_string(XRangePolicy::kDtype) == "dtype");
  CHECK_THROWS_AS(parse_x_range_policy("nope"), InvalidArgument);
}

TEST_CASE("profile histogram counts every neuron once") {
  const Model m = gen_synthetic("sat-heavy", 1);
  const auto inputs = random_inputs(m, 4, 10);
  const ModelProfile p = profile_model(m, inputs);
  CHECK(p.model_name == m.name);
  for (const LayerProfile& lp : p.layers) {
    const LayerSpec& l = m.layers[lp.layer_index];
    CHECK(is_accumulating(l.kind));
    CHECK(lp.m == l.weights_per_channel());
    CHECK(lp.inputs == 4);
    REQUIRE(lp.channels.size() == static_cast<std::size_t>(l.output_channels()));
    const std::uint64_t per_channel = 4ull * l.output_shape.h * l.output_shape.w;
    for (const ChannelProfile& cp : lp.channels) {
      CHECK(cp.sample_count == per_channel);
      std::uint64_t hits = 0;
      for (const auto h : cp.hits) hits += h;
      CHECK(hits <= per_channel);
      const auto cdf = cp.cdf();
      REQUIRE(cdf.size() == static_cast<std::size_t>(lp.m - 1));
      for (std::size_t j = 1; j < cdf.size(); ++j) REQUIRE(cdf[j] >= cdf[j - 1]);
    }
  }
}

TEST_CASE("profile merge equals profiling the union") {
  const Model m = gen_synthetic("gmp-like", 2);
  const auto inputs = random_inputs(m, 6, 0);
  const std::span<const QuantTensor> all(inputs);
  for (std::size_t li = 0; li < m.layers.size(); ++li) {
    if (!is_accumulating(m.layers[li].kind)) continue;
    LayerProfile a = profile_layer(m, li, all.subspan(0, 2));
    const LayerProfile b = profile_layer(m, li, all.subspan(2));
    merge(a, b);
    CHECK(a == profile_layer(m, li, all));
  }
}

TEST_CASE("profile is deterministic and round-trips through JSON") {
  const Model m = gen_synthetic("har-like", 3);
  const auto inputs = random_inputs(m, 5, 1);
  const ModelProfile a = profile_model(m, inputs, XRangePolicy::kProducerClamp);
  const ModelProfile b = profile_model(m, inputs, XRangePolicy::kProducerClamp);
  CHECK(a == b);
  CHECK(profile_to_json(a) == profile_to_json(b));
  CHECK(profile_from_json(profile_to_json(a)) == a);
  CHECK_THROWS_AS(profile_from_json("{\"version\": 1}"), FormatError);
}

TEST_CASE("fused reduce-max layers are profiled with the dynamic bound") {
  const Model m = gen_synthetic("gmp-like", 0);
  const ModelProfile p = profile_model(m, random_inputs(m, 2, 0));
  REQUIRE(p.find(1) != nullptr);
  CHECK(p.find(1)->dynamic);
  CHECK(!p.find(0)->dynamic);
}

TEST_CASE("channel plan tables match the deviation tables") {
  SplitMix64 rng(83);
  const auto w = oracle::rand_vec(rng, 12);
  RequantParams rq;
  rq.multiplier = 1 << 30;
  rq.shift = 6;
  const std::vector<int> pos = {3, 8};
  const ChannelPlan cp = make_channel_plan(w, rq, {-128, 127}, pos);
  CHECK(cp.redirection == build_redirection(w));
  const DeviationTable d = deviation_tables(w, cp.redirection, {-128, 127});
  REQUIRE(cp.checks.size() == 2);
  CHECK(cp.checks[0] == CheckPoint{3, d.min[3], d.max[3]});
  CHECK(cp.checks[1] == CheckPoint{8, d.min[8], d.max[8]});
  CHECK(cp.bounds == acc_boundaries(rq));
}

TEST_CASE("build_plan, validate and JSON") {
  for (const std::string_view name : preset_names()) {
    CAPTURE(name);
    const Model m = gen_synthetic(name, 0);
    const ModelProfile prof = profile_model(m, random_inputs(m, 4, 0));
    const KernelPlan plan = build_plan(m, prof);
    CHECK_NOTHROW(validate(plan, m));
    CHECK(plan_from_json(plan_to_json(plan)) == plan);
    CHECK(plan_to_json(plan) == plan_to_json(build_plan(m, prof)));
    for (const LayerPlan& lp : plan.layers) {
      for (const auto& cp : lp.channels) {
        if (cp) CHECK(cp->checks.size() <= 2);
      }
    }
  }
}

TEST_CASE("max_checks -1 checks every step") {
  const Model m = gen_synthetic("tiny", 0);
  const ModelProfile prof = profile_model(m, random_inputs(m, 2, 0));
  PlanConfig cfg;
  cfg.max_checks = -1;
  const KernelPlan plan = build_plan(m, prof, cfg);
  for (const LayerPlan& lp : plan.layers) {
    const int mm = m.layers[lp.layer_index].weights_per_channel();
    for (const auto& cp : lp.channels) {
      REQUIRE(cp.has_value());
      CHECK(cp->checks.size() == static_cast<std::size_t>(mm - 1));
    }
  }
}

TEST_CASE("plan validation rejects mismatches") {
  const Model m = gen_synthetic("sat-heavy", 0);
  const ModelProfile prof = profile_model(m, random_inputs(m, 2, 0));
  const KernelPlan good = build_plan(m, prof);

  CHECK_THROWS_AS(validate(good, gen_synthetic("sat-heavy", 1)), ValidationError);
  KernelPlan bad = good;
  bad.layers[0].channels.pop_back();
  CHECK_THROWS_AS(validate(bad, m), ValidationError);
  bad = good;
  bad.layers[0].fused_reduce_max = true;
  CHECK_THROWS_AS(validate(bad, m), ValidationError);
  bad = good;
  for (auto& cp : bad.layers[0].channels) {
    if (cp) {
      cp->redirection[0] = cp->redirection[1];
      break;
    }
  }
  if (!(bad == good)) CHECK_THROWS_AS(validate(bad, m), ValidationError);

  PlanConfig cfg;
  cfg.policy = XRangePolicy::kProducerClamp;
  CHECK_THROWS_AS(build_plan(m, prof, cfg), ValidationError);
  ModelProfile partial = prof;
  partial.layers.pop_back();
  CHECK_THROWS_AS(build_plan(m, partial), ValidationError);
  CHECK_THROWS_AS(plan_from_json("{}"), FormatError);
}

TEST_CASE("plan size proxy") {
  KernelPlan p;
  LayerPlan lp;
  ChannelPlan cp;
  cp.redirection.resize(18);
  cp.checks = {{7, 0, 0}, {12, 0, 0}};
  lp.channels = {cp, std::nullopt};
  p.layers = {lp};
  CHECK(plan_bytes(p) == 18 + 2 * 10 + 8);
  p.layers[0].channels[1] = ChannelPlan{std::vector<int>(300), {}, {}};
  CHECK(plan_bytes(p) == 46 + 600 + 8);
}
