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

#include "satconv/plan.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "satconv/check_select.hpp"
#include "satconv/error.hpp"

namespace satconv {

using json = nlohmann::ordered_json;

std::size_t LayerPlan::instrumented() const {
  return static_cast<std::size_t>(
      std::count_if(channels.begin(), channels.end(), [](const auto& c) { return c.has_value(); }));
}

const LayerPlan* KernelPlan::find(std::size_t layer_index) const {
  for (const LayerPlan& l : layers) {
    if (l.layer_index == layer_index) return &l;
  }
  return nullptr;
}

ChannelPlan make_channel_plan(std::span<const std::int8_t> weights,
                              const RequantParams& requant, InputRange range,
                              std::span<const int> positions) {
  ChannelPlan cp;
  cp.redirection = build_redirection(weights);
  const DeviationTable dev = deviation_tables(weights, cp.redirection, range);
  for (int pos : positions) cp.checks.push_back({pos, dev.min[pos], dev.max[pos]});
  cp.bounds = acc_boundaries(requant);
  return cp;
}

KernelPlan build_plan(const Model& model, const ModelProfile& profile,
                      const PlanConfig& config) {
  if (config.check_cost < 0.0) throw InvalidArgument("plan: check_cost must be >= 0");
  if (profile.policy != config.policy) {
    throw ValidationError("plan: profile was recorded with x-range policy '" +
                          std::string(to_string(profile.policy)) + "'");
  }
  KernelPlan plan;
  plan.model_name = model.name;
  plan.check_cost = config.check_cost;
  plan.max_checks = config.max_checks;
  plan.policy = config.policy;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& l = model.layers[i];
    if (!is_accumulating(l.kind)) continue;
    const LayerProfile* lp = profile.find(i);
    const std::string ctx = "plan: layer " + std::to_string(i);
    if (lp == nullptr) throw ValidationError(ctx + " has no profile");
    const int m = l.weights_per_channel();
    if (lp->m != m || lp->channels.size() != static_cast<std::size_t>(l.output_channels())) {
      throw ValidationError(ctx + " profile does not match the model");
    }
    LayerPlan layer;
    layer.layer_index = i;
    layer.fused_reduce_max = model.reduce_max_consumer(i).has_value();
    layer.x_range = layer_input_range(model, i, config.policy);
    if (lp->x_range != layer.x_range) {
      throw ValidationError(ctx + " profile input range does not match");
    }
    std::vector<int> every_step(static_cast<std::size_t>(std::max(m - 1, 0)));
    std::iota(every_step.begin(), every_step.end(), 1);
    for (int c = 0; c < l.output_channels(); ++c) {
      CheckSelection sel;
      if (config.max_checks < 0) {
        sel.positions = every_step;
      } else {
        sel = select_checks(lp->channels[c].cdf(), m, config.max_checks, config.check_cost);
      }
      if (sel.positions.empty()) {
        layer.channels.emplace_back(std::nullopt);
      } else {
        layer.channels.emplace_back(make_channel_plan(l.channel_weights(c), l.requant[c],
                                                      layer.x_range, sel.positions));
      }
    }
    plan.layers.push_back(std::move(layer));
  }
  return plan;
}

void validate(const KernelPlan& plan, const Model& model) {
  if (plan.model_name != model.name) {
    throw ValidationError("plan: built for model '" + plan.model_name + "', not '" +
                          model.name + "'");
  }
  for (const LayerPlan& lp : plan.layers) {
    const std::string ctx = "plan.layers[" + std::to_string(lp.layer_index) + "]";
    if (lp.layer_index >= model.layers.size() ||
        !is_accumulating(model.layers[lp.layer_index].kind)) {
      throw ValidationError(ctx + ": not an accumulating layer");
    }
    const LayerSpec& l = model.layers[lp.layer_index];
    if (lp.channels.size() != static_cast<std::size_t>(l.output_channels())) {
      throw ValidationError(ctx + ".channels: count differs from output channels");
    }
    if (lp.fused_reduce_max && !model.reduce_max_consumer(lp.layer_index)) {
      throw ValidationError(ctx + ".fused_reduce_max: no reduce_max consumer");
    }
    const int m = l.weights_per_channel();
    for (std::size_t c = 0; c < lp.channels.size(); ++c) {
      if (!lp.channels[c]) continue;
      const ChannelPlan& cp = *lp.channels[c];
      const std::string cctx = ctx + ".channels[" + std::to_string(c) + "]";
      if (cp.redirection.size() != static_cast<std::size_t>(m)) {
        throw ValidationError(cctx + ".redirection: length != m");
      }
      std::vector<char> seen(m, 0);
      for (int r : cp.redirection) {
        if (r < 0 || r >= m || seen[r]) {
          throw ValidationError(cctx + ".redirection: not a permutation");
        }
        seen[r] = 1;
      }
      int prev = 0;
      for (const CheckPoint& ck : cp.checks) {
        if (ck.pos <= prev || ck.pos >= m) {
          throw ValidationError(cctx + ".checks: positions must be ascending in [1, m - 1]");
        }
        if (ck.d_min > ck.d_max) throw ValidationError(cctx + ".checks: d_min > d_max");
        prev = ck.pos;
      }
    }
  }
}

namespace {

json bound_json(std::int64_t v, std::int64_t sentinel) {
  return v == sentinel ? json(nullptr) : json(v);
}

std::int64_t bound_from(const json& j, std::int64_t sentinel) {
  return j.is_null() ? sentinel : j.get<std::int64_t>();
}

}  // namespace

std::string plan_to_json(const KernelPlan& plan) {
  json root;
  root["version"] = kPlanFormatVersion;
  root["model_name"] = plan.model_name;
  root["check_cost"] = plan.check_cost;
  root["max_checks"] = plan.max_checks;
  root["x_range_policy"] = std::string(to_string(plan.policy));
  json layers = json::array();
  for (const LayerPlan& lp : plan.layers) {
    json jl;
    jl["layer_index"] = lp.layer_index;
    jl["x_lo"] = lp.x_range.lo;
    jl["x_hi"] = lp.x_range.hi;
    json channels = json::array();
    for (const auto& cp : lp.channels) {
      if (!cp) {
        channels.push_back(nullptr);
        continue;
      }
      json jc;
      jc["redirection"] = cp->redirection;
      json checks = json::array();
      for (const CheckPoint& ck : cp->checks) {
        checks.push_back({{"pos", ck.pos}, {"d_min", ck.d_min}, {"d_max", ck.d_max}});
      }
      jc["checks"] = std::move(checks);
      jc["a_lo"] = bound_json(cp->bounds.lo, AccBounds::kNegInf);
      jc["a_hi"] = bound_json(cp->bounds.hi, AccBounds::kPosInf);
      channels.push_back(std::move(jc));
    }
    jl["channels"] = std::move(channels);
    jl["fused_reduce_max"] = lp.fused_reduce_max;
    layers.push_back(std::move(jl));
  }
  root["layers"] = std::move(layers);
  return root.dump() + "\n";
}

KernelPlan plan_from_json(std::string_view text) {
  KernelPlan plan;
  try {
    const json root = json::parse(text);
    if (root.at("version").get<int>() != kPlanFormatVersion) {
      throw FormatError("plan: unsupported version");
    }
    plan.model_name = root.at("model_name").get<std::string>();
    plan.check_cost = root.at("check_cost").get<double>();
    plan.max_checks = root.value("max_checks", 2);
    plan.policy = parse_x_range_policy(root.value("x_range_policy", "dtype"));
    for (const json& jl : root.at("layers")) {
      LayerPlan lp;
      lp.layer_index = jl.at("layer_index").get<std::size_t>();
      lp.fused_reduce_max = jl.value("fused_reduce_max", false);
      lp.x_range = {jl.value("x_lo", -128), jl.value("x_hi", 127)};
      for (const json& jc : jl.at("channels")) {
        if (jc.is_null()) {
          lp.channels.emplace_back(std::nullopt);
          continue;
        }
        ChannelPlan cp;
        cp.redirection = jc.at("redirection").get<std::vector<int>>();
        for (const json& ck : jc.at("checks")) {
          cp.checks.push_back({ck.at("pos").get<int>(), ck.at("d_min").get<std::int64_t>(),
                               ck.at("d_max").get<std::int64_t>()});
        }
        cp.bounds.lo = bound_from(jc.at("a_lo"), AccBounds::kNegInf);
        cp.bounds.hi = bound_from(jc.at("a_hi"), AccBounds::kPosInf);
        lp.channels.emplace_back(std::move(cp));
      }
      plan.layers.push_back(std::move(lp));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("plan: malformed JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("plan: ") + e.what());
  }
  return plan;
}

std::size_t plan_bytes(const KernelPlan& plan) {
  std::size_t bytes = 0;
  for (const LayerPlan& lp : plan.layers) {
    for (const auto& cp : lp.channels) {
      if (!cp) continue;
      const std::size_t index_bytes = cp->redirection.size() <= 256 ? 1 : 2;
      bytes += index_bytes * cp->redirection.size() + 10 * cp->checks.size() + 8;
    }
  }
  return bytes;
}

PlanOverhead plan_overhead(const KernelPlan& plan, const Model& model) {
  return {plan_bytes(plan), parameter_bytes(model)};
}

}  // namespace satconv
