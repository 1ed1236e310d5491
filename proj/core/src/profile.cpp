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

#include "satconv/profile.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "satconv/error.hpp"
#include "satconv/ref_kernels.hpp"

namespace satconv {

using json = nlohmann::ordered_json;

namespace {

struct ChannelSetup {
  std::vector<int> redirection;
  DeviationTable dev;
  AccBounds bounds;
};

std::vector<ChannelSetup> channel_setups(const LayerSpec& layer, InputRange range) {
  std::vector<ChannelSetup> setups;
  setups.reserve(layer.output_channels());
  for (int c = 0; c < layer.output_channels(); ++c) {
    ChannelSetup s;
    const auto w = layer.channel_weights(c);
    s.redirection = build_redirection(w);
    s.dev = deviation_tables(w, s.redirection, range);
    s.bounds = acc_boundaries(layer.requant[c]);
    setups.push_back(std::move(s));
  }
  return setups;
}

LayerProfile empty_profile(const Model& model, std::size_t layer_index,
                           XRangePolicy policy) {
  if (layer_index >= model.layers.size() ||
      !is_accumulating(model.layers[layer_index].kind)) {
    throw InvalidArgument("profile: layer " + std::to_string(layer_index) +
                          " is not conv2d, dwconv2d or fully_connected");
  }
  const LayerSpec& layer = model.layers[layer_index];
  LayerProfile p;
  p.layer_index = layer_index;
  p.m = layer.weights_per_channel();
  p.x_range = layer_input_range(model, layer_index, policy);
  p.dynamic = model.reduce_max_consumer(layer_index).has_value();
  p.channels.resize(layer.output_channels());
  for (ChannelProfile& c : p.channels) c.hits.assign(std::max(p.m - 1, 0), 0);
  return p;
}

void accumulate(const LayerSpec& layer, const QuantTensor& input,
                const std::vector<ChannelSetup>& setups, LayerProfile& prof) {
  const std::int32_t zx = input.quant().zero_point;
  std::vector<std::int8_t> scratch;
  for (int n = 0; n < input.shape().n; ++n) {
    const ref::LayerPatches patches(input, layer, n);
    for (int c = 0; c < layer.output_channels(); ++c) {
      const ChannelSetup& s = setups[c];
      const auto w = layer.channel_weights(c);
      ChannelProfile& cp = prof.channels[c];
      std::int64_t best = s.bounds.lo;
      for (int pos = 0; pos < patches.positions(); ++pos) {
        const auto x = patches.patch(pos, c, scratch);
        AccBounds bounds = s.bounds;
        if (prof.dynamic) bounds.lo = std::max(bounds.lo, best);
        const auto trig = earliest_trigger(w, s.redirection, s.dev, x,
                                           layer.bias[c], zx, bounds);
        if (trig) ++cp.hits[trig->step - 1];
        ++cp.sample_count;
        if (prof.dynamic) {
          best = std::max<std::int64_t>(best, ref::dot_ref(x, w, layer.bias[c], zx));
        }
      }
    }
  }
}

}  // namespace

std::string_view to_string(XRangePolicy policy) {
  return policy == XRangePolicy::kDtype ? "dtype" : "producer-clamp";
}

XRangePolicy parse_x_range_policy(std::string_view name) {
  if (name == "dtype") return XRangePolicy::kDtype;
  if (name == "producer-clamp") return XRangePolicy::kProducerClamp;
  throw InvalidArgument("unknown x-range policy '" + std::string(name) + "'");
}

InputRange layer_input_range(const Model& model, std::size_t layer_index,
                             XRangePolicy policy) {
  const std::int32_t zx = model.layers.at(layer_index).input_quant.zero_point;
  const InputRange full = InputRange::for_zero_point(zx);
  if (policy == XRangePolicy::kDtype) return full;
  // Max-pooling and reduce-max only select among their inputs, so the range
  // of the nearest accumulating producer still applies.
  for (std::size_t i = layer_index; i-- > 0;) {
    const LayerSpec& l = model.layers[i];
    if (!is_accumulating(l.kind)) continue;
    std::int32_t lo = 127;
    std::int32_t hi = -128;
    for (const RequantParams& p : l.requant) {
      lo = std::min(lo, p.q_lo);
      hi = std::max(hi, p.q_hi);
    }
    // Keep 0 inside the range; padding contributes x - zx = 0.
    return {std::min(lo - zx, 0), std::max(hi - zx, 0)};
  }
  return full;
}

std::vector<double> ChannelProfile::cdf() const {
  std::vector<double> p(hits.size(), 0.0);
  if (sample_count == 0) return p;
  std::uint64_t cumulative = 0;
  for (std::size_t j = 0; j < hits.size(); ++j) {
    cumulative += hits[j];
    p[j] = static_cast<double>(cumulative) / static_cast<double>(sample_count);
  }
  return p;
}

const LayerProfile* ModelProfile::find(std::size_t layer_index) const {
  for (const LayerProfile& l : layers) {
    if (l.layer_index == layer_index) return &l;
  }
  return nullptr;
}

LayerProfile profile_layer(const Model& model, std::size_t layer_index,
                           std::span<const QuantTensor> samples, XRangePolicy policy) {
  LayerProfile prof = empty_profile(model, layer_index, policy);
  if (samples.empty()) throw InvalidArgument("profile: at least one sample input required");
  const LayerSpec& layer = model.layers[layer_index];
  const auto setups = channel_setups(layer, prof.x_range);
  for (const QuantTensor& sample : samples) {
    const QuantTensor* input = &sample;
    std::vector<QuantTensor> outputs;
    if (layer_index > 0) {
      QuantTensor current = sample;
      for (std::size_t i = 0; i < layer_index; ++i) {
        current = ref::run_layer_ref(current, model.layers[i]);
      }
      outputs.push_back(std::move(current));
      input = &outputs.back();
    }
    accumulate(layer, *input, setups, prof);
    ++prof.inputs;
  }
  return prof;
}

ModelProfile profile_model(const Model& model, std::span<const QuantTensor> samples,
                           XRangePolicy policy) {
  if (samples.empty()) throw InvalidArgument("profile: at least one sample input required");
  ModelProfile result;
  result.model_name = model.name;
  result.policy = policy;
  std::vector<std::vector<ChannelSetup>> setups(model.layers.size());
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    if (!is_accumulating(model.layers[i].kind)) continue;
    result.layers.push_back(empty_profile(model, i, policy));
    setups[i] = channel_setups(model.layers[i], result.layers.back().x_range);
  }
  for (const QuantTensor& sample : samples) {
    const std::vector<QuantTensor> outputs = ref::run_model_ref(model, sample);
    for (LayerProfile& prof : result.layers) {
      const std::size_t i = prof.layer_index;
      const QuantTensor& input = i == 0 ? sample : outputs[i - 1];
      accumulate(model.layers[i], input, setups[i], prof);
      ++prof.inputs;
    }
  }
  return result;
}

void merge(LayerProfile& into, const LayerProfile& other) {
  if (into.layer_index != other.layer_index || into.m != other.m ||
      into.channels.size() != other.channels.size() || into.x_range != other.x_range ||
      into.dynamic != other.dynamic) {
    throw InvalidArgument("merge: profile layouts differ");
  }
  into.inputs += other.inputs;
  for (std::size_t c = 0; c < into.channels.size(); ++c) {
    ChannelProfile& a = into.channels[c];
    const ChannelProfile& b = other.channels[c];
    a.sample_count += b.sample_count;
    for (std::size_t j = 0; j < a.hits.size(); ++j) a.hits[j] += b.hits[j];
  }
}

std::string profile_to_json(const ModelProfile& profile) {
  json root;
  root["version"] = kProfileFormatVersion;
  root["model_name"] = profile.model_name;
  root["x_range_policy"] = std::string(to_string(profile.policy));
  json layers = json::array();
  for (const LayerProfile& l : profile.layers) {
    json jl;
    jl["layer_index"] = l.layer_index;
    jl["m"] = l.m;
    jl["inputs"] = l.inputs;
    jl["x_lo"] = l.x_range.lo;
    jl["x_hi"] = l.x_range.hi;
    jl["dynamic"] = l.dynamic;
    json channels = json::array();
    for (const ChannelProfile& c : l.channels) {
      json jc;
      jc["m"] = l.m;
      jc["sample_count"] = c.sample_count;
      jc["cdf"] = c.cdf();
      jc["hits"] = c.hits;
      channels.push_back(std::move(jc));
    }
    jl["channels"] = std::move(channels);
    layers.push_back(std::move(jl));
  }
  root["layers"] = std::move(layers);
  return root.dump() + "\n";
}

ModelProfile profile_from_json(std::string_view text) {
  ModelProfile profile;
  try {
    const json root = json::parse(text);
    if (root.at("version").get<int>() != kProfileFormatVersion) {
      throw FormatError("profile: unsupported version");
    }
    profile.model_name = root.at("model_name").get<std::string>();
    profile.policy = parse_x_range_policy(root.value("x_range_policy", "dtype"));
    for (const json& jl : root.at("layers")) {
      LayerProfile l;
      l.layer_index = jl.at("layer_index").get<std::size_t>();
      l.m = jl.at("m").get<int>();
      l.inputs = jl.value("inputs", std::uint64_t{0});
      l.x_range = {jl.at("x_lo").get<std::int32_t>(), jl.at("x_hi").get<std::int32_t>()};
      l.dynamic = jl.value("dynamic", false);
      for (const json& jc : jl.at("channels")) {
        ChannelProfile c;
        c.sample_count = jc.at("sample_count").get<std::uint64_t>();
        const std::size_t steps = static_cast<std::size_t>(std::max(l.m - 1, 0));
        if (jc.contains("hits")) {
          c.hits = jc.at("hits").get<std::vector<std::uint64_t>>();
        } else {
          const auto cdf = jc.at("cdf").get<std::vector<double>>();
          if (cdf.size() != steps) throw FormatError("profile: cdf length != m - 1");
          std::uint64_t prev = 0;
          for (double p : cdf) {
            const auto cum = static_cast<std::uint64_t>(
                std::llround(p * static_cast<double>(c.sample_count)));
            if (cum < prev) throw ValidationError("profile: cdf must be nondecreasing");
            c.hits.push_back(cum - prev);
            prev = cum;
          }
        }
        if (c.hits.size() != steps) {
          throw ValidationError("profile: layer " + std::to_string(l.layer_index) +
                                " histogram length != m - 1");
        }
        std::uint64_t total = 0;
        for (auto h : c.hits) total += h;
        if (total > c.sample_count) {
          throw ValidationError("profile: layer " + std::to_string(l.layer_index) +
                                " hits exceed sample_count");
        }
        l.channels.push_back(std::move(c));
      }
      profile.layers.push_back(std::move(l));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("profile: malformed JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("profile: ") + e.what());
  }
  return profile;
}

}  // namespace satconv
