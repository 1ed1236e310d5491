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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "satconv/check_select.hpp"
#include "satconv/executor.hpp"
#include "satconv/plan.hpp"
#include "satconv/presets.hpp"
#include "satconv/profile.hpp"
#include "satconv/splitmix64.hpp"

namespace {

using namespace satconv;

const char* const kPresets[] = {"tiny", "har-like", "gmp-like", "mnist-like", "sat-heavy"};

struct Fixture {
  Model model;
  KernelPlan plan;
  std::vector<QuantTensor> inputs;
};

const Fixture& fixture(int preset) {
  static std::vector<Fixture> cache = [] {
    std::vector<Fixture> all;
    for (const char* name : kPresets) {
      Fixture f;
      f.model = gen_synthetic(name, 0);
      f.plan = build_plan(f.model, profile_model(f.model, random_inputs(f.model, 32, 1000)));
      f.inputs = random_inputs(f.model, 16, 0);
      all.push_back(std::move(f));
    }
    return all;
  }();
  return cache[static_cast<std::size_t>(preset)];
}

void run_model(benchmark::State& state, exec::Mode mode) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  state.SetLabel(kPresets[state.range(0)]);
  std::size_t i = 0;
  std::uint64_t macs = 0;
  for (auto _ : state) {
    const exec::RunResult r =
        exec::run_inference(f.model, &f.plan, f.inputs[i++ % f.inputs.size()], mode);
    macs += r.report.totals().macs_executed;
    benchmark::DoNotOptimize(r.output.data().data());
  }
  state.counters["macs_executed/inf"] =
      benchmark::Counter(static_cast<double>(macs) / static_cast<double>(state.iterations()));
}

void BM_Baseline(benchmark::State& state) { run_model(state, exec::Mode::kBaseline); }
void BM_Sat(benchmark::State& state) { run_model(state, exec::Mode::kSat); }

BENCHMARK(BM_Baseline)->DenseRange(0, 4);
BENCHMARK(BM_Sat)->DenseRange(0, 4);

void BM_SatDot(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto variant = state.range(1) ? exec::KernelVariant::kGeneric
                                      : exec::KernelVariant::kSpecialized;
  SplitMix64 rng(7);
  std::vector<std::int8_t> w(m);
  std::vector<std::int8_t> x(m);
  for (auto& v : w) v = rng.next_int8();
  for (auto& v : x) v = rng.next_int8();
  RequantParams rq;
  rq.shift = 12;
  const std::vector<int> pos = {m / 3, (2 * m) / 3};
  const ChannelPlan cp = make_channel_plan(w, rq, {-128, 127}, pos);
  exec::LayerCounters counters;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exec::sat_dot(x, w, 0, 0, cp, std::nullopt, counters, variant));
  }
}
BENCHMARK(BM_SatDot)->ArgsProduct({{18, 72, 288}, {0, 1}});

void BM_SelectChecks(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  SplitMix64 rng(3);
  std::vector<double> cdf(m - 1);
  double p = 0.0;
  for (double& v : cdf) {
    p += (1.0 - p) * rng.next_unit() * 0.05;
    v = p;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_checks(cdf, m, static_cast<int>(state.range(1)), 4.0));
  }
}
BENCHMARK(BM_SelectChecks)->ArgsProduct({{18, 288}, {2, 4}});

void BM_Profile(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  state.SetLabel(kPresets[state.range(0)]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(profile_model(f.model, f.inputs));
  }
}
BENCHMARK(BM_Profile)->DenseRange(0, 4);

}  // namespace

BENCHMARK_MAIN();
