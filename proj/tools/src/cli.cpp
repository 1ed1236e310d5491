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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "satconv/analysis.hpp"
#include "satconv/error.hpp"
#include "satconv/executor.hpp"
#include "satconv/io.hpp"
#include "satconv/model.hpp"
#include "satconv/plan.hpp"
#include "satconv/presets.hpp"
#include "satconv/profile.hpp"
#include "satconv/ref_kernels.hpp"
#include "satconv/trace.hpp"

#ifndef SATCONV_VERSION
#define SATCONV_VERSION "0.0.0"
#endif

namespace satconv::cli {
namespace {

namespace fs = std::filesystem;

struct Config {
  std::string model_path;
  std::string plan_path;
  std::string profile_path;
  std::string input_path;
  std::string inputs_dir;
  std::string output_path;
  std::string report_path;
  std::string preset;
  std::uint64_t seed = 0;
  std::size_t sample_count = 32;
  int max_checks = 2;
  double check_cost = 4.0;
  std::string x_range;
  std::string mode = "baseline";
  std::string neuron;
  bool no_short_circuit = false;
  bool generic_kernels = false;
};

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void emit(const Config& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output_path.empty()) {
    out << text;
  } else {
    write_text_file(cfg.output_path, text);
  }
}

std::vector<QuantTensor> load_inputs(const Model& model, const Config& cfg) {
  if (cfg.inputs_dir.empty()) return random_inputs(model, cfg.sample_count, cfg.seed);
  std::error_code ec;
  if (!fs::is_directory(cfg.inputs_dir, ec)) {
    throw FormatError("cannot open directory '" + cfg.inputs_dir + "'");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(cfg.inputs_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".sact") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw FormatError("'" + cfg.inputs_dir + "' holds no .sact files");
  std::sort(files.begin(), files.end());
  std::vector<QuantTensor> inputs;
  inputs.reserve(files.size());
  for (const fs::path& p : files) inputs.push_back(load_tensor(p, model.input_quant));
  return inputs;
}

XRangePolicy policy_of(const Config& cfg) {
  return cfg.x_range.empty() ? XRangePolicy::kDtype : parse_x_range_policy(cfg.x_range);
}

KernelPlan load_plan(const Config& cfg, const Model& model) {
  const std::string text = read_text_file(cfg.plan_path);
  KernelPlan plan;
  try {
    plan = plan_from_json(text);
  } catch (const Error& e) {
    throw FormatError(cfg.plan_path + ": " + e.what());
  }
  try {
    validate(plan, model);
  } catch (const ValidationError& e) {
    throw ValidationError(cfg.plan_path + ": " + e.what());
  }
  return plan;
}

int cmd_gen(const Config& cfg, std::ostream& out) {
  if (cfg.preset.empty() == cfg.model_path.empty()) {
    throw InvalidArgument("gen: give exactly one of --preset or --model");
  }
  if (!cfg.preset.empty()) {
    const Model model = gen_synthetic(cfg.preset, cfg.seed);
    save_model(model, cfg.output_path);
    out << "wrote " << cfg.output_path << " (" << model.name << ", " << model.layers.size()
        << " layers, " << parameter_bytes(model) << " parameter bytes)\n";
  } else {
    const Model model = load_model(cfg.model_path);
    save_tensor(random_input(model.input_shape, model.input_quant, cfg.seed), cfg.output_path);
    out << "wrote " << cfg.output_path << " (input " << model.input_shape.str() << ")\n";
  }
  return kOk;
}

int cmd_analyze(const Config& cfg, std::ostream& out) {
  const Model model = load_model(cfg.model_path);
  const auto inputs = load_inputs(model, cfg);
  emit(cfg, out, analysis_csv(analyze_stats(model, inputs, policy_of(cfg))));
  return kOk;
}

int cmd_profile(const Config& cfg, std::ostream& out) {
  const Model model = load_model(cfg.model_path);
  const auto inputs = load_inputs(model, cfg);
  const ModelProfile profile = profile_model(model, inputs, policy_of(cfg));
  write_text_file(cfg.output_path, profile_to_json(profile));
  out << "wrote " << cfg.output_path << " (" << profile.layers.size() << " layers, "
      << inputs.size() << " inputs)\n";
  return kOk;
}

int cmd_plan(const Config& cfg, std::ostream& out) {
  const Model model = load_model(cfg.model_path);
  ModelProfile profile;
  if (!cfg.profile_path.empty()) {
    const std::string text = read_text_file(cfg.profile_path);
    try {
      profile = profile_from_json(text);
    } catch (const Error& e) {
      throw FormatError(cfg.profile_path + ": " + e.what());
    }
  } else {
    profile = profile_model(model, load_inputs(model, cfg), policy_of(cfg));
  }
  PlanConfig config;
  config.max_checks = cfg.max_checks;
  config.check_cost = cfg.check_cost;
  config.policy = cfg.x_range.empty() ? profile.policy : policy_of(cfg);
  const KernelPlan plan = build_plan(model, profile, config);
  write_text_file(cfg.output_path, plan_to_json(plan));
  std::size_t channels = 0;
  std::size_t instrumented = 0;
  for (const LayerPlan& lp : plan.layers) {
    channels += lp.channels.size();
    instrumented += lp.instrumented();
  }
  const PlanOverhead overhead = plan_overhead(plan, model);
  out << "wrote " << cfg.output_path << " (" << instrumented << "/" << channels
      << " channels instrumented, plan_bytes=" << overhead.plan_bytes
      << " model_bytes=" << overhead.model_bytes
      << " plan_overhead=" << fmt(100.0 * overhead.ratio()) << "%)\n";
  return kOk;
}

exec::ExecOptions exec_options(const Config& cfg) {
  exec::ExecOptions opts;
  opts.high_short_circuit = !cfg.no_short_circuit;
  opts.variant = cfg.generic_kernels ? exec::KernelVariant::kGeneric
                                     : exec::KernelVariant::kSpecialized;
  return opts;
}

int cmd_run(const Config& cfg, std::ostream& out) {
  const Model model = load_model(cfg.model_path);
  const exec::Mode mode = cfg.mode == "sat" ? exec::Mode::kSat : exec::Mode::kBaseline;
  std::optional<KernelPlan> plan;
  if (mode == exec::Mode::kSat) {
    if (cfg.plan_path.empty()) throw InvalidArgument("run: --mode sat requires --plan");
    plan = load_plan(cfg, model);
  }
  const QuantTensor input = load_tensor(cfg.input_path, model.input_quant);
  const exec::RunResult result =
      exec::run_inference(model, plan ? &*plan : nullptr, input, mode, exec_options(cfg));
  if (!cfg.output_path.empty()) save_tensor(result.output, cfg.output_path);
  if (!cfg.report_path.empty()) write_text_file(cfg.report_path, exec::report_csv(result.report));

  out << "output " << result.output.shape().str()
      << " argmax=" << ref::argmax(result.output.data()) << "\nvalues";
  for (const std::int8_t v : result.output.data()) out << ' ' << static_cast<int>(v);
  const exec::LayerCounters t = result.report.totals();
  out << "\nmacs_total=" << t.macs_total << " macs_executed=" << t.macs_executed
      << " macs_omitted=" << t.macs_omitted << "\n";
  return kOk;
}

int cmd_bench(const Config& cfg, std::ostream& out, std::ostream& err) {
  const Model model = load_model(cfg.model_path);
  const KernelPlan plan = load_plan(cfg, model);
  const auto inputs = load_inputs(model, cfg);
  const exec::ExecOptions opts = exec_options(cfg);

  const exec::ComparisonReport cmp = exec::compare_modes(model, plan, inputs, opts);
  const exec::LayerCounters t = cmp.sat_totals.totals();
  for (const exec::LayerReport& l : cmp.sat_totals.layers) {
    const exec::LayerCounters& c = l.counters;
    if (c.macs_executed + c.macs_omitted != c.macs_total) {
      throw InvariantViolation("layer " + std::to_string(l.layer_index) +
                               ": macs_executed + macs_omitted != macs_total");
    }
  }

  using Clock = std::chrono::steady_clock;
  const auto time_mode = [&](exec::Mode mode) {
    const auto start = Clock::now();
    for (const QuantTensor& in : inputs) exec::run_inference(model, &plan, in, mode, opts);
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };
  const double base_ms = time_mode(exec::Mode::kBaseline);
  const double sat_ms = time_mode(exec::Mode::kSat);

  const PlanOverhead overhead = plan_overhead(plan, model);
  std::ostringstream summary;
  summary << "model=" << model.name << " inputs=" << cmp.inputs.size()
          << " equality=" << fmt(cmp.equality_pct()) << "%\n"
          << "macs_total=" << t.macs_total << " macs_executed=" << t.macs_executed
          << " macs_omitted=" << t.macs_omitted << " checks_executed=" << t.checks_executed
          << "\n"
          << "omitted_pct mean=" << fmt(cmp.mean_omitted_pct)
          << " max=" << fmt(cmp.max_omitted_pct) << "\n"
          << "estimated_saving_pct mean=" << fmt(cmp.mean_saving_pct)
          << " max=" << fmt(cmp.max_saving_pct) << " check_cost=" << fmt(plan.check_cost)
          << "\n"
          << "plan_bytes=" << overhead.plan_bytes << " model_bytes=" << overhead.model_bytes
          << " plan_overhead=" << fmt(100.0 * overhead.ratio()) << "%\n";
  out << summary.str();
  const std::string csv = exec::report_csv(cmp.sat_totals);
  if (cfg.output_path.empty()) {
    out << csv;
  } else {
    write_text_file(cfg.output_path, csv);
  }
  err << "wall_ms baseline=" << fmt(base_ms) << " sat=" << fmt(sat_ms) << "\n";

  if (cmp.equal_count != cmp.inputs.size()) {
    for (std::size_t k = 0; k < cmp.inputs.size(); ++k) {
      if (!cmp.inputs[k].equal) {
        err << "error: sat output differs from baseline on input " << k << "\n";
      }
    }
    return kInvariant;
  }
  return kOk;
}

struct Neuron {
  std::size_t layer = 0;
  int channel = 0;
  int y = 0;
  int x = 0;
};

Neuron parse_neuron(const std::string& text) {
  Neuron n;
  long long l = -1;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lld:%d:%d:%d%c", &l, &n.channel, &n.y, &n.x, &tail) != 4 ||
      l < 0) {
    throw InvalidArgument("--neuron: expected L:C:Y:X, got '" + text + "'");
  }
  n.layer = static_cast<std::size_t>(l);
  return n;
}

int cmd_trace(const Config& cfg, std::ostream& out) {
  const Neuron n = parse_neuron(cfg.neuron);
  const Model model = load_model(cfg.model_path);
  std::optional<KernelPlan> plan;
  if (!cfg.plan_path.empty()) plan = load_plan(cfg, model);
  const QuantTensor input = cfg.input_path.empty()
                                ? random_input(model.input_shape, model.input_quant, cfg.seed)
                                : load_tensor(cfg.input_path, model.input_quant);
  if (input.shape() != model.input_shape) {
    throw ValidationError("input shape " + input.shape().str() + " does not match model input " +
                          model.input_shape.str());
  }
  const auto rows = exec::trace_neuron(model, plan ? &*plan : nullptr, input, n.layer,
                                       n.channel, n.y, n.x);
  emit(cfg, out, exec::trace_csv(rows));
  return kOk;
}

void add_inputs(CLI::App* cmd, Config& cfg) {
  auto* count = cmd->add_option("--inputs", cfg.sample_count, "Number of generated inputs")
                    ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  cmd->add_option("--seed", cfg.seed, "Seed of the first generated input");
  cmd->add_option("--inputs-dir", cfg.inputs_dir, "Directory of .sact inputs")->excludes(count);
}

void add_x_range(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--x-range", cfg.x_range, "Input range policy for deviation bounds")
      ->check(CLI::IsMember({"dtype", "producer-clamp"}));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Saturation-aware int8 convolution toolkit", "satconv"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string("satconv ") + SATCONV_VERSION + " (sacnn v" +
                           std::to_string(kModelFormatVersion) + ", sact v" +
                           std::to_string(kTensorFormatVersion) + ", plan v" +
                           std::to_string(kPlanFormatVersion) + ", profile v" +
                           std::to_string(kProfileFormatVersion) + ")");

  std::string preset_list;
  for (const std::string_view p : preset_names()) {
    preset_list += (preset_list.empty() ? "" : ", ") + std::string(p);
  }

  auto* gen = app.add_subcommand("gen", "Generate a synthetic model or a random input tensor");
  auto* preset = gen->add_option("--preset", cfg.preset, "Preset: " + preset_list);
  gen->add_option("--model", cfg.model_path, "Emit a random .sact input for this model")
      ->excludes(preset);
  gen->add_option("--seed", cfg.seed, "Generator seed");
  gen->add_option("-o,--output", cfg.output_path, "Output path")->required();

  auto* analyze = app.add_subcommand("analyze", "Saturation, effectless and omittable statistics");
  analyze->add_option("model", cfg.model_path, "Model (.sacnn)")->required();
  add_inputs(analyze, cfg);
  add_x_range(analyze, cfg);
  analyze->add_option("-o,--output", cfg.output_path, "CSV path (default stdout)");

  auto* profile = app.add_subcommand("profile", "Record per-channel trigger histograms");
  profile->add_option("model", cfg.model_path, "Model (.sacnn)")->required();
  add_inputs(profile, cfg);
  add_x_range(profile, cfg);
  profile->add_option("-o,--output", cfg.output_path, "Profile path (.json)")->required();

  auto* plan = app.add_subcommand("plan", "Select saturation checks and write a kernel plan");
  plan->add_option("model", cfg.model_path, "Model (.sacnn)")->required();
  plan->add_option("--profile", cfg.profile_path, "Profile (.json); profiled on the fly if absent");
  add_inputs(plan, cfg);
  add_x_range(plan, cfg);
  plan->add_option("--max-checks", cfg.max_checks, "Checks per channel; -1 checks every step")
      ->check(CLI::Range(-1, 1 << 20));
  plan->add_option("--check-cost", cfg.check_cost, "Cost of one check in MACs")
      ->check(CLI::Range(0.0, 1e9));
  plan->add_option("-o,--output", cfg.output_path, "Plan path (.json)")->required();

  auto* run_cmd = app.add_subcommand("run", "Run one inference");
  run_cmd->add_option("model", cfg.model_path, "Model (.sacnn)")->required();
  run_cmd->add_option("--input", cfg.input_path, "Input tensor (.sact)")->required();
  run_cmd->add_option("--mode", cfg.mode, "baseline or sat")
      ->check(CLI::IsMember({"baseline", "sat"}));
  run_cmd->add_option("--plan", cfg.plan_path, "Kernel plan (.json), required for sat");
  run_cmd->add_option("-o,--output", cfg.output_path, "Output tensor path (.sact)");
  run_cmd->add_option("--report", cfg.report_path, "Per-layer counter CSV path");
  run_cmd->add_flag("--no-short-circuit", cfg.no_short_circuit,
                    "Keep evaluating fused positions after a high exit");
  run_cmd->add_flag("--generic", cfg.generic_kernels, "Use the generic check loop");

  auto* bench = app.add_subcommand("bench", "Compare sat mode with baseline over many inputs");
  bench->add_option("model", cfg.model_path, "Model (.sacnn)")->required();
  bench->add_option("--plan", cfg.plan_path, "Kernel plan (.json)")->required();
  add_inputs(bench, cfg);
  bench->add_option("-o,--output", cfg.output_path, "Per-layer CSV path (default stdout)");
  bench->add_flag("--no-short-circuit", cfg.no_short_circuit,
                  "Keep evaluating fused positions after a high exit");
  bench->add_flag("--generic", cfg.generic_kernels, "Use the generic check loop");

  auto* trace = app.add_subcommand("trace", "Trace one neuron's reordered accumulation");
  trace->add_option("model", cfg.model_path, "Model (.sacnn)")->required();
  trace->add_option("--plan", cfg.plan_path, "Kernel plan (.json)");
  trace->add_option("--neuron", cfg.neuron, "Layer:channel:y:x")->required();
  trace->add_option("--input", cfg.input_path, "Input tensor (.sact); random from --seed if absent");
  trace->add_option("--seed", cfg.seed, "Seed of the random input");
  trace->add_option("-o,--output", cfg.output_path, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(cfg, out);
    if (analyze->parsed()) return cmd_analyze(cfg, out);
    if (profile->parsed()) return cmd_profile(cfg, out);
    if (plan->parsed()) return cmd_plan(cfg, out);
    if (run_cmd->parsed()) return cmd_run(cfg, out);
    if (bench->parsed()) return cmd_bench(cfg, out, err);
    if (trace->parsed()) return cmd_trace(cfg, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariant;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariant;
  }
  return kUsage;
}

}  // namespace satconv::cli
