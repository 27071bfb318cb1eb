// Copyright 2026 The qelm authors
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

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "qelm/config.hpp"
#include "qelm/results_io.hpp"

namespace {

// Output base path (no extension) for one run: --out wins, then the
// QELM_OUT_DIR environment variable, then the working directory. The stem
// is the preset name or the config file stem, plus the per-run suffix.
std::string output_base(const std::string& out_flag, const std::string& stem,
                        const std::string& suffix) {
  if (!out_flag.empty()) {
    return out_flag + suffix;
  }
  std::filesystem::path dir = ".";
  if (const char* env = std::getenv("QELM_OUT_DIR"); env != nullptr && *env != '\0') {
    dir = env;
  }
  return (dir / (stem + suffix)).string();
}

int run_command(const std::string& target, const std::string& out_flag,
                const std::string& format_name, bool quick, bool has_seed,
                std::uint64_t seed, bool has_threads, int threads,
                const std::vector<std::string>& overrides) {
  using qelm::RunPlan;

  std::vector<RunPlan> plans;
  std::string stem;
  if (const auto preset = qelm::preset_from_string(target)) {
    plans = qelm::plan_preset(*preset, quick);
    stem = qelm::preset_name(*preset);
  } else if (std::filesystem::exists(target)) {
    qelm::ExperimentConfig config = qelm::parse_config_file(target);
    if (quick) {
      qelm::apply_quick_scaling(config);
    }
    plans = qelm::plan_config(config);
    stem = std::filesystem::path(target).stem().string();
  } else {
    std::string names;
    for (const qelm::Preset p : qelm::all_presets()) {
      if (!names.empty()) {
        names += ", ";
      }
      names += qelm::preset_name(p);
    }
    throw std::invalid_argument("'" + target +
                                "' is neither a preset (" + names +
                                ") nor an existing config file");
  }

  const qelm::OutputFormat format = format_name == "json"
                                        ? qelm::OutputFormat::kJson
                                        : qelm::OutputFormat::kCsv;
  for (RunPlan& plan : plans) {
    if (has_seed) {
      plan.config.master_seed = seed;
    }
    if (has_threads) {
      plan.config.threads = threads;
    }
    for (const std::string& override_arg : overrides) {
      const std::size_t eq = override_arg.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("--set expects key=value, got '" +
                                    override_arg + "'");
      }
      qelm::apply_override(plan.config, override_arg.substr(0, eq),
                           override_arg.substr(eq + 1));
    }
    plan.config.validate();
  }

  for (const RunPlan& plan : plans) {
    const auto start = std::chrono::steady_clock::now();
    const std::string base = output_base(out_flag, stem, plan.suffix);
    std::vector<std::string> paths;
    if (plan.kind == RunPlan::Kind::kGeneralization) {
      const qelm::GeneralizationRun result = qelm::run_generalization(plan.config);
      paths = qelm::emit_results(plan, result, format, base);
    } else {
      const qelm::SweepResult result = qelm::run_sweep(plan.config);
      paths = qelm::emit_results(plan, result, format, base);
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    for (const std::string& path : paths) {
      std::cout << "wrote " << path << "\n";
    }
    std::cout << "done in " << qelm::format_double(elapsed) << " s\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Quantum extreme learning machine: estimates the mixing parameter of "
      "Werner inputs from single-qubit measurements of a random Ising "
      "reservoir."};
  app.require_subcommand(1);

  std::string target;
  std::string out_flag;
  std::string format_name = "csv";
  bool quick = false;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<std::string> overrides;

  CLI::App* run = app.add_subcommand(
      "run", "Run a named preset or a key=value config file");
  run->add_option("target", target,
                  "Preset name (fig1-scatter, fig2-h-sweep, fig3-dt-sweep, "
                  "fig4-shots, fig5-generalization, figA1-extended) or config "
                  "file path")
      ->required();
  run->add_option("--out", out_flag,
                  "Output base path without extension (default: preset/config "
                  "stem inside $QELM_OUT_DIR or the working directory)");
  run->add_option("--format", format_name, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_flag("--quick", quick,
                "Scale the run down (3 realizations, 40 train/test inputs)");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "Master seed (fully determines output bytes)");
  CLI::Option* threads_opt =
      run->add_option("--threads", threads,
                      "Worker threads over realizations (0 = hardware, "
                      "result bytes are thread-count independent)");
  run->add_option("--set", overrides,
                  "Config override key=value (repeatable; config-file keys)");

  CLI11_PARSE(app, argc, argv);

  try {
    return run_command(target, out_flag, format_name, quick,
                       seed_opt->count() > 0, seed, threads_opt->count() > 0,
                       threads, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
