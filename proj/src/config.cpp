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

#include "qelm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qelm/format.hpp"

namespace qelm {

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> values(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    values[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) /
                                   static_cast<double>(count - 1));
  }
  return values;
}

std::string trim(const std::string& s) {
  const std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    items.push_back(trim(item));
  }
  return items;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: invalid value '" + value + "' for key '" +
                              key + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const double parsed = std::stod(value, &consumed);
    if (consumed != value.size() || !std::isfinite(parsed)) {
      bad_value(key, value);
    }
    return parsed;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const int parsed = std::stoi(value, &consumed);
    if (consumed != value.size()) {
      bad_value(key, value);
    }
    return parsed;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const std::uint64_t parsed = std::stoull(value, &consumed);
    if (consumed != value.size()) {
      bad_value(key, value);
    }
    return parsed;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") {
    return true;
  }
  if (value == "false") {
    return false;
  }
  bad_value(key, value);
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  for (const std::string& item : split_list(value)) {
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) {
    bad_value(key, value);
  }
  return out;
}

CorrelationOrder parse_correlation_order(const std::string& key,
                                         const std::string& value) {
  if (value == "local-z") {
    return CorrelationOrder::kLocalZ;
  }
  if (value == "local-plus-zz") {
    return CorrelationOrder::kLocalPlusZZ;
  }
  bad_value(key, value);
}

void set_field(ExperimentConfig& config, const std::string& key,
               const std::string& value) {
  if (key == "reservoir.n_qubits") {
    config.reservoir.n_qubits = parse_int(key, value);
  } else if (key == "reservoir.field_strength") {
    config.reservoir.field_strength = parse_double(key, value);
  } else if (key == "reservoir.coupling_scale") {
    config.reservoir.coupling_scale = parse_double(key, value);
  } else if (key == "field_sweep") {
    config.field_values = parse_double_list(key, value);
  } else if (key == "delta_t") {
    config.delta_t_values = parse_double_list(key, value);
  } else if (key == "epsilon_list") {
    config.epsilon_list = parse_double_list(key, value);
  } else if (key == "shots") {
    std::vector<ShotPlan> plans;
    for (const std::string& item : split_list(value)) {
      if (item == "exact") {
        plans.push_back(ShotPlan::exact());
      } else {
        const int n = parse_int(key, item);
        if (n < 1) {
          bad_value(key, item);
        }
        plans.push_back(ShotPlan::finite(n));
      }
    }
    if (plans.empty()) {
      bad_value(key, value);
    }
    config.shot_plans = std::move(plans);
  } else if (key == "features.include_bias") {
    const bool bias = parse_bool(key, value);
    for (FeatureSpec& spec : config.feature_variants) {
      spec.include_bias = bias;
    }
  } else if (key == "features.correlation_order") {
    const bool bias = config.feature_variants.front().include_bias;
    std::vector<FeatureSpec> variants;
    for (const std::string& item : split_list(value)) {
      variants.push_back(FeatureSpec{bias, parse_correlation_order(key, item)});
    }
    if (variants.empty()) {
      bad_value(key, value);
    }
    config.feature_variants = std::move(variants);
  } else if (key == "n_train") {
    config.n_train = parse_int(key, value);
  } else if (key == "n_test") {
    config.n_test = parse_int(key, value);
  } else if (key == "realizations") {
    config.realizations = parse_int(key, value);
  } else if (key == "input_qubits_train") {
    config.input_qubits_train = parse_int(key, value);
  } else if (key == "input_qubits_test") {
    config.input_qubits_test = parse_int(key, value);
  } else if (key == "master_seed") {
    config.master_seed = parse_u64(key, value);
  } else if (key == "threads") {
    config.threads = parse_int(key, value);
  } else if (key == "resample_reservoir_state") {
    config.resample_reservoir_state = parse_bool(key, value);
  } else if (key == "ridge_lambda") {
    config.ridge_lambda = parse_double(key, value);
  } else if (key == "allow_underdetermined") {
    config.allow_underdetermined = parse_bool(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig base_config() {
  ExperimentConfig config;
  config.reservoir = ReservoirSpec{5, 0.1, 1.0, 0};
  config.delta_t_values = {10.0};
  config.epsilon_list = {0.0};
  config.shot_plans = {ShotPlan::exact()};
  config.feature_variants = {FeatureSpec{}};
  config.n_train = 100;
  config.n_test = 100;
  config.realizations = 20;
  return config;
}

}  // namespace

std::optional<Preset> preset_from_string(std::string_view name) {
  if (name == "fig1-scatter") return Preset::kFig1Scatter;
  if (name == "fig2-h-sweep") return Preset::kFig2FieldSweep;
  if (name == "fig3-dt-sweep") return Preset::kFig3TimeSweep;
  if (name == "fig4-shots") return Preset::kFig4Shots;
  if (name == "fig5-generalization") return Preset::kFig5Generalization;
  if (name == "figA1-extended") return Preset::kFigA1Extended;
  return std::nullopt;
}

std::string preset_name(Preset preset) {
  switch (preset) {
    case Preset::kFig1Scatter:
      return "fig1-scatter";
    case Preset::kFig2FieldSweep:
      return "fig2-h-sweep";
    case Preset::kFig3TimeSweep:
      return "fig3-dt-sweep";
    case Preset::kFig4Shots:
      return "fig4-shots";
    case Preset::kFig5Generalization:
      return "fig5-generalization";
    case Preset::kFigA1Extended:
      return "figA1-extended";
  }
  throw std::invalid_argument("preset_name: unknown preset");
}

std::vector<Preset> all_presets() {
  return {Preset::kFig1Scatter,        Preset::kFig2FieldSweep,
          Preset::kFig3TimeSweep,      Preset::kFig4Shots,
          Preset::kFig5Generalization, Preset::kFigA1Extended};
}

ExperimentConfig preset_config(Preset preset) {
  ExperimentConfig config = base_config();
  switch (preset) {
    case Preset::kFig1Scatter:
      config.epsilon_list = {0.0, 0.2, 0.5, 0.9};
      break;
    case Preset::kFig2FieldSweep:
      config.field_values = log_spaced(0.01, 2.0, 20);
      config.epsilon_list = {0.0, 0.2, 0.5};
      break;
    case Preset::kFig3TimeSweep:
      config.delta_t_values = log_spaced(0.1, 50.0, 20);
      config.epsilon_list = {0.0, 0.5, 0.9};
      break;
    case Preset::kFig4Shots:
      config.delta_t_values = log_spaced(0.1, 50.0, 20);
      config.epsilon_list = {0.2};
      config.shot_plans = {ShotPlan::finite(1000), ShotPlan::finite(5000),
                           ShotPlan::finite(15000), ShotPlan::exact()};
      break;
    case Preset::kFig5Generalization:
      config.reservoir.n_qubits = 7;
      config.input_qubits_train = 2;
      config.input_qubits_test = 3;
      break;
    case Preset::kFigA1Extended:
      config.field_values = log_spaced(0.01, 2.0, 20);
      config.epsilon_list = {0.2, 0.5, 0.9};
      config.feature_variants = {
          FeatureSpec{true, CorrelationOrder::kLocalZ},
          FeatureSpec{true, CorrelationOrder::kLocalPlusZZ}};
      break;
  }
  return config;
}

void apply_quick_scaling(ExperimentConfig& config) {
  config.realizations = 3;
  config.n_train = 40;
  config.n_test = 40;
}

std::vector<RunPlan> plan_config(const ExperimentConfig& config) {
  RunPlan plan;
  plan.config = config;
  if (config.input_qubits_test > config.input_qubits_train) {
    plan.kind = RunPlan::Kind::kGeneralization;
    plan.suffix = "_n" + std::to_string(config.input_qubits_test);
  } else if (config.effective_field_values().size() == 1 &&
             config.delta_t_values.size() == 1) {
    plan.kind = RunPlan::Kind::kScatter;
  } else {
    plan.kind = RunPlan::Kind::kSweep;
  }
  return {std::move(plan)};
}

std::vector<RunPlan> plan_preset(Preset preset, bool quick) {
  std::vector<RunPlan> plans;
  if (preset == Preset::kFig5Generalization) {
    for (const int test_qubits : {3, 4}) {
      ExperimentConfig config = preset_config(preset);
      config.input_qubits_test = test_qubits;
      plans.push_back(plan_config(config).front());
    }
  } else {
    plans = plan_config(preset_config(preset));
  }
  if (quick) {
    for (RunPlan& plan : plans) {
      apply_quick_scaling(plan.config);
    }
  }
  return plans;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw std::runtime_error("config: cannot open '" + path + "'");
  }
  // First pass: collect key/value pairs, honoring comments and blanks.
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) {
      line.resize(comment);
    }
    const std::string stripped = trim(line);
    if (stripped.empty()) {
      continue;
    }
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_number) +
                                  ": expected 'key = value'");
    }
    pairs.emplace_back(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  // A preset key seeds the config; everything else overrides field by field.
  ExperimentConfig config = base_config();
  for (const auto& [key, value] : pairs) {
    if (key == "preset") {
      const std::optional<Preset> preset = preset_from_string(value);
      if (!preset) {
        bad_value(key, value);
      }
      config = preset_config(*preset);
      break;
    }
  }
  for (const auto& [key, value] : pairs) {
    if (key == "preset") {
      continue;
    }
    set_field(config, key, value);
  }
  return config;
}

void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value) {
  set_field(config, key, value);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["reservoir"] = {{"n_qubits", config.reservoir.n_qubits},
                    {"field_strength", config.reservoir.field_strength},
                    {"coupling_scale", config.reservoir.coupling_scale}};
  j["field_sweep"] = config.effective_field_values();
  j["delta_t"] = config.delta_t_values;
  j["epsilon_list"] = config.epsilon_list;
  nlohmann::ordered_json shots = nlohmann::ordered_json::array();
  for (const ShotPlan& plan : config.shot_plans) {
    if (plan.is_exact()) {
      shots.push_back("exact");
    } else {
      shots.push_back(plan.n_measurements);
    }
  }
  j["shots"] = std::move(shots);
  nlohmann::ordered_json orders = nlohmann::ordered_json::array();
  for (const FeatureSpec& spec : config.feature_variants) {
    orders.push_back(correlation_order_name(spec.order));
  }
  j["features"] = {{"include_bias", config.feature_variants.front().include_bias},
                   {"correlation_order", std::move(orders)}};
  j["n_train"] = config.n_train;
  j["n_test"] = config.n_test;
  j["realizations"] = config.realizations;
  j["input_qubits_train"] = config.input_qubits_train;
  j["input_qubits_test"] = config.input_qubits_test;
  j["master_seed"] = config.master_seed;
  j["threads"] = config.threads;
  j["resample_reservoir_state"] = config.resample_reservoir_state;
  j["ridge_lambda"] = config.ridge_lambda;
  j["allow_underdetermined"] = config.allow_underdetermined;
  return j;
}

}  // namespace qelm
