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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qelm/experiment.hpp"

namespace qelm {

// Named experiment presets, each a fully specified ExperimentConfig.
enum class Preset {
  kFig1Scatter,         // prediction scatter vs noise level, single grid point
  kFig2FieldSweep,      // test MSE over the transverse-field grid
  kFig3TimeSweep,       // test MSE over the evolution-time grid
  kFig4Shots,           // finite-measurement budgets vs the exact limit
  kFig5Generalization,  // train on 2-qubit inputs, test on 3- and 4-qubit inputs
  kFigA1Extended,       // field sweep with local-z vs local+pairwise features
};

std::optional<Preset> preset_from_string(std::string_view name);
std::string preset_name(Preset preset);
std::vector<Preset> all_presets();

// One executable run: a resolved config, how to interpret its results, and
// the output-file suffix distinguishing sibling runs of the same preset.
struct RunPlan {
  enum class Kind {
    kSweep,           // emit axis/family series
    kScatter,         // single-point sweep: emit per-family (target, prediction)
    kGeneralization,  // emit (target, prediction, dressed)
  };
  std::string suffix;  // "", "_n3", ...
  Kind kind = Kind::kSweep;
  ExperimentConfig config;
};

// Base config of a preset (for fig5, the first panel).
ExperimentConfig preset_config(Preset preset);

// Expands a preset into its runs; only fig5 yields more than one (its two
// test-register panels). `quick` scales every run down to realizations = 3,
// n_train = n_test = 40 for smoke tests.
std::vector<RunPlan> plan_preset(Preset preset, bool quick);

// Derives the run plans for a hand-written config: generalization when the
// test register is wider than the train register, scatter for single-point
// sweeps, series otherwise.
std::vector<RunPlan> plan_config(const ExperimentConfig& config);

// Parses the line-oriented `key = value` config format (lists
// comma-separated, '#' comments, blank lines ignored). A `preset` key seeds
// the config before the remaining keys override individual fields. Unknown
// keys and malformed values are rejected with the offending key named.
ExperimentConfig parse_config_file(const std::string& path);

// Applies one `key=value` override (the CLI --set flag); same keys and
// validation as the config file.
void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value);

void apply_quick_scaling(ExperimentConfig& config);

// Full echo of a resolved config; embedded in every JSON result so a run
// can be reproduced from its output alone.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

}  // namespace qelm
