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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qelm/readout.hpp"
#include "qelm/reservoir.hpp"
#include "qelm/states.hpp"

namespace qelm {

// Full description of one experiment. A sweep axis is whichever of
// field_values / delta_t_values has more than one entry (at most one may);
// epsilon_list x shot_plans x feature_variants defines the curve families
// evaluated at every axis point, all sharing the same coupling draws and
// datasets realization by realization.
struct ExperimentConfig {
  ReservoirSpec reservoir;             // total register; field used when no sweep
  std::vector<double> field_values;    // empty -> {reservoir.field_strength}
  std::vector<double> delta_t_values = {10.0};
  std::vector<double> epsilon_list = {0.0};
  std::vector<ShotPlan> shot_plans = {ShotPlan::exact()};
  std::vector<FeatureSpec> feature_variants = {FeatureSpec{}};
  int n_train = 100;
  int n_test = 100;
  int realizations = 20;
  int input_qubits_train = 2;
  int input_qubits_test = 2;  // > train size triggers the generalization pipeline
  std::uint64_t master_seed = 42;
  int threads = 1;                       // 0 = hardware concurrency
  bool resample_reservoir_state = true;  // false: one R per realization (ablation)
  double ridge_lambda = 0.0;
  bool allow_underdetermined = false;

  // Effective field axis ({reservoir.field_strength} when field_values is
  // empty).
  std::vector<double> effective_field_values() const;

  // Throws std::invalid_argument naming the offending field. Rejects
  // under-determined regressions (n_train < feature count) unless
  // allow_underdetermined is set.
  void validate() const;
};

// Outcome of one reservoir realization at a single grid point.
struct RealizationResult {
  Eigen::MatrixXd coupling_values;  // the sampled J_ij
  double train_mse = 0.0;
  double test_mse = 0.0;
  Eigen::VectorXd predictions;  // test set, input order
  Eigen::VectorXd targets;
};

// One family's curve over the sweep axis, aggregated over realizations.
struct SweepCurve {
  std::string family;
  Eigen::VectorXd mean_test_mse;    // per axis value
  Eigen::VectorXd stderr_test_mse;  // standard error of the mean over realizations
  Eigen::VectorXd mean_train_mse;
  Eigen::MatrixXd test_mse_per_realization;  // axis x realization
  // Pooled test predictions (realization-major), filled only for
  // single-point sweeps, where a scatter is meaningful.
  Eigen::VectorXd scatter_predictions;
};

struct SweepResult {
  std::string axis_name;  // "field_strength" or "delta_t"
  std::vector<double> axis_values;
  std::vector<SweepCurve> curves;
  Eigen::VectorXd scatter_targets;  // shared across curves; single-point sweeps only
};

// Cross-domain evaluation: the readout is trained on input_qubits_train
// Werner inputs and evaluated on input_qubits_test Werner inputs, with raw
// predictions rescaled ("dressed") per realization through one designated
// calibration element — the first test element.
struct GeneralizationRun {
  Eigen::VectorXd targets;  // pooled over realizations, realization-major
  Eigen::VectorXd raw;
  Eigen::VectorXd dressed;
  Eigen::VectorXd raw_correlation;    // per-realization Pearson(raw, targets)
  Eigen::VectorXd dressed_test_mse;   // per realization
  Eigen::VectorXd train_mse;          // per realization (training domain)
  double mean_raw_correlation = 0.0;
  double mean_dressed_mse = 0.0;
  double stderr_dressed_mse = 0.0;
};

// Draws `count` (state, target) pairs from one stream: per element, target
// p ~ U[0, 1), then the noise state r (Hilbert-Schmidt ensemble, drawn even
// at epsilon = 0 to keep stream consumption fixed), returning
// (apply_input_noise(make_werner(p), epsilon, r), p).
std::vector<std::pair<DensityMatrix, double>> generate_dataset(int count,
                                                               int input_qubits,
                                                               double epsilon,
                                                               RandomStream& rng);

// Runs the full pipeline for one realization of a single-point config (all
// sweep lists singletons): draw couplings and dataset from substreams of
// (master_seed, realization_index), evolve, extract features, fit, predict.
RealizationResult run_realization(const ExperimentConfig& config,
                                  int realization_index);

// Runs all realizations over the sweep axis and families and aggregates
// mean/stderr per (axis value, family). Realizations may run on
// config.threads threads; results are merged in realization order, so the
// outcome is bit-identical for any thread count.
SweepResult run_sweep(const ExperimentConfig& config);

// Cross-domain pipeline; requires input_qubits_test >= input_qubits_train
// and singleton sweep lists. The degenerate equal-size case reduces to the
// standard pipeline (raw == dressed up to calibration noise).
GeneralizationRun run_generalization(const ExperimentConfig& config);

}  // namespace qelm
