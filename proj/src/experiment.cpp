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

#include "qelm/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "qelm/format.hpp"

namespace qelm {

namespace {

// ---------------------------------------------------------------------------
// Substream layout. Every random draw in a run is addressed by a label path
// under the master seed, so results do not depend on evaluation order or
// thread scheduling:
//   {kTagCouplings, r}                      couplings of realization r
//   {kTagDataset,   r, k}                   input k of realization r, drawn as
//                                           target p, then reservoir state R,
//                                           then noise state (in that order)
//   {kTagShots,     r, a, eps, shot, k}     measurement shots for input k at
//                                           axis point a, family (eps, shot)
// Feature variants share the shot record by design (every feature is
// diagonal, so one bitstring sample serves all of them).
// ---------------------------------------------------------------------------
constexpr std::uint64_t kTagCouplings = 1;
constexpr std::uint64_t kTagDataset = 2;
constexpr std::uint64_t kTagShots = 3;

struct AxisDef {
  std::string name;
  std::vector<double> values;
  bool is_field = true;
};

AxisDef resolve_axis(const ExperimentConfig& cfg) {
  const std::vector<double> field = cfg.effective_field_values();
  if (cfg.delta_t_values.size() > 1) {
    return AxisDef{"delta_t", cfg.delta_t_values, false};
  }
  return AxisDef{"field_strength", field, true};
}

std::string shot_plan_label(const ShotPlan& plan) {
  return plan.is_exact() ? std::string("exact")
                         : std::to_string(plan.n_measurements);
}

// Family label: one part per sweep dimension that actually varies, joined
// with ';' (',' would collide with the CSV delimiter). Falls back to the
// epsilon part when nothing varies, so a label is never empty.
std::string family_label(const ExperimentConfig& cfg, std::size_t eps_idx,
                         std::size_t shot_idx, std::size_t feat_idx) {
  std::string label;
  const auto append = [&label](const std::string& part) {
    if (!label.empty()) {
      label += ';';
    }
    label += part;
  };
  if (cfg.epsilon_list.size() > 1) {
    append("eps=" + format_double(cfg.epsilon_list[eps_idx]));
  }
  if (cfg.shot_plans.size() > 1) {
    append("Nm=" + shot_plan_label(cfg.shot_plans[shot_idx]));
  }
  if (cfg.feature_variants.size() > 1) {
    append(std::string("features=") +
           correlation_order_name(cfg.feature_variants[feat_idx].order));
  }
  if (label.empty()) {
    label = "eps=" + format_double(cfg.epsilon_list[eps_idx]);
  }
  return label;
}

// Admissible deviation of feature entries from [-1, 1]: shot estimates are
// exact averages of +-1 outcomes, and exact features are probability-weighted
// sums, so anything beyond rounding noise (exact) or a generous 4/sqrt(N_m)
// band (finite) indicates a bug upstream.
double feature_allowance(const ShotPlan& plan) {
  if (plan.is_exact()) {
    return 1e-12;
  }
  return 4.0 / std::sqrt(static_cast<double>(plan.n_measurements));
}

struct InputRecord {
  double target;
  DensityMatrix clean;
  DensityMatrix reservoir_state;
  DensityMatrix noise_state;
};

// Draws `count` inputs for one realization. Each input owns the substream
// (master_seed, kTagDataset, r, k) and consumes it in a fixed order: target,
// reservoir state, noise state. With resample_reservoir_state off, the
// k = 0 reservoir state is reused everywhere (draws still happen, keeping
// targets identical between the two settings).
std::vector<InputRecord> draw_inputs(const ExperimentConfig& cfg, int realization,
                                     int input_qubits, int count, int first_index) {
  const int reservoir_qubits = cfg.reservoir.n_qubits - input_qubits;
  const RandomStateEnsemble reservoir_ensemble{StateEnsemble::kHilbertSchmidtMixed,
                                               1 << reservoir_qubits};
  const RandomStateEnsemble noise_ensemble{StateEnsemble::kHilbertSchmidtMixed,
                                           1 << input_qubits};
  std::vector<InputRecord> inputs;
  inputs.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    RandomStream stream = derive_substream(
        cfg.master_seed,
        {kTagDataset, static_cast<std::uint64_t>(realization),
         static_cast<std::uint64_t>(first_index + k)});
    const double target = stream.uniform();
    DensityMatrix reservoir_state = random_density(reservoir_ensemble, stream);
    DensityMatrix noise_state = random_density(noise_ensemble, stream);
    inputs.push_back(InputRecord{target,
                                 make_werner(WernerParams{target, input_qubits}),
                                 std::move(reservoir_state),
                                 std::move(noise_state)});
  }
  if (!cfg.resample_reservoir_state) {
    for (std::size_t k = 1; k < inputs.size(); ++k) {
      inputs[k].reservoir_state = inputs[0].reservoir_state;
    }
  }
  return inputs;
}

double mean_of(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.mean();
}

// Standard error of the mean (sample standard deviation / sqrt(n)).
double stderr_of(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n < 2) {
    return 0.0;
  }
  const double mean = v.mean();
  const double variance =
      (v.array() - mean).square().sum() / static_cast<double>(n - 1);
  return std::sqrt(variance / static_cast<double>(n));
}

double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd ca = a.array() - a.mean();
  const Eigen::ArrayXd cb = b.array() - b.mean();
  const double denom = std::sqrt(ca.square().sum() * cb.square().sum());
  if (denom == 0.0) {
    return 0.0;
  }
  return (ca * cb).sum() / denom;
}

// Runs `count` jobs on up to `threads_requested` threads (0 = hardware
// concurrency). The first exception thrown by a job is rethrown after all
// threads join.
void parallel_for_index(int count, int threads_requested,
                        const std::function<void(int)>& fn) {
  int threads = threads_requested;
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  for (std::thread& t : pool) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

// Everything one realization contributes to a sweep: per (axis point,
// family) train/test MSEs, plus raw test predictions when the sweep is a
// single point (the scatter case).
struct RealizationGrid {
  Eigen::MatrixXd coupling_values;
  Eigen::MatrixXd train_mse;  // axis x family
  Eigen::MatrixXd test_mse;   // axis x family
  std::vector<Eigen::VectorXd> predictions;  // per family; single-point sweeps only
  Eigen::VectorXd test_targets;
};

RealizationGrid run_one_grid(const ExperimentConfig& cfg, int realization,
                             const AxisDef& axis) {
  const int n_qubits = cfg.reservoir.n_qubits;
  const int n_train = cfg.n_train;
  const int n_test = cfg.n_test;
  const int total_inputs = n_train + n_test;
  const std::size_t n_eps = cfg.epsilon_list.size();
  const std::size_t n_shots = cfg.shot_plans.size();
  const std::size_t n_feats = cfg.feature_variants.size();
  const std::size_t n_families = n_eps * n_shots * n_feats;
  const std::size_t n_axis = axis.values.size();
  const bool keep_predictions = n_axis == 1;

  RandomStream coupling_stream = derive_substream(
      cfg.master_seed, {kTagCouplings, static_cast<std::uint64_t>(realization)});
  const CouplingMatrix couplings =
      draw_couplings(n_qubits, cfg.reservoir.coupling_scale, coupling_stream);

  const std::vector<InputRecord> inputs =
      draw_inputs(cfg, realization, cfg.input_qubits_train, total_inputs, 0);
  Eigen::VectorXd targets_train(n_train);
  Eigen::VectorXd targets_test(n_test);
  for (int k = 0; k < n_train; ++k) {
    targets_train(k) = inputs[static_cast<std::size_t>(k)].target;
  }
  for (int k = 0; k < n_test; ++k) {
    targets_test(k) = inputs[static_cast<std::size_t>(n_train + k)].target;
  }

  RealizationGrid grid;
  grid.coupling_values = couplings.values();
  grid.train_mse.resize(static_cast<Eigen::Index>(n_axis),
                        static_cast<Eigen::Index>(n_families));
  grid.test_mse.resize(static_cast<Eigen::Index>(n_axis),
                       static_cast<Eigen::Index>(n_families));
  if (keep_predictions) {
    grid.predictions.resize(n_families);
  }
  grid.test_targets = targets_test;

  // One spectral decomposition serves the whole delta_t axis; a field sweep
  // re-decomposes per point.
  std::optional<EigenDecomposition> fixed_field_eig;
  if (!axis.is_field) {
    fixed_field_eig = hermitian_eigendecomposition(
        assemble_hamiltonian(couplings, cfg.effective_field_values().front()));
  }
  const double fixed_dt = cfg.delta_t_values.front();

  for (std::size_t a = 0; a < n_axis; ++a) {
    const UnitaryPropagator propagator =
        axis.is_field
            ? make_propagator(hermitian_eigendecomposition(assemble_hamiltonian(
                                  couplings, axis.values[a])),
                              fixed_dt)
            : make_propagator(*fixed_field_eig, axis.values[a]);

    for (std::size_t e = 0; e < n_eps; ++e) {
      const NoiseParams noise{cfg.epsilon_list[e]};
      // Feature rows per (shot plan, feature variant), filled input by
      // input from the same evolved state.
      std::vector<std::vector<Eigen::MatrixXd>> features(n_shots);
      for (std::size_t s = 0; s < n_shots; ++s) {
        features[s].resize(n_feats);
        for (std::size_t f = 0; f < n_feats; ++f) {
          features[s][f].resize(
              total_inputs, cfg.feature_variants[f].feature_count(n_qubits));
        }
      }

      for (int k = 0; k < total_inputs; ++k) {
        const InputRecord& input = inputs[static_cast<std::size_t>(k)];
        const DensityMatrix noisy =
            apply_input_noise(input.clean, noise, input.noise_state);
        const DensityMatrix initial =
            compose_initial(noisy, input.reservoir_state, n_qubits);
        const DensityMatrix evolved = evolve_with(propagator, initial);
        const RealVector probabilities = diagonal_probabilities(evolved);
        for (std::size_t s = 0; s < n_shots; ++s) {
          const ShotPlan& plan = cfg.shot_plans[s];
          if (plan.is_exact()) {
            for (std::size_t f = 0; f < n_feats; ++f) {
              features[s][f].row(k) =
                  features_from_probabilities(probabilities,
                                              cfg.feature_variants[f])
                      .transpose();
            }
          } else {
            RandomStream shot_stream = derive_substream(
                cfg.master_seed,
                {kTagShots, static_cast<std::uint64_t>(realization),
                 static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(e),
                 static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(k)});
            const ShotRecord record = sample_from_probabilities(
                probabilities, n_qubits, plan, shot_stream);
            for (std::size_t f = 0; f < n_feats; ++f) {
              features[s][f].row(k) =
                  estimate_features_from_shots(record, cfg.feature_variants[f])
                      .transpose();
            }
          }
        }
      }

      for (std::size_t s = 0; s < n_shots; ++s) {
        for (std::size_t f = 0; f < n_feats; ++f) {
          const std::size_t family = (e * n_shots + s) * n_feats + f;
          const Eigen::MatrixXd& rows = features[s][f];
          const int bias_column = cfg.feature_variants[f].include_bias ? 0 : -1;
          const DesignMatrix train = DesignMatrix::create(
              rows.topRows(n_train), targets_train, bias_column,
              feature_allowance(cfg.shot_plans[s]));
          const ReadoutWeights weights =
              fit_readout(train, FitOptions{cfg.ridge_lambda});
          const Eigen::VectorXd train_predictions =
              rows.topRows(n_train) * weights.weights;
          const Eigen::VectorXd test_predictions =
              rows.bottomRows(n_test) * weights.weights;
          grid.train_mse(static_cast<Eigen::Index>(a),
                         static_cast<Eigen::Index>(family)) =
              mean_squared_error(train_predictions, targets_train);
          grid.test_mse(static_cast<Eigen::Index>(a),
                        static_cast<Eigen::Index>(family)) =
              mean_squared_error(test_predictions, targets_test);
          if (keep_predictions) {
            grid.predictions[family] = test_predictions;
          }
        }
      }
    }
  }
  return grid;
}

void require_single_point(const ExperimentConfig& cfg, const char* where) {
  if (cfg.effective_field_values().size() != 1 || cfg.delta_t_values.size() != 1) {
    throw std::invalid_argument(std::string(where) +
                                ": requires singleton field/delta_t lists");
  }
}

}  // namespace

std::vector<double> ExperimentConfig::effective_field_values() const {
  if (field_values.empty()) {
    return {reservoir.field_strength};
  }
  return field_values;
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& message) {
    throw std::invalid_argument("ExperimentConfig: " + message);
  };
  if (reservoir.n_qubits < 2 || reservoir.n_qubits > kMaxQubits) {
    fail("reservoir.n_qubits must lie in [2, 12]");
  }
  if (!(reservoir.coupling_scale > 0.0)) {
    fail("reservoir.coupling_scale must be positive");
  }
  const std::vector<double> field = effective_field_values();
  for (const double h : field) {
    if (!(h >= 0.0) || !std::isfinite(h)) {
      fail("field_sweep values must be finite and >= 0");
    }
  }
  if (delta_t_values.empty()) {
    fail("delta_t must not be empty");
  }
  for (const double dt : delta_t_values) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) {
      fail("delta_t values must be finite and >= 0");
    }
  }
  if (field.size() > 1 && delta_t_values.size() > 1) {
    fail("at most one of field_sweep/delta_t may hold more than one value");
  }
  if (epsilon_list.empty()) {
    fail("epsilon_list must not be empty");
  }
  for (const double eps : epsilon_list) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
      fail("epsilon_list values must lie in [0, 1]");
    }
  }
  if (shot_plans.empty()) {
    fail("shots must not be empty");
  }
  if (feature_variants.empty()) {
    fail("features must not be empty");
  }
  if (n_train < 1 || n_test < 1) {
    fail("n_train and n_test must be >= 1");
  }
  if (realizations < 1) {
    fail("realizations must be >= 1");
  }
  if (input_qubits_train < 2 || input_qubits_train >= reservoir.n_qubits) {
    fail("input_qubits_train must lie in [2, reservoir.n_qubits - 1]");
  }
  if (input_qubits_test < 2 || input_qubits_test >= reservoir.n_qubits) {
    fail("input_qubits_test must lie in [2, reservoir.n_qubits - 1]");
  }
  if (threads < 0) {
    fail("threads must be >= 0");
  }
  if (ridge_lambda < 0.0) {
    fail("ridge_lambda must be >= 0");
  }
  if (!allow_underdetermined) {
    for (const FeatureSpec& spec : feature_variants) {
      const int count = spec.feature_count(reservoir.n_qubits);
      if (n_train < count) {
        fail("n_train (" + std::to_string(n_train) +
             ") is below the feature count (" + std::to_string(count) +
             "); the regression would be under-determined "
             "(set allow_underdetermined to override)");
      }
    }
  }
}

std::vector<std::pair<DensityMatrix, double>> generate_dataset(int count,
                                                               int input_qubits,
                                                               double epsilon,
                                                               RandomStream& rng) {
  if (count < 1) {
    throw std::invalid_argument("generate_dataset: count must be >= 1");
  }
  const NoiseParams noise{epsilon};  // range-checked by apply_input_noise
  const RandomStateEnsemble ensemble{StateEnsemble::kHilbertSchmidtMixed,
                                     1 << input_qubits};
  std::vector<std::pair<DensityMatrix, double>> dataset;
  dataset.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double target = rng.uniform();
    const DensityMatrix clean = make_werner(WernerParams{target, input_qubits});
    const DensityMatrix noise_state = random_density(ensemble, rng);
    dataset.emplace_back(apply_input_noise(clean, noise, noise_state), target);
  }
  return dataset;
}

RealizationResult run_realization(const ExperimentConfig& config,
                                  int realization_index) {
  config.validate();
  require_single_point(config, "run_realization");
  if (config.epsilon_list.size() != 1 || config.shot_plans.size() != 1 ||
      config.feature_variants.size() != 1) {
    throw std::invalid_argument(
        "run_realization: requires singleton family lists");
  }
  if (realization_index < 0) {
    throw std::invalid_argument("run_realization: realization_index must be >= 0");
  }
  if (config.input_qubits_test != config.input_qubits_train) {
    throw std::invalid_argument(
        "run_realization: train/test domains differ; use run_generalization");
  }
  const AxisDef axis = resolve_axis(config);
  RealizationGrid grid = run_one_grid(config, realization_index, axis);
  RealizationResult result;
  result.coupling_values = std::move(grid.coupling_values);
  result.train_mse = grid.train_mse(0, 0);
  result.test_mse = grid.test_mse(0, 0);
  result.predictions = std::move(grid.predictions[0]);
  result.targets = std::move(grid.test_targets);
  return result;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.input_qubits_test != config.input_qubits_train) {
    throw std::invalid_argument(
        "run_sweep: train/test domains differ; use run_generalization");
  }
  const AxisDef axis = resolve_axis(config);
  const std::size_t n_axis = axis.values.size();
  const std::size_t n_families = config.epsilon_list.size() *
                                 config.shot_plans.size() *
                                 config.feature_variants.size();
  const int n_realizations = config.realizations;

  // Each realization fills its own slot; the merge below walks slots in
  // index order, so aggregates are independent of thread scheduling.
  std::vector<RealizationGrid> grids(static_cast<std::size_t>(n_realizations));
  parallel_for_index(n_realizations, config.threads, [&](int r) {
    grids[static_cast<std::size_t>(r)] = run_one_grid(config, r, axis);
  });

  SweepResult result;
  result.axis_name = axis.name;
  result.axis_values = axis.values;
  result.curves.resize(n_families);
  const bool keep_predictions = n_axis == 1;
  if (keep_predictions) {
    result.scatter_targets.resize(
        static_cast<Eigen::Index>(n_realizations) * config.n_test);
    for (int r = 0; r < n_realizations; ++r) {
      result.scatter_targets.segment(static_cast<Eigen::Index>(r) * config.n_test,
                                     config.n_test) =
          grids[static_cast<std::size_t>(r)].test_targets;
    }
  }

  std::size_t family = 0;
  for (std::size_t e = 0; e < config.epsilon_list.size(); ++e) {
    for (std::size_t s = 0; s < config.shot_plans.size(); ++s) {
      for (std::size_t f = 0; f < config.feature_variants.size(); ++f, ++family) {
        SweepCurve& curve = result.curves[family];
        curve.family = family_label(config, e, s, f);
        curve.mean_test_mse.resize(static_cast<Eigen::Index>(n_axis));
        curve.stderr_test_mse.resize(static_cast<Eigen::Index>(n_axis));
        curve.mean_train_mse.resize(static_cast<Eigen::Index>(n_axis));
        curve.test_mse_per_realization.resize(static_cast<Eigen::Index>(n_axis),
                                              n_realizations);
        for (std::size_t a = 0; a < n_axis; ++a) {
          Eigen::VectorXd test_values(n_realizations);
          Eigen::VectorXd train_values(n_realizations);
          for (int r = 0; r < n_realizations; ++r) {
            const RealizationGrid& grid = grids[static_cast<std::size_t>(r)];
            test_values(r) = grid.test_mse(static_cast<Eigen::Index>(a),
                                           static_cast<Eigen::Index>(family));
            train_values(r) = grid.train_mse(static_cast<Eigen::Index>(a),
                                             static_cast<Eigen::Index>(family));
          }
          curve.test_mse_per_realization.row(static_cast<Eigen::Index>(a)) =
              test_values.transpose();
          curve.mean_test_mse(static_cast<Eigen::Index>(a)) = mean_of(test_values);
          curve.stderr_test_mse(static_cast<Eigen::Index>(a)) =
              stderr_of(test_values);
          curve.mean_train_mse(static_cast<Eigen::Index>(a)) =
              mean_of(train_values);
        }
        if (keep_predictions) {
          curve.scatter_predictions.resize(
              static_cast<Eigen::Index>(n_realizations) * config.n_test);
          for (int r = 0; r < n_realizations; ++r) {
            curve.scatter_predictions.segment(
                static_cast<Eigen::Index>(r) * config.n_test, config.n_test) =
                grids[static_cast<std::size_t>(r)].predictions[family];
          }
        }
      }
    }
  }
  return result;
}

GeneralizationRun run_generalization(const ExperimentConfig& config) {
  config.validate();
  require_single_point(config, "run_generalization");
  if (config.epsilon_list.size() != 1 || config.shot_plans.size() != 1 ||
      config.feature_variants.size() != 1) {
    throw std::invalid_argument(
        "run_generalization: requires singleton family lists");
  }
  if (config.input_qubits_test < config.input_qubits_train) {
    throw std::invalid_argument(
        "run_generalization: input_qubits_test must be >= input_qubits_train");
  }

  const int n_qubits = config.reservoir.n_qubits;
  const int n_train = config.n_train;
  const int n_test = config.n_test;
  const int n_realizations = config.realizations;
  const NoiseParams noise{config.epsilon_list.front()};
  const ShotPlan& plan = config.shot_plans.front();
  const FeatureSpec& feature_spec = config.feature_variants.front();
  const int bias_column = feature_spec.include_bias ? 0 : -1;
  const double allowance = feature_allowance(plan);

  struct PanelSlot {
    Eigen::VectorXd targets, raw, dressed;
    double correlation = 0.0;
    double dressed_mse = 0.0;
    double train_mse = 0.0;
  };
  std::vector<PanelSlot> slots(static_cast<std::size_t>(n_realizations));

  parallel_for_index(n_realizations, config.threads, [&](int r) {
    RandomStream coupling_stream = derive_substream(
        config.master_seed, {kTagCouplings, static_cast<std::uint64_t>(r)});
    const CouplingMatrix couplings = draw_couplings(
        n_qubits, config.reservoir.coupling_scale, coupling_stream);
    const UnitaryPropagator propagator = make_propagator(
        hermitian_eigendecomposition(assemble_hamiltonian(
            couplings, config.effective_field_values().front())),
        config.delta_t_values.front());

    const auto feature_rows = [&](const std::vector<InputRecord>& inputs,
                                  std::uint64_t shot_k_offset) {
      Eigen::MatrixXd rows(static_cast<Eigen::Index>(inputs.size()),
                           feature_spec.feature_count(n_qubits));
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        const DensityMatrix noisy =
            apply_input_noise(inputs[k].clean, noise, inputs[k].noise_state);
        const DensityMatrix initial =
            compose_initial(noisy, inputs[k].reservoir_state, n_qubits);
        const DensityMatrix evolved = evolve_with(propagator, initial);
        const RealVector probabilities = diagonal_probabilities(evolved);
        if (plan.is_exact()) {
          rows.row(static_cast<Eigen::Index>(k)) =
              features_from_probabilities(probabilities, feature_spec).transpose();
        } else {
          RandomStream shot_stream = derive_substream(
              config.master_seed,
              {kTagShots, static_cast<std::uint64_t>(r), 0, 0, 0,
               shot_k_offset + k});
          rows.row(static_cast<Eigen::Index>(k)) =
              estimate_features_from_shots(
                  sample_from_probabilities(probabilities, n_qubits, plan,
                                            shot_stream),
                  feature_spec)
                  .transpose();
        }
      }
      return rows;
    };

    const std::vector<InputRecord> train_inputs =
        draw_inputs(config, r, config.input_qubits_train, n_train, 0);
    const std::vector<InputRecord> test_inputs =
        draw_inputs(config, r, config.input_qubits_test, n_test, n_train);

    Eigen::VectorXd targets_train(n_train);
    for (int k = 0; k < n_train; ++k) {
      targets_train(k) = train_inputs[static_cast<std::size_t>(k)].target;
    }
    Eigen::VectorXd targets_test(n_test);
    for (int k = 0; k < n_test; ++k) {
      targets_test(k) = test_inputs[static_cast<std::size_t>(k)].target;
    }

    const Eigen::MatrixXd train_rows = feature_rows(train_inputs, 0);
    const Eigen::MatrixXd test_rows =
        feature_rows(test_inputs, static_cast<std::uint64_t>(n_train));

    const DesignMatrix train = DesignMatrix::create(train_rows, targets_train,
                                                    bias_column, allowance);
    const ReadoutWeights weights =
        fit_readout(train, FitOptions{config.ridge_lambda});
    const Eigen::VectorXd train_predictions = train_rows * weights.weights;
    const Eigen::VectorXd raw = test_rows * weights.weights;
    // The first test element is the designated calibration point.
    const Eigen::VectorXd dressed =
        dress_predictions(raw, CalibrationPoint{raw(0), targets_test(0)});

    PanelSlot& slot = slots[static_cast<std::size_t>(r)];
    slot.targets = targets_test;
    slot.raw = raw;
    slot.dressed = dressed;
    slot.correlation = pearson_correlation(raw, targets_test);
    slot.dressed_mse = mean_squared_error(dressed, targets_test);
    slot.train_mse = mean_squared_error(train_predictions, targets_train);
  });

  GeneralizationRun run;
  const Eigen::Index pooled =
      static_cast<Eigen::Index>(n_realizations) * n_test;
  run.targets.resize(pooled);
  run.raw.resize(pooled);
  run.dressed.resize(pooled);
  run.raw_correlation.resize(n_realizations);
  run.dressed_test_mse.resize(n_realizations);
  run.train_mse.resize(n_realizations);
  for (int r = 0; r < n_realizations; ++r) {
    const PanelSlot& slot = slots[static_cast<std::size_t>(r)];
    const Eigen::Index offset = static_cast<Eigen::Index>(r) * n_test;
    run.targets.segment(offset, n_test) = slot.targets;
    run.raw.segment(offset, n_test) = slot.raw;
    run.dressed.segment(offset, n_test) = slot.dressed;
    run.raw_correlation(r) = slot.correlation;
    run.dressed_test_mse(r) = slot.dressed_mse;
    run.train_mse(r) = slot.train_mse;
  }
  run.mean_raw_correlation = mean_of(run.raw_correlation);
  run.mean_dressed_mse = mean_of(run.dressed_test_mse);
  run.stderr_dressed_mse = stderr_of(run.dressed_test_mse);
  return run;
}

}  // namespace qelm
