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

#include <Eigen/Dense>

namespace qelm {

// Feature rows with aligned targets. `bias_column` >= 0 marks the all-ones
// column (or -1 for none); `allowance` widens the admissible [-1, 1] range
// of Pauli-feature entries to [-1-allowance, 1+allowance] to absorb shot
// noise (0 for exact features up to rounding, ~4/sqrt(N_m) for finite shots).
class DesignMatrix {
 public:
  // Throws std::invalid_argument on shape mismatch, an out-of-range entry,
  // or a bias column that is not identically 1.
  static DesignMatrix create(Eigen::MatrixXd entries, Eigen::VectorXd targets,
                             int bias_column, double allowance);

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  const Eigen::VectorXd& targets() const { return targets_; }
  int bias_column() const { return bias_column_; }

 private:
  DesignMatrix(Eigen::MatrixXd entries, Eigen::VectorXd targets, int bias_column)
      : entries_(std::move(entries)),
        targets_(std::move(targets)),
        bias_column_(bias_column) {}
  Eigen::MatrixXd entries_;
  Eigen::VectorXd targets_;
  int bias_column_;
};

// One linear readout per trained model; finite entries guaranteed.
struct ReadoutWeights {
  Eigen::VectorXd weights;
};

// A single test element with known target, used to rescale out-of-domain
// predictions. raw_prediction must be nonzero (it divides).
struct CalibrationPoint {
  double raw_prediction = 0.0;
  double known_target = 0.0;
};

struct FitOptions {
  double ridge_lambda = 0.0;  // 0 = plain least squares (the default model)
};

// Minimum-norm least-squares fit via SVD pseudo-inverse (singular values
// below 1e-12 * sigma_max treated as zero), or the ridge normal equations
// when ridge_lambda > 0. Never throws on rank deficiency.
ReadoutWeights fit_readout(const DesignMatrix& design, const FitOptions& options = {});

// w . features. Throws on length mismatch.
double predict(const ReadoutWeights& weights, const Eigen::VectorXd& features);

// Mean of squared residuals; lengths must match and be nonzero.
double mean_squared_error(const Eigen::VectorXd& predictions,
                          const Eigen::VectorXd& targets);

// Rescales every raw prediction by known_target / raw_prediction, so the
// calibration element maps exactly onto its known target.
Eigen::VectorXd dress_predictions(const Eigen::VectorXd& raw,
                                  const CalibrationPoint& calibration);

}  // namespace qelm
