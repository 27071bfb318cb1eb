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

#include "qelm/readout.hpp"

#include <cmath>
#include <stdexcept>

namespace qelm {

namespace {
constexpr double kSingularValueRelCutoff = 1e-12;
}

DesignMatrix DesignMatrix::create(Eigen::MatrixXd entries, Eigen::VectorXd targets,
                                  int bias_column, double allowance) {
  if (entries.rows() < 1 || entries.cols() < 1) {
    throw std::invalid_argument("DesignMatrix: must have at least one row and column");
  }
  if (entries.rows() != targets.size()) {
    throw std::invalid_argument("DesignMatrix: row count must match target count");
  }
  if (bias_column < -1 || bias_column >= entries.cols()) {
    throw std::invalid_argument("DesignMatrix: bias_column out of range");
  }
  if (!(allowance >= 0.0)) {
    throw std::invalid_argument("DesignMatrix: allowance must be >= 0");
  }
  const double bound = 1.0 + allowance;
  for (Eigen::Index r = 0; r < entries.rows(); ++r) {
    for (Eigen::Index c = 0; c < entries.cols(); ++c) {
      const double v = entries(r, c);
      if (c == bias_column) {
        if (v != 1.0) {
          throw std::invalid_argument("DesignMatrix: bias column must be identically 1");
        }
      } else if (!(std::abs(v) <= bound)) {  // also rejects NaN
        throw std::invalid_argument(
            "DesignMatrix: feature entry outside [-1-allowance, 1+allowance]");
      }
    }
  }
  return DesignMatrix(std::move(entries), std::move(targets), bias_column);
}

ReadoutWeights fit_readout(const DesignMatrix& design, const FitOptions& options) {
  if (options.ridge_lambda < 0.0) {
    throw std::invalid_argument("fit_readout: ridge_lambda must be >= 0");
  }
  const Eigen::MatrixXd& x = design.entries();
  Eigen::VectorXd w;
  if (options.ridge_lambda > 0.0) {
    const Eigen::Index f = x.cols();
    const Eigen::MatrixXd gram =
        x.transpose() * x +
        options.ridge_lambda * Eigen::MatrixXd::Identity(f, f);
    w = gram.ldlt().solve(x.transpose() * design.targets());
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kSingularValueRelCutoff);
    w = svd.solve(design.targets());
  }
  if (!w.allFinite()) {
    throw std::runtime_error("fit_readout: non-finite weights");
  }
  return ReadoutWeights{std::move(w)};
}

double predict(const ReadoutWeights& weights, const Eigen::VectorXd& features) {
  if (weights.weights.size() != features.size()) {
    throw std::invalid_argument("predict: weight/feature length mismatch");
  }
  return weights.weights.dot(features);
}

double mean_squared_error(const Eigen::VectorXd& predictions,
                          const Eigen::VectorXd& targets) {
  if (predictions.size() != targets.size() || predictions.size() == 0) {
    throw std::invalid_argument(
        "mean_squared_error: lengths must match and be nonzero");
  }
  return (predictions - targets).squaredNorm() /
         static_cast<double>(predictions.size());
}

Eigen::VectorXd dress_predictions(const Eigen::VectorXd& raw,
                                  const CalibrationPoint& calibration) {
  if (calibration.raw_prediction == 0.0) {
    throw std::invalid_argument(
        "dress_predictions: calibration raw_prediction must be nonzero");
  }
  return raw * (calibration.known_target / calibration.raw_prediction);
}

}  // namespace qelm
