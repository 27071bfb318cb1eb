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

#include "qelm/reservoir.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qelm {

namespace {

// Eigenvalue of sigma^z on qubit q for basis index b: +1 for |0>, -1 for |1>.
inline double z_sign(std::uint64_t b, int q, int n) {
  return qubit_bit(b, q, n) ? -1.0 : 1.0;
}

}  // namespace

CouplingMatrix CouplingMatrix::from_values(Eigen::MatrixXd values,
                                           double coupling_scale) {
  if (values.rows() != values.cols() || values.rows() < 2) {
    throw std::invalid_argument("CouplingMatrix: matrix must be square, at least 2x2");
  }
  if (!(coupling_scale > 0.0)) {
    throw std::invalid_argument("CouplingMatrix: coupling_scale must be positive");
  }
  const double bound = coupling_scale / 2.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    if (values(i, i) != 0.0) {
      throw std::invalid_argument("CouplingMatrix: diagonal must be zero");
    }
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (values(i, j) != values(j, i)) {
        throw std::invalid_argument("CouplingMatrix: matrix must be symmetric");
      }
      if (std::abs(values(i, j)) > bound) {
        throw std::invalid_argument(
            "CouplingMatrix: entry outside [-coupling_scale/2, +coupling_scale/2]");
      }
    }
  }
  return CouplingMatrix(std::move(values));
}

ShotPlan ShotPlan::finite(long n_measurements) {
  if (n_measurements < 1) {
    throw std::invalid_argument("ShotPlan: n_measurements must be >= 1");
  }
  return ShotPlan{Mode::kFinite, n_measurements};
}

int FeatureSpec::feature_count(int n_qubits) const {
  int count = (include_bias ? 1 : 0) + n_qubits;
  if (order == CorrelationOrder::kLocalPlusZZ) {
    count += n_qubits * (n_qubits - 1) / 2;
  }
  return count;
}

const char* correlation_order_name(CorrelationOrder order) {
  return order == CorrelationOrder::kLocalZ ? "local-z" : "local-plus-zz";
}

CouplingMatrix draw_couplings(int n_qubits, double coupling_scale, RandomStream& rng) {
  if (n_qubits < 2 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("draw_couplings: n_qubits must lie in [2, 12]");
  }
  if (!(coupling_scale > 0.0)) {
    throw std::invalid_argument("draw_couplings: coupling_scale must be positive");
  }
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n_qubits, n_qubits);
  const double half = coupling_scale / 2.0;
  for (int i = 0; i < n_qubits; ++i) {
    for (int j = i + 1; j < n_qubits; ++j) {
      const double v = rng.uniform(-half, half);
      values(i, j) = v;
      values(j, i) = v;
    }
  }
  return CouplingMatrix::from_values(std::move(values), coupling_scale);
}

HermitianOperator assemble_hamiltonian(const CouplingMatrix& couplings,
                                       double field_strength) {
  const int n = couplings.n_qubits();
  if (n > kMaxQubits) {
    throw std::invalid_argument("assemble_hamiltonian: register exceeds 12 qubits");
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  // Transverse field: diagonal, with each |0> bit contributing +h and each
  // |1> bit -h.
  for (Eigen::Index b = 0; b < dim; ++b) {
    const int ones = std::popcount(static_cast<std::uint64_t>(b));
    h(b, b) = field_strength * static_cast<double>(n - 2 * ones);
  }
  // sigma^x_i sigma^x_j flips the bits of qubits i and j: a single
  // off-diagonal entry per basis state and pair.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double coupling = couplings.values()(i, j);
      if (coupling == 0.0) {
        continue;
      }
      const std::uint64_t mask =
          (1ULL << (n - 1 - i)) | (1ULL << (n - 1 - j));
      for (Eigen::Index b = 0; b < dim; ++b) {
        h(static_cast<Eigen::Index>(static_cast<std::uint64_t>(b) ^ mask), b) +=
            coupling;
      }
    }
  }
  return HermitianOperator::from_matrix(std::move(h));
}

std::pair<HermitianOperator, CouplingMatrix> build_hamiltonian(
    const ReservoirSpec& spec, RandomStream& rng) {
  CouplingMatrix couplings = draw_couplings(spec.n_qubits, spec.coupling_scale, rng);
  HermitianOperator h = assemble_hamiltonian(couplings, spec.field_strength);
  return {std::move(h), std::move(couplings)};
}

UnitaryPropagator make_propagator(const EigenDecomposition& eig, double dt) {
  if (!(dt >= 0.0)) {
    throw std::invalid_argument("make_propagator: dt must be >= 0");
  }
  const Eigen::Index dim = eig.eigenvalues.size();
  Eigen::VectorXcd phases(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    phases(k) = std::exp(Complex{0.0, -eig.eigenvalues(k) * dt});
  }
  ComplexMatrix u =
      eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
  return UnitaryPropagator::from_matrix(std::move(u), dt);
}

DensityMatrix evolve(const DensityMatrix& rho, const HermitianOperator& hamiltonian,
                     double dt) {
  if (hamiltonian.dim() != rho.dim()) {
    throw std::invalid_argument("evolve: Hamiltonian/state dimension mismatch");
  }
  const EigenDecomposition eig = hermitian_eigendecomposition(hamiltonian);
  return evolve_with(make_propagator(eig, dt), rho);
}

DensityMatrix evolve_with(const UnitaryPropagator& propagator,
                          const DensityMatrix& rho) {
  if (propagator.dim() != rho.dim()) {
    throw std::invalid_argument("evolve_with: propagator/state dimension mismatch");
  }
  ComplexMatrix m =
      propagator.matrix() * rho.matrix() * propagator.matrix().adjoint();
  return DensityMatrix::from_matrix(std::move(m));
}

RealVector features_from_probabilities(const RealVector& probabilities,
                                       const FeatureSpec& spec) {
  const Eigen::Index dim = probabilities.size();
  if (dim < 2 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
    throw std::invalid_argument(
        "features_from_probabilities: length must be a power of two >= 2");
  }
  const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
  RealVector features(spec.feature_count(n));
  Eigen::Index idx = 0;
  if (spec.include_bias) {
    features(idx++) = 1.0;
  }
  for (int q = 0; q < n; ++q) {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < dim; ++b) {
      acc += probabilities(b) * z_sign(static_cast<std::uint64_t>(b), q, n);
    }
    features(idx++) = acc;
  }
  if (spec.order == CorrelationOrder::kLocalPlusZZ) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double acc = 0.0;
        for (Eigen::Index b = 0; b < dim; ++b) {
          const std::uint64_t bits = static_cast<std::uint64_t>(b);
          acc += probabilities(b) * z_sign(bits, i, n) * z_sign(bits, j, n);
        }
        features(idx++) = acc;
      }
    }
  }
  return features;
}

RealVector measure_features_exact(const DensityMatrix& rho, const FeatureSpec& spec) {
  return features_from_probabilities(diagonal_probabilities(rho), spec);
}

ShotRecord sample_from_probabilities(const RealVector& probabilities, int n_qubits,
                                     const ShotPlan& plan, RandomStream& rng) {
  if (plan.is_exact()) {
    throw std::invalid_argument(
        "sample_from_probabilities: exact plan passed to the shot sampler");
  }
  const Eigen::Index dim = probabilities.size();
  if (dim != (Eigen::Index{1} << n_qubits)) {
    throw std::invalid_argument("sample_from_probabilities: length != 2^n_qubits");
  }
  std::vector<double> cdf(static_cast<std::size_t>(dim));
  double acc = 0.0;
  for (Eigen::Index b = 0; b < dim; ++b) {
    acc += probabilities(b);
    cdf[static_cast<std::size_t>(b)] = acc;
  }
  // Guard the top of the table against rounding: uniform() < 1 always lands.
  cdf.back() = 1.0;
  ShotRecord record;
  record.n_qubits = n_qubits;
  record.total = plan.n_measurements;
  for (long s = 0; s < plan.n_measurements; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::uint64_t outcome =
        static_cast<std::uint64_t>(std::distance(cdf.begin(), it));
    ++record.counts[outcome];
  }
  return record;
}

ShotRecord sample_bitstrings(const DensityMatrix& rho, const ShotPlan& plan,
                             RandomStream& rng) {
  return sample_from_probabilities(diagonal_probabilities(rho), rho.n_qubits(), plan,
                                   rng);
}

RealVector estimate_features_from_shots(const ShotRecord& record,
                                        const FeatureSpec& spec) {
  if (record.total < 1 || record.counts.empty()) {
    throw std::invalid_argument("estimate_features_from_shots: empty shot record");
  }
  const int n = record.n_qubits;
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("estimate_features_from_shots: n_qubits out of range");
  }
  long counted = 0;
  RealVector features = RealVector::Zero(spec.feature_count(n));
  Eigen::Index idx0 = spec.include_bias ? 1 : 0;
  for (const auto& [outcome, count] : record.counts) {
    if (outcome >= (1ULL << n) || count < 1) {
      throw std::invalid_argument("estimate_features_from_shots: malformed record");
    }
    counted += count;
    const double weight = static_cast<double>(count);
    Eigen::Index idx = idx0;
    for (int q = 0; q < n; ++q) {
      features(idx++) += weight * z_sign(outcome, q, n);
    }
    if (spec.order == CorrelationOrder::kLocalPlusZZ) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          features(idx++) += weight * z_sign(outcome, i, n) * z_sign(outcome, j, n);
        }
      }
    }
  }
  if (counted != record.total) {
    throw std::invalid_argument(
        "estimate_features_from_shots: counts do not sum to total");
  }
  features /= static_cast<double>(record.total);
  if (spec.include_bias) {
    features(0) = 1.0;
  }
  return features;
}

}  // namespace qelm
