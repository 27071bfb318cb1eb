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
#include <map>
#include <utility>
#include <vector>

#include "qelm/quantum.hpp"
#include "qelm/rng.hpp"

namespace qelm {

// One reservoir realization: n_qubits spins with an all-to-all random XX
// coupling of scale coupling_scale and a uniform transverse field
// field_strength. `seed` records which substream drew the couplings.
struct ReservoirSpec {
  int n_qubits = 5;
  double field_strength = 0.1;
  double coupling_scale = 1.0;
  std::uint64_t seed = 0;
};

// Symmetric coupling matrix with zero diagonal; each off-diagonal entry lies
// in [-coupling_scale/2, +coupling_scale/2].
class CouplingMatrix {
 public:
  // Throws std::invalid_argument if the matrix is not symmetric, has a
  // nonzero diagonal, or has entries outside the scale bound.
  static CouplingMatrix from_values(Eigen::MatrixXd values, double coupling_scale);

  int n_qubits() const { return static_cast<int>(values_.rows()); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  explicit CouplingMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}
  Eigen::MatrixXd values_;
};

// Measurement budget for feature extraction: exact expectations or a finite
// number of projective measurements shared by all features.
struct ShotPlan {
  enum class Mode { kExact, kFinite };
  Mode mode = Mode::kExact;
  long n_measurements = 0;  // >= 1 when finite

  static ShotPlan exact() { return ShotPlan{Mode::kExact, 0}; }
  static ShotPlan finite(long n_measurements);
  bool is_exact() const { return mode == Mode::kExact; }
};

// Which correlators enter the feature vector (all diagonal in the
// computational basis, so one measurement record serves every feature).
enum class CorrelationOrder {
  kLocalZ,       // <sigma^z_i> for every qubit
  kLocalPlusZZ,  // additionally <sigma^z_i sigma^z_j> for every pair i < j
};

struct FeatureSpec {
  bool include_bias = true;
  CorrelationOrder order = CorrelationOrder::kLocalZ;

  // Feature vector length on an n-qubit register:
  // bias + n singles (+ n(n-1)/2 pairs).
  int feature_count(int n_qubits) const;
};

// Canonical names, used in family labels and config files:
// "local-z" / "local-plus-zz".
const char* correlation_order_name(CorrelationOrder order);

// Draws the i.i.d. couplings J_ij ~ U[-coupling_scale/2, +coupling_scale/2]
// in row-major order over pairs i < j (the order is part of the
// reproducibility contract).
CouplingMatrix draw_couplings(int n_qubits, double coupling_scale, RandomStream& rng);

// Dense H = sum_{i<j} J_ij sigma^x_i sigma^x_j + h sum_i sigma^z_i for the
// given couplings. Deterministic: used to pair one coupling draw with many
// field values.
HermitianOperator assemble_hamiltonian(const CouplingMatrix& couplings,
                                       double field_strength);

// Draws couplings from `rng` and assembles the Hamiltonian at
// spec.field_strength. Returns the operator together with the couplings so
// a realization can be reconstructed exactly.
std::pair<HermitianOperator, CouplingMatrix> build_hamiltonian(
    const ReservoirSpec& spec, RandomStream& rng);

// exp(-i H dt) through the spectral decomposition of H.
UnitaryPropagator make_propagator(const EigenDecomposition& eig, double dt);

// rho(dt) = U rho U^dag. Unitary conjugation preserves the spectrum (and
// hence purity and positivity). `evolve` performs one eigendecomposition per
// call; sweeps should decompose once and reuse the propagator via
// evolve_with.
DensityMatrix evolve(const DensityMatrix& rho, const HermitianOperator& hamiltonian,
                     double dt);
DensityMatrix evolve_with(const UnitaryPropagator& propagator, const DensityMatrix& rho);

// Exact feature vector: [bias,] <sigma^z_0> ... <sigma^z_{n-1}>
// [, <sigma^z_i sigma^z_j> for i < j lexicographic]. The bias entry is
// exactly 1; Pauli entries lie in [-1, 1].
RealVector measure_features_exact(const DensityMatrix& rho, const FeatureSpec& spec);

// Same contract, evaluated from an outcome distribution directly (the
// diagonal probabilities of the state). Lets callers reuse one distribution
// for exact features and shot sampling.
RealVector features_from_probabilities(const RealVector& probabilities,
                                       const FeatureSpec& spec);

// Outcome counts of full computational-basis measurements: bitstring index
// -> count, with sum of counts == total.
struct ShotRecord {
  int n_qubits = 0;
  long total = 0;
  std::map<std::uint64_t, long> counts;
};

// Samples plan.n_measurements full bitstrings from the outcome distribution
// of rho. Throws if the plan is exact (caller bug: exact mode never samples).
ShotRecord sample_bitstrings(const DensityMatrix& rho, const ShotPlan& plan,
                             RandomStream& rng);
ShotRecord sample_from_probabilities(const RealVector& probabilities, int n_qubits,
                                     const ShotPlan& plan, RandomStream& rng);

// Monte Carlo feature estimates from one shot record. Every feature —
// singles and pairwise products alike — is computed from the same record:
// <sigma^z_i sigma^z_j> is estimated as the average of z_i^(k) z_j^(k) over
// shots k, so pair features cost no extra measurements. Estimates lie in
// [-1, 1]; the bias entry is exactly 1.
RealVector estimate_features_from_shots(const ShotRecord& record,
                                        const FeatureSpec& spec);

}  // namespace qelm
