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

#include "qelm/states.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qelm {

DensityMatrix make_werner(const WernerParams& params) {
  if (!(params.p >= 0.0 && params.p <= 1.0)) {
    throw std::invalid_argument("make_werner: p must lie in [0, 1]");
  }
  if (params.n_qubits < 2 || params.n_qubits > kMaxQubits) {
    throw std::invalid_argument("make_werner: n_qubits must lie in [2, 12]");
  }
  const Eigen::Index dim = Eigen::Index{1} << params.n_qubits;
  Eigen::VectorXcd target = Eigen::VectorXcd::Zero(dim);
  const double amp = std::numbers::sqrt2 / 2.0;
  if (params.n_qubits == 2) {
    target(1) = amp;   // |01>
    target(2) = -amp;  // |10>
  } else {
    target(0) = amp;        // |0...0>
    target(dim - 1) = amp;  // |1...1>
  }
  ComplexMatrix m = ((1.0 - params.p) / static_cast<double>(dim)) *
                    ComplexMatrix::Identity(dim, dim);
  m += params.p * (target * target.adjoint());
  return DensityMatrix::from_matrix(std::move(m));
}

DensityMatrix random_density(const RandomStateEnsemble& ensemble, RandomStream& rng) {
  const Eigen::Index dim = ensemble.dim;
  if (dim < 2 || !std::has_single_bit(static_cast<std::uint64_t>(ensemble.dim)) ||
      dim > (Eigen::Index{1} << kMaxQubits)) {
    throw std::invalid_argument(
        "random_density: dim must be a power of two in [2, 2^12]");
  }
  if (ensemble.kind == StateEnsemble::kHaarPure) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      v(i) = rng.complex_normal();
    }
    v.normalize();
    ComplexMatrix m = v * v.adjoint();
    return DensityMatrix::from_matrix(std::move(m));
  }
  ComplexMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      g(i, j) = rng.complex_normal();
    }
  }
  // rankUpdate builds G G^dag with exact Hermitian symmetry.
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m.selfadjointView<Eigen::Lower>().rankUpdate(g);
  m = m.selfadjointView<Eigen::Lower>();
  m /= m.trace().real();
  return DensityMatrix::from_matrix(std::move(m));
}

DensityMatrix apply_input_noise(const DensityMatrix& clean, const NoiseParams& noise,
                                const DensityMatrix& noise_state) {
  if (!(noise.epsilon >= 0.0 && noise.epsilon <= 1.0)) {
    throw std::invalid_argument("apply_input_noise: epsilon must lie in [0, 1]");
  }
  if (clean.dim() != noise_state.dim()) {
    throw std::invalid_argument("apply_input_noise: state dimension mismatch");
  }
  ComplexMatrix m = (1.0 - noise.epsilon) * clean.matrix() +
                    noise.epsilon * noise_state.matrix();
  return DensityMatrix::from_matrix(std::move(m));
}

DensityMatrix compose_initial(const DensityMatrix& input,
                              const DensityMatrix& reservoir_state, int total_qubits) {
  if (input.n_qubits() + reservoir_state.n_qubits() != total_qubits) {
    throw std::invalid_argument(
        "compose_initial: input and reservoir registers must fill total_qubits");
  }
  return tensor_product(input, reservoir_state);
}

}  // namespace qelm
