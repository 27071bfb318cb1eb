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

#include "qelm/quantum.hpp"
#include "qelm/rng.hpp"

namespace qelm {

// Parameters of a Werner-type input family on n_qubits >= 2 with mixing
// weight p in [0, 1].
struct WernerParams {
  double p = 0.0;
  int n_qubits = 2;
};

// Depolarizing-style input corruption weight epsilon in [0, 1].
struct NoiseParams {
  double epsilon = 0.0;
};

enum class StateEnsemble {
  kHilbertSchmidtMixed,  // Ginibre G G^dag / Tr, the Hilbert-Schmidt measure
  kHaarPure,             // projector onto a Haar-random pure state
};

struct RandomStateEnsemble {
  StateEnsemble kind = StateEnsemble::kHilbertSchmidtMixed;
  int dim = 2;  // power of two in [2, 2^kMaxQubits]
};

// Werner state: (1-p)/2^n * I + p * |t><t|, where the target |t> is the
// two-qubit singlet (|01> - |10>)/sqrt(2) for n = 2 and the n-qubit GHZ
// state (|0...0> + |1...1>)/sqrt(2) for n > 2. The matrix is affine in p by
// construction. Entangled (negative partial transpose) iff p > 1/3 at n = 2.
DensityMatrix make_werner(const WernerParams& params);

// Draws a random density matrix of the requested dimension. The
// Hilbert-Schmidt ensemble draws a dim x dim complex Ginibre matrix G
// (row-major entry order, one complex normal per entry) and returns
// G G^dag normalized to unit trace; the Haar-pure ensemble normalizes a
// complex Gaussian vector and returns its projector.
DensityMatrix random_density(const RandomStateEnsemble& ensemble, RandomStream& rng);

// Convex mixture (1 - eps) * clean + eps * noise_state. Dimensions must
// match; eps must lie in [0, 1]. eps = 0 returns the clean state unchanged,
// eps = 1 returns the noise state.
DensityMatrix apply_input_noise(const DensityMatrix& clean, const NoiseParams& noise,
                                const DensityMatrix& noise_state);

// Tensor-composes the input register (most significant positions) with the
// reservoir register. Throws unless dim(input) * dim(reservoir) == 2^total_qubits.
DensityMatrix compose_initial(const DensityMatrix& input,
                              const DensityMatrix& reservoir_state, int total_qubits);

}  // namespace qelm
