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
#include <complex>
#include <set>

namespace qelm {

// ---------------------------------------------------------------------------
// Conventions
//
// Registers are dense and computational-basis indexed. Qubit 0 is the MOST
// significant bit of the basis index: in an n-qubit register, basis state
// |b_0 b_1 ... b_{n-1}> has index sum_q b_q * 2^(n-1-q), so the bit of qubit
// q in index b is (b >> (n-1-q)) & 1. Consequently tensor_product(a, b)
// places the qubits of `a` on the low-numbered (most significant) positions,
// which is where the experiment pipeline puts the input register.
// ---------------------------------------------------------------------------

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Hard cap on register width; everything is dense 2^n x 2^n.
inline constexpr int kMaxQubits = 12;

// Validation tolerances shared across the library.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kMinEigenvalueTol = -1e-10;  // PSD floor
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kImagExpectationTol = 1e-10;

// Extracts the bit of qubit `q` from basis index `b` in an n-qubit register.
inline int qubit_bit(std::uint64_t b, int q, int n_qubits) {
  return static_cast<int>((b >> (n_qubits - 1 - q)) & 1ULL);
}

// A validated Hermitian operator (square, self-adjoint to 1e-12).
class HermitianOperator {
 public:
  // Throws std::invalid_argument if the matrix is not square or not
  // Hermitian within tolerance.
  static HermitianOperator from_matrix(ComplexMatrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  explicit HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

// A density matrix: Hermitian to 1e-12, trace 1 to 1e-12, dimension a power
// of two in [2, 2^kMaxQubits]. Positive semidefiniteness is preserved by
// every constructive route in the library and checked where it matters via
// min_eigenvalue() (an O(dim^3) eigensolve, too heavy for the hot path).
class DensityMatrix {
 public:
  // Throws std::invalid_argument on any violated invariant.
  static DensityMatrix from_matrix(ComplexMatrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  int n_qubits() const { return n_qubits_; }
  const ComplexMatrix& matrix() const { return m_; }

  // Smallest eigenvalue; >= -1e-10 for a physical state.
  double min_eigenvalue() const;

  // Tr[rho^2]; 1 for pure states, 1/dim for the maximally mixed state.
  double purity() const;

 private:
  DensityMatrix(ComplexMatrix m, int n_qubits)
      : m_(std::move(m)), n_qubits_(n_qubits) {}
  ComplexMatrix m_;
  int n_qubits_;
};

// A validated unitary (U U^dag = I to 1e-10) together with the evolution
// timestep it realizes. Immutable after construction and safe to share
// across threads.
class UnitaryPropagator {
 public:
  // Throws std::invalid_argument if not unitary within tolerance or if
  // timestep is negative.
  static UnitaryPropagator from_matrix(ComplexMatrix m, double timestep);

  int dim() const { return static_cast<int>(m_.rows()); }
  double timestep() const { return timestep_; }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  UnitaryPropagator(ComplexMatrix m, double timestep)
      : m_(std::move(m)), timestep_(timestep) {}
  ComplexMatrix m_;
  double timestep_;
};

// Kronecker product with `a` on the most significant positions. Throws if
// the combined register would exceed kMaxQubits.
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

// Tensor product of sigma^z on each site in `sites` (identity elsewhere) as
// a dense diagonal-in-computational-basis operator on n_qubits. An empty
// site set gives the identity. Throws on out-of-range sites.
HermitianOperator pauli_z_string(const std::set<int>& sites, int n_qubits);

// Tr[obs * rho], validated real: the imaginary part must vanish to 1e-10
// (it is asserted and discarded). Throws on dimension mismatch.
double expectation(const HermitianOperator& obs, const DensityMatrix& rho);

// Spectral decomposition of a Hermitian operator. Eigenvalues are real and
// sorted ascending; eigenvector columns are orthonormal and aligned with
// the eigenvalues.
struct EigenDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

// Throws std::runtime_error if the iterative solver fails to converge.
EigenDecomposition hermitian_eigendecomposition(const HermitianOperator& op);

// Computational-basis outcome probabilities: the real diagonal of rho,
// clamped at zero (entries below -1e-10 are an invariant violation and
// throw) and renormalized to sum 1.
RealVector diagonal_probabilities(const DensityMatrix& rho);

}  // namespace qelm
