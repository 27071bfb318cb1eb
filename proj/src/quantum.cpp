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

#include "qelm/quantum.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qelm {

namespace {

bool is_power_of_two(Eigen::Index x) {
  return x > 0 && std::has_single_bit(static_cast<std::uint64_t>(x));
}

int log2_of(Eigen::Index dim) {
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
  }
}

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

HermitianOperator HermitianOperator::from_matrix(ComplexMatrix m) {
  require_square(m, "HermitianOperator");
  if (hermiticity_defect(m) > kHermitianTol) {
    throw std::invalid_argument("HermitianOperator: matrix is not Hermitian within 1e-12");
  }
  return HermitianOperator(std::move(m));
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m) {
  require_square(m, "DensityMatrix");
  const Eigen::Index dim = m.rows();
  if (dim < 2 || !is_power_of_two(dim) || dim > (Eigen::Index{1} << kMaxQubits)) {
    throw std::invalid_argument(
        "DensityMatrix: dimension must be a power of two in [2, 2^" +
        std::to_string(kMaxQubits) + "]");
  }
  if (hermiticity_defect(m) > kHermitianTol) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian within 1e-12");
  }
  if (std::abs(m.trace() - Complex{1.0, 0.0}) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace must be 1 within 1e-12");
  }
  return DensityMatrix(std::move(m), log2_of(dim));
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("DensityMatrix: eigenvalue computation failed to converge");
  }
  return solver.eigenvalues()(0);
}

double DensityMatrix::purity() const {
  // Tr[rho^2] equals the squared Frobenius norm for Hermitian rho.
  return m_.squaredNorm();
}

UnitaryPropagator UnitaryPropagator::from_matrix(ComplexMatrix m, double timestep) {
  require_square(m, "UnitaryPropagator");
  if (!(timestep >= 0.0)) {
    throw std::invalid_argument("UnitaryPropagator: timestep must be >= 0");
  }
  const Eigen::Index dim = m.rows();
  const double defect =
      (m.adjoint() * m - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (defect > kUnitaryTol) {
    throw std::invalid_argument("UnitaryPropagator: matrix is not unitary within 1e-10");
  }
  return UnitaryPropagator(std::move(m), timestep);
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.n_qubits() + b.n_qubits() > kMaxQubits) {
    throw std::invalid_argument(
        "tensor_product: combined register exceeds " + std::to_string(kMaxQubits) +
        " qubits");
  }
  const Eigen::Index da = a.dim();
  const Eigen::Index db = b.dim();
  ComplexMatrix out(da * db, da * db);
  for (Eigen::Index ia = 0; ia < da; ++ia) {
    for (Eigen::Index ja = 0; ja < da; ++ja) {
      out.block(ia * db, ja * db, db, db) = a.matrix()(ia, ja) * b.matrix();
    }
  }
  return DensityMatrix::from_matrix(std::move(out));
}

HermitianOperator pauli_z_string(const std::set<int>& sites, int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("pauli_z_string: n_qubits out of range");
  }
  std::uint64_t site_mask = 0;
  for (const int q : sites) {
    if (q < 0 || q >= n_qubits) {
      throw std::invalid_argument("pauli_z_string: site index out of range");
    }
    site_mask |= 1ULL << (n_qubits - 1 - q);
  }
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const int parity =
        std::popcount(static_cast<std::uint64_t>(b) & site_mask) & 1;
    m(b, b) = parity ? -1.0 : 1.0;
  }
  return HermitianOperator::from_matrix(std::move(m));
}

double expectation(const HermitianOperator& obs, const DensityMatrix& rho) {
  if (obs.dim() != rho.dim()) {
    throw std::invalid_argument("expectation: operator/state dimension mismatch");
  }
  // Tr[O rho] = sum_ij O_ij rho_ji, computed without forming the product.
  const Complex value =
      obs.matrix().cwiseProduct(rho.matrix().transpose()).sum();
  if (std::abs(value.imag()) > kImagExpectationTol) {
    throw std::runtime_error(
        "expectation: imaginary part exceeds 1e-10 (invariant violation)");
  }
  return value.real();
}

EigenDecomposition hermitian_eigendecomposition(const HermitianOperator& op) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(op.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eigendecomposition: solver failed to converge");
  }
  // Eigen returns the eigenvalues sorted ascending with aligned columns.
  return EigenDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

RealVector diagonal_probabilities(const DensityMatrix& rho) {
  RealVector probs = rho.matrix().diagonal().real();
  double sum = 0.0;
  for (Eigen::Index b = 0; b < probs.size(); ++b) {
    if (probs(b) < kMinEigenvalueTol) {
      throw std::invalid_argument(
          "diagonal_probabilities: negative diagonal entry beyond tolerance");
    }
    probs(b) = std::max(probs(b), 0.0);
    sum += probs(b);
  }
  return probs / sum;
}

}  // namespace qelm
