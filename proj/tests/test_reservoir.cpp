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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qelm/quantum.hpp"
#include "qelm/reservoir.hpp"
#include "qelm/rng.hpp"
#include "qelm/states.hpp"
#include "test_oracles.hpp"

using qelm::Complex;
using qelm::ComplexMatrix;
using qelm::CorrelationOrder;
using qelm::CouplingMatrix;
using qelm::DensityMatrix;
using qelm::FeatureSpec;
using qelm::HermitianOperator;
using qelm::RandomStream;
using qelm::RealVector;
using qelm::ShotPlan;
using qelm::ShotRecord;

namespace {

DensityMatrix maximally_mixed(Eigen::Index dim) {
  return DensityMatrix::from_matrix(ComplexMatrix::Identity(dim, dim) /
                                    static_cast<double>(dim));
}

DensityMatrix basis_projector(Eigen::Index dim, Eigen::Index index) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix::from_matrix(m);
}

CouplingMatrix pair_coupling(double j01, double scale) {
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(2, 2);
  values(0, 1) = values(1, 0) = j01;
  return CouplingMatrix::from_values(values, scale);
}

}  // namespace

TEST_CASE("coupling draws respect bounds, symmetry, and the zero diagonal") {
  RandomStream rng(17);
  const CouplingMatrix couplings = qelm::draw_couplings(6, 1.0, rng);
  const Eigen::MatrixXd& j = couplings.values();
  CHECK(j.rows() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(j(i, i) == 0.0);
    for (int k = 0; k < 6; ++k) {
      CHECK(j(i, k) == j(k, i));
      CHECK(std::abs(j(i, k)) <= 0.5);
    }
  }
}

TEST_CASE("coupling draws consume the stream row-major over pairs i < j") {
  RandomStream draw_stream(91);
  const Eigen::MatrixXd j = qelm::draw_couplings(4, 2.0, draw_stream).values();

  // Replay the identical stream by hand in the contractual order.
  RandomStream replay(91);
  for (int i = 0; i < 4; ++i) {
    for (int k = i + 1; k < 4; ++k) {
      CHECK(j(i, k) == replay.uniform(-1.0, 1.0));
    }
  }
}

TEST_CASE("coupling draws are seed-deterministic") {
  RandomStream a(5), b(5), c(6);
  const Eigen::MatrixXd ja = qelm::draw_couplings(5, 1.0, a).values();
  const Eigen::MatrixXd jb = qelm::draw_couplings(5, 1.0, b).values();
  const Eigen::MatrixXd jc = qelm::draw_couplings(5, 1.0, c).values();
  CHECK((ja - jb).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ja - jc).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("CouplingMatrix::from_values validates") {
  Eigen::MatrixXd bad_diag = Eigen::MatrixXd::Zero(2, 2);
  bad_diag(0, 0) = 0.1;
  CHECK_THROWS_AS(CouplingMatrix::from_values(bad_diag, 1.0), std::invalid_argument);

  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(2, 2);
  asym(0, 1) = 0.2;
  CHECK_THROWS_AS(CouplingMatrix::from_values(asym, 1.0), std::invalid_argument);

  Eigen::MatrixXd too_big = Eigen::MatrixXd::Zero(2, 2);
  too_big(0, 1) = too_big(1, 0) = 0.6;
  CHECK_THROWS_AS(CouplingMatrix::from_values(too_big, 1.0), std::invalid_argument);
  CHECK_NOTHROW(CouplingMatrix::from_values(too_big, 1.2));
}

TEST_CASE("hamiltonian: pure transverse field is diagonal h(n - 2 popcount)") {
  const HermitianOperator h = qelm::assemble_hamiltonian(pair_coupling(0.0, 1.0), 0.1);
  const ComplexMatrix& m = h.matrix();
  CHECK(m(0, 0).real() == doctest::Approx(0.2));
  CHECK(m(1, 1).real() == doctest::Approx(0.0));
  CHECK(m(2, 2).real() == doctest::Approx(0.0));
  CHECK(m(3, 3).real() == doctest::Approx(-0.2));
  CHECK((m - m.diagonal().asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hamiltonian: pure XX coupling has eigenvalues +-J twice") {
  const HermitianOperator h = qelm::assemble_hamiltonian(pair_coupling(0.25, 1.0), 0.0);
  const auto eig = qelm::hermitian_eigendecomposition(h);
  CHECK(eig.eigenvalues(0) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(eig.eigenvalues(1) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(eig.eigenvalues(2) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(eig.eigenvalues(3) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("hamiltonian: two-qubit spectrum at J = 0.3, h = 0.1") {
  // The {|00>, |11>} block is [[0.2, 0.3], [0.3, -0.2]] and the
  // {|01>, |10>} block is [[0, 0.3], [0.3, 0]], giving the spectrum
  // {-sqrt(0.13), -0.3, 0.3, sqrt(0.13)}.
  const HermitianOperator h = qelm::assemble_hamiltonian(pair_coupling(0.3, 1.0), 0.1);
  const auto eig = qelm::hermitian_eigendecomposition(h);
  CHECK(eig.eigenvalues(0) == doctest::Approx(-0.36055512754639896).epsilon(1e-13));
  CHECK(eig.eigenvalues(1) == doctest::Approx(-0.3).epsilon(1e-13));
  CHECK(eig.eigenvalues(2) == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(eig.eigenvalues(3) == doctest::Approx(0.36055512754639896).epsilon(1e-13));
}

TEST_CASE("hamiltonian matches the kron-chain oracle on random couplings") {
  RandomStream rng(808);
  for (const int n : {2, 3, 4}) {
    const CouplingMatrix couplings = qelm::draw_couplings(n, 1.0, rng);
    const double field = 0.37;
    const ComplexMatrix direct = qelm::assemble_hamiltonian(couplings, field).matrix();
    const ComplexMatrix reference =
        qelm_test::ising_hamiltonian_oracle(couplings.values(), field);
    CHECK((direct - reference).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("build_hamiltonian pairs the operator with its couplings") {
  RandomStream rng(99);
  const qelm::ReservoirSpec spec{4, 0.25, 1.0, 99};
  const auto [h, couplings] = qelm::build_hamiltonian(spec, rng);
  CHECK((h.matrix() - qelm::assemble_hamiltonian(couplings, 0.25).matrix())
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // The couplings are exactly what a fresh stream with the same seed draws.
  RandomStream replay(99);
  const Eigen::MatrixXd expected = qelm::draw_couplings(4, 1.0, replay).values();
  CHECK((couplings.values() - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evolution: dt = 0 is the identity channel") {
  RandomStream rng(3);
  const DensityMatrix rho =
      qelm::random_density({qelm::StateEnsemble::kHilbertSchmidtMixed, 8}, rng);
  const CouplingMatrix couplings = qelm::draw_couplings(3, 1.0, rng);
  const HermitianOperator h = qelm::assemble_hamiltonian(couplings, 0.1);
  const DensityMatrix evolved = qelm::evolve(rho, h, 0.0);
  CHECK((evolved.matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("evolution: diagonal states commute with a pure field") {
  // H diagonal and rho diagonal => U rho U^dag = rho at every timestep.
  const HermitianOperator h = qelm::assemble_hamiltonian(pair_coupling(0.0, 1.0), 0.7);
  const DensityMatrix rho = basis_projector(4, 2);
  for (const double dt : {0.5, 3.0, 25.0}) {
    const DensityMatrix evolved = qelm::evolve(rho, h, dt);
    CHECK((evolved.matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("evolution: x rotation by pi/2 maps |0> to |1>") {
  // U = exp(-i sigma^x pi/2) = -i sigma^x up to global phase, so conjugation
  // sends |0><0| exactly to |1><1|.
  const HermitianOperator h =
      HermitianOperator::from_matrix(qelm_test::pauli_x_2x2());
  const DensityMatrix evolved =
      qelm::evolve(basis_projector(2, 0), h, std::numbers::pi / 2.0);
  CHECK(std::abs(evolved.matrix()(1, 1).real() - 1.0) <= 1e-10);
  CHECK(std::abs(evolved.matrix()(0, 0)) <= 1e-10);
}

TEST_CASE("evolution preserves spectrum and purity") {
  RandomStream rng(41);
  const DensityMatrix rho =
      qelm::random_density({qelm::StateEnsemble::kHilbertSchmidtMixed, 16}, rng);
  const CouplingMatrix couplings = qelm::draw_couplings(4, 1.0, rng);
  const HermitianOperator h = qelm::assemble_hamiltonian(couplings, 0.1);
  const DensityMatrix evolved = qelm::evolve(rho, h, 10.0);

  CHECK(evolved.purity() == doctest::Approx(rho.purity()).epsilon(1e-9));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> before(rho.matrix());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> after(evolved.matrix());
  CHECK((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("evolve equals evolve_with on the cached propagator") {
  RandomStream rng(6);
  const DensityMatrix rho =
      qelm::random_density({qelm::StateEnsemble::kHilbertSchmidtMixed, 8}, rng);
  const CouplingMatrix couplings = qelm::draw_couplings(3, 1.0, rng);
  const HermitianOperator h = qelm::assemble_hamiltonian(couplings, 0.3);
  const auto eig = qelm::hermitian_eigendecomposition(h);
  for (const double dt : {0.1, 1.0, 10.0}) {
    const DensityMatrix direct = qelm::evolve(rho, h, dt);
    const DensityMatrix cached =
        qelm::evolve_with(qelm::make_propagator(eig, dt), rho);
    CHECK((direct.matrix() - cached.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("feature counts") {
  const FeatureSpec local{true, CorrelationOrder::kLocalZ};
  const FeatureSpec pairs{true, CorrelationOrder::kLocalPlusZZ};
  const FeatureSpec no_bias{false, CorrelationOrder::kLocalZ};
  CHECK(local.feature_count(5) == 6);
  CHECK(pairs.feature_count(5) == 16);
  CHECK(no_bias.feature_count(5) == 5);
  CHECK(pairs.feature_count(2) == 4);
  CHECK(std::string(qelm::correlation_order_name(CorrelationOrder::kLocalZ)) ==
        "local-z");
  CHECK(std::string(qelm::correlation_order_name(CorrelationOrder::kLocalPlusZZ)) ==
        "local-plus-zz");
}

TEST_CASE("exact features: fixed points") {
  const FeatureSpec spec{true, CorrelationOrder::kLocalPlusZZ};

  // The maximally mixed register has every Pauli expectation zero.
  const RealVector mixed = qelm::measure_features_exact(maximally_mixed(8), spec);
  CHECK(mixed.size() == 7);
  CHECK(mixed(0) == 1.0);
  CHECK(mixed.tail(6).cwiseAbs().maxCoeff() <= 1e-14);

  // |000> has every single and pair expectation exactly +1.
  const RealVector ground = qelm::measure_features_exact(basis_projector(8, 0), spec);
  CHECK((ground - RealVector::Ones(7)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("exact features: ordering is bias, singles, then pairs lexicographic") {
  // Build |0> (x) |1> (x) |0>: z-values (+1, -1, +1), so the pair features
  // (0,1), (0,2), (1,2) are (-1, +1, -1). Any permutation of the contract
  // order would be caught.
  const DensityMatrix product = basis_projector(8, 2);  // binary 010
  const FeatureSpec spec{true, CorrelationOrder::kLocalPlusZZ};
  const RealVector f = qelm::measure_features_exact(product, spec);
  const double expected[] = {1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0};
  REQUIRE(f.size() == 7);
  for (int i = 0; i < 7; ++i) {
    CHECK(f(i) == doctest::Approx(expected[i]).epsilon(1e-14));
  }

  // Without bias the same vector drops its leading entry.
  const RealVector no_bias =
      qelm::measure_features_exact(product, {false, CorrelationOrder::kLocalPlusZZ});
  CHECK((no_bias - f.tail(6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exact features: input marginals of a composed Werner register") {
  // At dt = 0 the input qubits of werner (x) reservoir still carry maximally
  // mixed marginals, so their local-z features vanish while reservoir qubits
  // report whatever the reservoir state dictates.
  RandomStream rng(10);
  const DensityMatrix reservoir =
      qelm::random_density({qelm::StateEnsemble::kHilbertSchmidtMixed, 8}, rng);
  const DensityMatrix joint =
      qelm::compose_initial(qelm::make_werner({0.8, 2}), reservoir, 5);
  const RealVector f =
      qelm::measure_features_exact(joint, {true, CorrelationOrder::kLocalZ});
  REQUIRE(f.size() == 6);
  CHECK(std::abs(f(1)) <= 1e-12);
  CHECK(std::abs(f(2)) <= 1e-12);
  // Reservoir qubits match the expectation computed on the reservoir alone.
  for (int q = 0; q < 3; ++q) {
    const double expected =
        qelm::expectation(qelm::pauli_z_string({q}, 3), reservoir);
    CHECK(f(3 + q) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("features_from_probabilities agrees with the expectation route") {
  RandomStream rng(22);
  const DensityMatrix rho =
      qelm::random_density({qelm::StateEnsemble::kHilbertSchmidtMixed, 16}, rng);
  const FeatureSpec spec{true, CorrelationOrder::kLocalPlusZZ};
  const RealVector via_probs =
      qelm::features_from_probabilities(qelm::diagonal_probabilities(rho), spec);
  const RealVector via_expect = qelm::measure_features_exact(rho, spec);
  CHECK((via_probs - via_expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("shot plans validate") {
  CHECK(ShotPlan::exact().is_exact());
  CHECK_FALSE(ShotPlan::finite(100).is_exact());
  CHECK(ShotPlan::finite(100).n_measurements == 100);
  CHECK_THROWS_AS(ShotPlan::finite(0), std::invalid_argument);
  CHECK_THROWS_AS(ShotPlan::finite(-5), std::invalid_argument);
}

TEST_CASE("sampling: deterministic states produce deterministic records") {
  RandomStream rng(1);
  const ShotRecord record =
      qelm::sample_bitstrings(basis_projector(8, 0), ShotPlan::finite(200), rng);
  CHECK(record.n_qubits == 3);
  CHECK(record.total == 200);
  REQUIRE(record.counts.size() == 1);
  CHECK(record.counts.at(0) == 200);
}

TEST_CASE("sampling: the singlet only ever yields 01 and 10") {
  RandomStream rng(2);
  const ShotRecord record =
      qelm::sample_bitstrings(qelm::make_werner({1.0, 2}), ShotPlan::finite(5000), rng);
  long total = 0;
  for (const auto& [bits, count] : record.counts) {
    CHECK((bits == 1 || bits == 2));
    total += count;
  }
  CHECK(total == 5000);
  // Both outcomes are equally likely; 5 sigma on 5000 shots is ~177.
  CHECK(std::abs(record.counts.at(1) - 2500) < 250);
}

TEST_CASE("sampling matches sample_from_probabilities on the same stream") {
  RandomStream rng_a(33), rng_b(33);
  const DensityMatrix rho = qelm::make_werner({0.5, 2});
  const ShotRecord direct = qelm::sample_bitstrings(rho, ShotPlan::finite(1000), rng_a);
  const ShotRecord via_probs = qelm::sample_from_probabilities(
      qelm::diagonal_probabilities(rho), 2, ShotPlan::finite(1000), rng_b);
  CHECK(direct.counts == via_probs.counts);
  CHECK(direct.total == via_probs.total);
}

TEST_CASE("sampling rejects exact plans") {
  RandomStream rng(4);
  CHECK_THROWS_AS(qelm::sample_bitstrings(maximally_mixed(4), ShotPlan::exact(), rng),
                  std::invalid_argument);
}

TEST_CASE("shot estimates: hand-built records") {
  const FeatureSpec spec{true, CorrelationOrder::kLocalPlusZZ};

  // 50x "01" + 50x "10": both singles average to zero, the pair to -1.
  ShotRecord balanced;
  balanced.n_qubits = 2;
  balanced.total = 100;
  balanced.counts = {{1, 50}, {2, 50}};
  const RealVector f = qelm::estimate_features_from_shots(balanced, spec);
  REQUIRE(f.size() == 4);
  CHECK(f(0) == 1.0);
  CHECK(f(1) == doctest::Approx(0.0));
  CHECK(f(2) == doctest::Approx(0.0));
  CHECK(f(3) == doctest::Approx(-1.0));

  // All shots on "00": everything is +1.
  ShotRecord uniform;
  uniform.n_qubits = 2;
  uniform.total = 100;
  uniform.counts = {{0, 100}};
  const RealVector g = qelm::estimate_features_from_shots(uniform, spec);
  CHECK((g - RealVector::Ones(4)).cwiseAbs().maxCoeff() == 0.0);

  ShotRecord empty;
  empty.n_qubits = 2;
  CHECK_THROWS_AS(qelm::estimate_features_from_shots(empty, spec),
                  std::invalid_argument);
}

TEST_CASE("shot estimates: singlet anticorrelation is exact at any budget") {
  // Every singlet shot is 01 or 10, so the zz estimator is exactly -1
  // regardless of sampling noise in the singles.
  RandomStream rng(7);
  const ShotRecord record =
      qelm::sample_bitstrings(qelm::make_werner({1.0, 2}), ShotPlan::finite(5000), rng);
  const RealVector f = qelm::estimate_features_from_shots(
      record, {true, CorrelationOrder::kLocalPlusZZ});
  CHECK(f(3) == -1.0);
  CHECK(std::abs(f(1)) <= 4.0 / std::sqrt(5000.0));
}

TEST_CASE("shot estimates: plus state singles concentrate at zero") {
  // |+><+| on one qubit: <z> = 0 with per-shot variance 1, so the estimate
  // lies within 4/sqrt(1000) with overwhelming probability.
  ComplexMatrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  RandomStream rng(11);
  const ShotRecord record = qelm::sample_bitstrings(
      DensityMatrix::from_matrix(plus), ShotPlan::finite(1000), rng);
  const RealVector f = qelm::estimate_features_from_shots(
      record, {true, CorrelationOrder::kLocalZ});
  CHECK(std::abs(f(1)) <= 4.0 / std::sqrt(1000.0));
}

TEST_CASE("shot estimates converge at the statistical 1/sqrt(N) rate") {
  // RMS error of <z> on the maximally mixed qubit across repeats should fall
  // like N^-1/2; fit the log-log slope over three decades and require it
  // within 0.1 of -0.5.
  const std::vector<long> budgets{100, 1000, 10000, 100000};
  const int kRepeats = 64;
  RandomStream rng(2718);
  std::vector<double> log_n, log_rms;
  for (const long n : budgets) {
    double sq_sum = 0.0;
    for (int r = 0; r < kRepeats; ++r) {
      const ShotRecord record =
          qelm::sample_bitstrings(maximally_mixed(2), ShotPlan::finite(n), rng);
      const RealVector f = qelm::estimate_features_from_shots(
          record, {false, CorrelationOrder::kLocalZ});
      sq_sum += f(0) * f(0);
    }
    log_n.push_back(std::log(static_cast<double>(n)));
    log_rms.push_back(0.5 * std::log(sq_sum / kRepeats));
  }
  // Least-squares slope of log RMS vs log N.
  double mx = 0, my = 0;
  for (size_t i = 0; i < log_n.size(); ++i) {
    mx += log_n[i];
    my += log_rms[i];
  }
  mx /= static_cast<double>(log_n.size());
  my /= static_cast<double>(log_n.size());
  double num = 0, den = 0;
  for (size_t i = 0; i < log_n.size(); ++i) {
    num += (log_n[i] - mx) * (log_rms[i] - my);
    den += (log_n[i] - mx) * (log_n[i] - mx);
  }
  const double slope = num / den;
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
  CHECK(std::abs(slope + 0.5) <= 0.1);
}
