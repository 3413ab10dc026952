// Copyright 2026 The qrem-bias Authors
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

#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"

using qrem::DensityMatrix;
using qrem::FermionExcitation;
using qrem::PauliSumOperator;
using qrem::SpamModel;

namespace {

PauliSumOperator h2() {
  return qrem::parse_pauli_sum(oracle::read_file(QREM_DATA_DIR "/h2_sto3g_jw.txt"));
}

double ground_energy(const PauliSumOperator& h) {
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::dense(h));
  return es.eigenvalues()(0);
}

// prod_k exp(theta_slot(k) G_k), first excitation applied first.
oracle::Mat dense_ansatz(const qrem::AnsatzSpec& spec, const std::vector<double>& theta) {
  const auto d = Eigen::Index{1} << spec.n_qubits;
  oracle::Mat u = oracle::Mat::Identity(d, d);
  for (const auto& e : spec.excitations)
    u = ((theta[e.slot] * oracle::excitation_generator(e, spec.n_qubits)).exp() * u).eval();
  return u;
}

}  // namespace

TEST(Reference, HartreeFockState) {
  EXPECT_EQ(qrem::hf_state(4, 2), 0b0011u);
  EXPECT_EQ(qrem::hf_state(6, 0), 0u);
  EXPECT_THROW(qrem::hf_state(2, 3), qrem::DomainError);
  const auto rho = qrem::apply_circuit(DensityMatrix(4), qrem::hf_prep_circuit(4, 2));
  EXPECT_DOUBLE_EQ(rho.matrix()(3, 3).real(), 1.0);
  EXPECT_NEAR(qrem::hf_energy(h2(), 2), -1.11676, 1e-4);
}

TEST(Reference, NoisyReferenceFlipsResetNoise) {
  const auto spam = SpamModel::uniform(2, 0.0, 0.0, 0.1);
  const auto rho = qrem::noisy_reference_state(spam, 1);
  EXPECT_NEAR(rho.matrix()(1, 1).real(), 0.81, 1e-15);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 0.09, 1e-15);
}

TEST(Ansatz, GeneratedMatchesBundledFile) {
  const auto gen = qrem::generate_uccsd(4, 2);
  const auto file = qrem::parse_ansatz(oracle::read_file(QREM_DATA_DIR "/h2_uccsd.txt"));
  EXPECT_EQ(gen.parameter_count(), 3u);
  ASSERT_EQ(file.excitations.size(), gen.excitations.size());
  for (std::size_t k = 0; k < gen.excitations.size(); ++k) {
    EXPECT_EQ(file.excitations[k].orbitals, gen.excitations[k].orbitals);
    EXPECT_EQ(file.excitations[k].slot, gen.excitations[k].slot);
  }
  EXPECT_EQ(qrem::generate_uccsd(4, 2, {.share_spin_partners = true}).parameter_count(), 2u);
  EXPECT_EQ(qrem::generate_uccsd(8, 4).excitations.size(), 8u + 18u);
}

TEST(Ansatz, ParseErrors) {
  auto line_of = [](const char* text) {
    try {
      qrem::parse_ansatz(text);
    } catch (const qrem::ParseError& e) {
      return e.line();
    }
    return std::size_t{999};
  };
  EXPECT_EQ(line_of("4 2\nQ 1 0\n"), 2u);
  EXPECT_EQ(line_of("4 2\nS 2 0\nS 1\n"), 3u);
  EXPECT_EQ(line_of("4\n"), 1u);
  EXPECT_EQ(line_of("4 2\nS x 0\n"), 2u);
  EXPECT_EQ(line_of("4 2\nS 1 1\n"), 2u);
  EXPECT_EQ(line_of("4 2\nS 5 0\n"), 0u);
  EXPECT_EQ(line_of("4 2\nS 2 0 1\n"), 0u);
  EXPECT_EQ(line_of(""), 0u);
  EXPECT_EQ(qrem::parse_ansatz("4 2\nS 2 0\nS 3 1 0\n").parameter_count(), 1u);
}

TEST(Ansatz, ZeroAnglesGiveIdentity) {
  const auto spec = qrem::generate_uccsd(4, 2);
  const auto c = qrem::uccsd_circuit(spec, std::vector<double>(3, 0.0));
  EXPECT_LT(oracle::phase_distance(oracle::unitary(c), oracle::Mat::Identity(16, 16)), 1e-12);
  EXPECT_THROW(qrem::uccsd_circuit(spec, std::vector<double>(2, 0.0)), qrem::DimensionError);
}

TEST(Ansatz, CircuitMatchesFermionicExponential) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> angle(-1.5, 1.5);
  std::vector<qrem::AnsatzSpec> specs = {qrem::generate_uccsd(4, 2), qrem::tfim_ansatz(4),
                                        qrem::generate_uccsd(6, 2, {.doubles = true})};
  for (const auto& spec : specs) {
    std::vector<double> theta(spec.parameter_count());
    for (auto& t : theta) t = angle(rng);
    const oracle::Mat u = oracle::unitary(qrem::uccsd_circuit(spec, theta));
    const oracle::Mat want = dense_ansatz(spec, theta);
    const auto hf = static_cast<Eigen::Index>(qrem::hf_state(spec.n_qubits, spec.n_electrons));
    const oracle::Mat a = u.col(hf), b = want.col(hf);
    const oracle::cplx ph = (b.adjoint() * a)(0, 0);
    EXPECT_NEAR(std::abs(ph), 1.0, 1e-11);
    EXPECT_LT((a - ph * b).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(Ansatz, FusedRotationsMatchCircuit) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> angle(-1.5, 1.5);
  const auto spec = qrem::generate_uccsd(4, 2);
  std::vector<double> theta(3);
  for (auto& t : theta) t = angle(rng);
  const auto ref = qrem::noisy_reference_state(SpamModel::uniform(4, 0, 0, 0.05), 2);
  const auto fused = qrem::apply_ansatz(ref, qrem::uccsd_rotations(spec), theta);
  const auto gates = qrem::apply_circuit(ref, qrem::uccsd_circuit(spec, theta));
  EXPECT_LT((fused.matrix() - gates.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Vqe, ZeroAnglesGiveHartreeFock) {
  const auto h = h2();
  const auto spec = qrem::generate_uccsd(4, 2);
  const std::vector<double> zero(3, 0.0);
  qrem::VqeConfig clean;
  clean.pipeline = qrem::VqePipeline::kClean;
  EXPECT_NEAR(qrem::vqe_energy(h, spec, SpamModel::ideal(4), zero, clean), qrem::hf_energy(h, 2),
              1e-12);
  EXPECT_NEAR(qrem::vqe_energy(h, spec, SpamModel::uniform(4, 0.02, 0.03, 0.0), zero),
              qrem::hf_energy(h, 2), 1e-12);
}

TEST(Vqe, HydrogenReachesGroundEnergy) {
  const auto h = h2();
  qrem::VqeConfig cfg;
  cfg.pipeline = qrem::VqePipeline::kClean;
  const auto r = qrem::vqe_optimize(h, qrem::generate_uccsd(4, 2), SpamModel::ideal(4), cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.energy, ground_energy(h), 1e-6);
  EXPECT_NEAR(r.energy, -1.13728, 1e-4);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
  EXPECT_NEAR(qrem::vqe_energy(h, qrem::generate_uccsd(4, 2), SpamModel::ideal(4), r.theta, cfg),
              r.energy, 1e-12);
}

TEST(Vqe, TwoQubitHoppingModel) {
  const auto h = qrem::parse_pauli_sum("1 ZZ\n0.2 XX\n0.2 YY\n");
  EXPECT_NEAR(ground_energy(h), -1.4, 1e-12);
  const auto spec = qrem::generate_uccsd(2, 1, {.doubles = false, .spin_orbitals = false});
  ASSERT_EQ(spec.parameter_count(), 1u);
  const auto r = qrem::vqe_optimize(h, spec, SpamModel::uniform(2, 0.02, 0.03, 0.0));
  EXPECT_NEAR(r.energy, -1.4, 1e-6);
}

TEST(Vqe, MitigatedPipelineAtZeroResetMatchesClean) {
  const auto h = qrem::tfim_chain(4);
  const auto spec = qrem::tfim_ansatz(4);
  qrem::VqeConfig clean;
  clean.pipeline = qrem::VqePipeline::kClean;
  const auto a = qrem::vqe_optimize(h, spec, SpamModel::ideal(4), clean);
  const auto b = qrem::vqe_optimize(h, spec, SpamModel::uniform(4, 0.02, 0.03, 0.0));
  EXPECT_NEAR(a.energy, b.energy, 1e-6);
}

TEST(Vqe, ResetNoiseLowersMitigatedEnergy) {
  const auto h = qrem::tfim_chain(4);
  const auto spec = qrem::tfim_ansatz(4);
  qrem::VqeConfig cfg;
  cfg.pipeline = qrem::VqePipeline::kClean;
  const auto clean = qrem::vqe_optimize(h, spec, SpamModel::ideal(4), cfg);
  const auto noisy = qrem::vqe_optimize(h, spec, SpamModel::uniform(4, 0.0, 0.0, 0.01));
  EXPECT_LT(noisy.energy, clean.energy);
}

TEST(Vqe, GatePathMatchesFusedPath) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> angle(-1, 1);
  const auto h = qrem::tfim_chain(4);
  const auto spec = qrem::tfim_ansatz(4);
  const auto spam = SpamModel::uniform(4, 0.02, 0.03, 0.01);
  std::vector<double> theta(spec.parameter_count());
  for (auto& t : theta) t = angle(rng);
  const auto rho = qrem::apply_ansatz(qrem::noisy_reference_state(spam, 2),
                                      qrem::uccsd_rotations(spec), theta);
  EXPECT_NEAR(qrem::vqe_energy(h, spec, spam, theta), qrem::qrem_energy(rho, h, spam), 1e-12);
  qrem::VqeConfig zero_noise;
  zero_noise.gate_noise = 0.0;
  EXPECT_NEAR(qrem::vqe_energy(h, spec, spam, theta, zero_noise), qrem::qrem_energy(rho, h, spam),
              1e-12);
}

TEST(Vqe, SizeChecks) {
  const auto h = qrem::tfim_chain(4);
  EXPECT_THROW(qrem::vqe_optimize(h, qrem::tfim_ansatz(4), SpamModel::ideal(3)),
               qrem::DimensionError);
  EXPECT_THROW(qrem::vqe_optimize(h, qrem::tfim_ansatz(6), SpamModel::ideal(4)),
               qrem::DimensionError);
}

TEST(Tfim, ChainTerms) {
  const auto h = qrem::tfim_chain(3, 0.5, 2.0);
  EXPECT_EQ(h.size(), 5u);
  EXPECT_DOUBLE_EQ(h.coefficient_of(qrem::PauliString::from_label("XXI")), -0.5);
  EXPECT_DOUBLE_EQ(h.coefficient_of(qrem::PauliString::from_label("IIZ")), -2.0);
  EXPECT_THROW(qrem::tfim_chain(1), qrem::DomainError);
  EXPECT_EQ(qrem::tfim_ansatz(6).parameter_count(), 9u);
}

TEST(Qte, ZeroTimeHasNoError) {
  const auto r = qrem::qte_benchmark(h2(), 2, 0.0, 4, SpamModel::ideal(4));
  EXPECT_NEAR(r.trotter_error, 0.0, 1e-12);
  EXPECT_NEAR(r.total_error, 0.0, 1e-12);
  EXPECT_NEAR(r.e0, qrem::hf_energy(h2(), 2), 1e-15);
}

TEST(Qte, CommutingHamiltonianIsExact) {
  const auto h = qrem::parse_pauli_sum("0.5 ZZI\n-0.3 IZZ\n0.2 ZII\n");
  const auto r = qrem::qte_benchmark(h, 1, 1.7, 1, SpamModel::uniform(3, 0.01, 0.02, 0.03));
  EXPECT_NEAR(r.trotter_error, 0.0, 1e-12);
}

TEST(Qte, CleanEnergyIsConserved) {
  const auto h = h2();
  const auto spam = SpamModel::uniform(4, 0.02, 0.03, 0.0);
  const auto r = qrem::qte_benchmark(h, 2, 2.0, 1, spam);
  EXPECT_NEAR(r.e_t, r.e0, 1e-10);
}

TEST(Qte, TrotterErrorShrinksWithSteps) {
  const auto h = h2();
  const auto spam = SpamModel::ideal(4);
  const auto one = qrem::qte_benchmark(h, 2, 2.0, 1, spam);
  const auto many = qrem::qte_benchmark(h, 2, 2.0, 64, spam);
  EXPECT_LT(std::abs(many.trotter_error), std::abs(one.trotter_error) / 10);
}
