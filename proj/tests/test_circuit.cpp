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

using qrem::Circuit;
using qrem::PauliString;
using qrem::PauliSumOperator;

TEST(ExpPauli, SingleZDump) {
  EXPECT_EQ(qrem::exp_pauli_circuit(PauliString::from_label("Z"), 0.3).dump(), "RZ 0 -0.6\n");
}

TEST(ExpPauli, XYDump) {
  EXPECT_EQ(qrem::exp_pauli_circuit(PauliString::from_label("XY"), 0.3).dump(),
            "H 0\nHY 1\nCNOT 0 1\nRZ 1 -0.6\nCNOT 0 1\nH 0\nHY 1\n");
}

TEST(ExpPauli, SkipsIdentityQubits) {
  const auto c = qrem::exp_pauli_circuit(PauliString::from_label("ZIX"), 0.1);
  EXPECT_EQ(c.dump(), "H 2\nCNOT 0 2\nRZ 2 -0.2\nCNOT 0 2\nH 2\n");
  EXPECT_EQ(qrem::exp_pauli_circuit(PauliString::from_label("III"), 0.4).size(), 0u);
}

TEST(ExpPauli, XYMatchesMatrixExponential) {
  const auto p = PauliString::from_label("XY");
  const auto u = oracle::unitary(qrem::exp_pauli_circuit(p, 0.3));
  EXPECT_LT(oracle::phase_distance(u, oracle::expi(oracle::dense(p), 0.3)), 1e-12);
}

TEST(ExpPauli, RandomStringsMatchMatrixExponential) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 5;
    auto p = oracle::random_pauli(rng, n, false);
    if (trial % 3 == 0) p = PauliString::from_label("-" + p.label());
    const double theta = angle(rng);
    const auto u = oracle::unitary(qrem::exp_pauli_circuit(p, theta));
    EXPECT_LT(oracle::phase_distance(u, oracle::expi(oracle::dense(p), theta)), 1e-11)
        << p.to_string() << " " << theta;
  }
}

TEST(ExpPauli, RejectsNonHermitianAndMismatch) {
  Circuit c(2);
  EXPECT_THROW(qrem::append_exp_pauli(c, PauliString::from_label("iXZ"), 0.1), qrem::DomainError);
  EXPECT_THROW(qrem::append_exp_pauli(c, PauliString::from_label("X"), 0.1), qrem::DimensionError);
}

TEST(Circuit, SlotBindingRebindsAngles) {
  Circuit c(2);
  qrem::append_exp_pauli(c, PauliString::from_label("ZZ"), 0.0, 0, 0.5);
  qrem::append_exp_pauli(c, PauliString::from_label("-XI"), 0.0, 1, 1.0);
  ASSERT_EQ(c.slot_count(), 2u);
  const std::vector<double> theta = {0.4, 0.7};
  c.bind(theta);
  Circuit want(2);
  qrem::append_exp_pauli(want, PauliString::from_label("ZZ"), 0.2);
  qrem::append_exp_pauli(want, PauliString::from_label("-XI"), 0.7);
  EXPECT_EQ(c.dump(), want.dump());
  EXPECT_THROW(c.bind(std::vector<double>{1.0}), qrem::DimensionError);
  Circuit plain(1);
  plain.h(0);
  EXPECT_THROW(plain.bind_last(0, 1.0), qrem::DomainError);
  EXPECT_THROW(plain.cnot(0, 0), qrem::DomainError);
}

TEST(Trotter, OrderIsByMagnitudeThenLabel) {
  const PauliSumOperator h(2, {{0.2, PauliString::from_label("ZI")},
                               {-0.5, PauliString::from_label("XX")},
                               {0.2, PauliString::from_label("IZ")}});
  const auto order = qrem::trotter_order(h);
  EXPECT_EQ(order[0].string.label(), "XX");
  EXPECT_EQ(order[1].string.label(), "IZ");
  EXPECT_EQ(order[2].string.label(), "ZI");
}

TEST(Trotter, CommutingTermsAreExact) {
  const PauliSumOperator h(3, {{0.7, PauliString::from_label("ZZI")},
                               {-0.3, PauliString::from_label("IZZ")},
                               {0.4, PauliString::from_label("ZIZ")}});
  const auto u = oracle::unitary(qrem::trotterize(h, 1.3, 1));
  EXPECT_LT(oracle::phase_distance(u, oracle::expi(oracle::dense(h), 1.3)), 1e-12);
}

TEST(Trotter, ErrorShrinksWithSteps) {
  const PauliSumOperator h(1, {{1.0, PauliString::from_label("X")},
                               {1.0, PauliString::from_label("Z")}});
  const auto exact = oracle::expi(oracle::dense(h), 1.0);
  const double e1 = oracle::norm_distance(oracle::unitary(qrem::trotterize(h, 1.0, 1)), exact);
  const double e64 = oracle::norm_distance(oracle::unitary(qrem::trotterize(h, 1.0, 64)), exact);
  EXPECT_GT(e1, 0.1);
  EXPECT_GT(e1 / e64, 10.0);
  EXPECT_THROW(qrem::trotterize(h, 1.0, 0), qrem::DomainError);
}

TEST(Trotter, MatchesProductOfExponentials) {
  const auto h = qrem::parse_pauli_sum(oracle::read_file(QREM_DATA_DIR "/h2_sto3g_jw.txt"));
  const double t = 0.8;
  const std::size_t n_s = 3;
  oracle::Mat step = oracle::Mat::Identity(16, 16);
  for (const auto& term : qrem::trotter_order(h))
    step = (oracle::expi(oracle::dense(term.string), term.coefficient * t / n_s) * step).eval();
  oracle::Mat want = oracle::Mat::Identity(16, 16);
  for (std::size_t s = 0; s < n_s; ++s) want = (step * want).eval();
  EXPECT_LT(oracle::phase_distance(oracle::unitary(qrem::trotterize(h, t, n_s)), want), 1e-11);
}

TEST(Circuit, CliffordConversionPreservesUnitary) {
  qrem::CliffordCircuit c(3);
  c.h(0).cnot(0, 1).cz(1, 2).x(2);
  const auto u = oracle::unitary(qrem::to_circuit(c));
  const oracle::Mat want = oracle::embed(oracle::pauli('X'), 2, 3) *
                           oracle::controlled(oracle::pauli('Z'), 1, 2, 3) *
                           oracle::controlled(oracle::pauli('X'), 0, 1, 3) *
                           oracle::embed(oracle::hadamard(), 0, 3);
  EXPECT_LT((u - want).cwiseAbs().maxCoeff(), 1e-14);
}
