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

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "oracle.hpp"

using qrem::ProbabilityVector;
using qrem::SpamModel;

namespace {

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t size) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(size);
  for (auto& v : p) v = u(rng);
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
  return p;
}

SpamModel random_model(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> r(0.0, 0.1);
  std::vector<double> d0(n), d1(n), q(n);
  for (std::size_t i = 0; i < n; ++i) {
    d0[i] = r(rng);
    d1[i] = r(rng);
    q[i] = r(rng);
  }
  return SpamModel(d0, d1, q);
}

}  // namespace

TEST(SpamModel, RejectsBadRates) {
  EXPECT_THROW(SpamModel::uniform(2, 0.5, 0.0, 0.0), qrem::DomainError);
  EXPECT_THROW(SpamModel::uniform(2, 0.0, -0.1, 0.0), qrem::DomainError);
  EXPECT_THROW(SpamModel::uniform(2, 0.0, 0.0, std::nan("")), qrem::DomainError);
  EXPECT_THROW(SpamModel({0.0}, {0.0, 0.0}, {0.0}), qrem::DimensionError);
}

TEST(SpamModel, MatricesAreColumnStochastic) {
  const auto m = SpamModel::uniform(1, 0.02, 0.05, 0.01);
  for (const auto& a : {m.readout_matrix(0), m.init_matrix(0), m.calibrated_matrix(0)})
    EXPECT_LT((a.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-15);
  EXPECT_DOUBLE_EQ(m.readout_matrix(0)(1, 0), 0.02);
  EXPECT_DOUBLE_EQ(m.readout_matrix(0)(0, 1), 0.05);
}

TEST(SpamModel, MitigationInvertsCalibration) {
  std::mt19937_64 rng(3);
  const auto m = random_model(rng, 20);
  for (std::size_t i = 0; i < m.n_qubits(); ++i)
    EXPECT_LT((m.mitigation_matrix(i) * m.calibrated_matrix(i) - Eigen::Matrix2d::Identity())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-13);
}

TEST(SpamModel, ParsesRecordsAndShorthand) {
  const auto m = qrem::parse_spam_model("# rates\n1, 0.02, 0.03, 0.001\n0, 0.01, 0.04, 0.002\n");
  ASSERT_EQ(m.n_qubits(), 2u);
  EXPECT_DOUBLE_EQ(m.delta0(0), 0.01);
  EXPECT_DOUBLE_EQ(m.delta1(1), 0.03);
  EXPECT_DOUBLE_EQ(m.q(0), 0.002);
  EXPECT_FALSE(m.has_uniform_q());
  const auto u = qrem::parse_spam_model("uniform: 0.02 0.03 0.01 5\n");
  EXPECT_EQ(u.n_qubits(), 5u);
  EXPECT_TRUE(u.has_uniform_q());
  EXPECT_THROW(qrem::parse_spam_model("0 0.1 0.1 0.1\n0 0.1 0.1 0.1\n"), qrem::ParseError);
  EXPECT_THROW(qrem::parse_spam_model("0 0.1 0.1 0.7\n"), qrem::ParseError);
  EXPECT_THROW(qrem::parse_spam_model("3 0.1 0.1 0.1\n"), qrem::ParseError);
  EXPECT_THROW(qrem::parse_spam_model("0 0.1 0.1\n"), qrem::ParseError);
  EXPECT_THROW(qrem::parse_spam_model(""), qrem::ParseError);
}

TEST(ProbabilityVector, ValidatesMeasuredButNotMitigated) {
  EXPECT_THROW(ProbabilityVector({0.5, 0.6}), qrem::DomainError);
  EXPECT_THROW(ProbabilityVector({1.2, -0.2}), qrem::DomainError);
  EXPECT_THROW(ProbabilityVector({0.5, 0.25, 0.25}), qrem::DimensionError);
  const auto q = ProbabilityVector::mitigated({1.2, -0.2});
  EXPECT_TRUE(q.is_quasi());
  EXPECT_DOUBLE_EQ(q.parity_expectation(), 1.4);
}

TEST(Assignment, FactoredMatchesDense) {
  std::mt19937_64 rng(5);
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto m = random_model(rng, k + 2);
    std::vector<std::size_t> qubits;
    for (std::size_t i = 0; i < k; ++i) qubits.push_back(k + 1 - i);
    const auto p = random_distribution(rng, std::size_t{1} << k);
    const Eigen::MatrixXd dense = qrem::calibrated_assignment_matrix(m, qubits);
    const auto fast = qrem::apply_factors(qrem::calibrated_factors(m, qubits), p);
    const Eigen::VectorXd slow = dense * Eigen::Map<const Eigen::VectorXd>(p.data(), p.size());
    for (std::size_t b = 0; b < p.size(); ++b) EXPECT_NEAR(fast[b], slow(b), 1e-15);

    std::vector<Eigen::Matrix2d> f;
    for (std::size_t q : qubits) f.push_back(m.calibrated_matrix(q));
    Eigen::MatrixXd kron = Eigen::MatrixXd::Identity(1, 1);
    for (const auto& fi : f) kron = Eigen::kroneckerProduct(Eigen::MatrixXd(fi), kron).eval();
    EXPECT_LT((kron - dense).cwiseAbs().maxCoeff(), 1e-15);

    const auto measured = ProbabilityVector(fast);
    const auto a = qrem::conventional_qrem(measured, dense);
    const auto b = qrem::conventional_qrem(measured, qrem::calibrated_factors(m, qubits));
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-12);
      EXPECT_NEAR(a[i], p[i], 1e-12);
    }
  }
}

TEST(Assignment, RejectsBadQubitLists) {
  const auto m = SpamModel::ideal(3);
  EXPECT_THROW(qrem::readout_factors(m, std::vector<std::size_t>{0, 0}), qrem::DomainError);
  EXPECT_THROW(qrem::readout_factors(m, std::vector<std::size_t>{3}), qrem::DomainError);
  const auto big = SpamModel::ideal(20);
  std::vector<std::size_t> all(15);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_THROW(qrem::assignment_matrix(big, all), qrem::DomainError);
  EXPECT_THROW(qrem::apply_factors(qrem::readout_factors(m, std::vector<std::size_t>{0}),
                                   std::vector<double>{1, 0, 0, 0}),
               qrem::DimensionError);
}

TEST(ConventionalQrem, SingleQubitClosedForm) {
  const double d0 = 0.03, d1 = 0.05;
  for (double q : {0.0, 0.001, 0.01, 0.06, 0.2}) {
    const auto m = SpamModel::uniform(1, d0, d1, q);
    for (double z : {1.0, 0.4, -0.7}) {
      // A perfectly prepared state read through M only.
      const double p0 = (1 + z) / 2;
      const Eigen::Vector2d raw = m.readout_matrix(0) * Eigen::Vector2d(p0, 1 - p0);
      const auto mit = qrem::conventional_qrem(
          ProbabilityVector({raw(0), raw(1)}), qrem::calibrated_factors(m, std::vector<std::size_t>{0}));
      EXPECT_NEAR(mit.parity_expectation(), z / (1 - 2 * q), 1e-13);
      EXPECT_NEAR(qrem::qrem_z_expectation(z, q), z / (1 - 2 * q), 1e-15);
    }
  }
}

TEST(ConventionalQrem, ReturnsQuasiProbabilitiesUnclipped) {
  const auto m = SpamModel::uniform(1, 0.0, 0.0, 0.1);
  const auto mit = qrem::conventional_qrem(ProbabilityVector({1.0, 0.0}),
                                          qrem::calibrated_factors(m, std::vector<std::size_t>{0}));
  EXPECT_TRUE(mit.is_quasi());
  EXPECT_NEAR(mit[0], 1.125, 1e-14);
  EXPECT_NEAR(mit[1], -0.125, 1e-14);
  EXPECT_NEAR(mit.total(), 1.0, 1e-14);
}

TEST(ConventionalQrem, SingularCalibrationThrows) {
  Eigen::MatrixXd s(2, 2);
  s << 0.5, 0.5, 0.5, 0.5;
  EXPECT_THROW(qrem::conventional_qrem(ProbabilityVector({0.5, 0.5}), s),
               qrem::SingularMatrixError);
  EXPECT_THROW(qrem::conventional_qrem(ProbabilityVector({0.5, 0.5}),
                                       qrem::LocalFactors{Eigen::Matrix2d(s)}),
               qrem::SingularMatrixError);
  EXPECT_THROW(qrem::conventional_qrem(ProbabilityVector({0.5, 0.5}), Eigen::MatrixXd::Identity(4, 4)),
               qrem::DimensionError);
}

TEST(Bounds, DeltaValues) {
  EXPECT_NEAR(qrem::safety_bound_delta(50, 0.001), 0.10527, 1e-4);
  EXPECT_NEAR(qrem::safety_bound_delta(50, 0.001), std::pow(0.998, -50) - 1, 1e-14);
  EXPECT_DOUBLE_EQ(qrem::safety_bound_delta(10, 0.0), 0.0);
  EXPECT_NEAR(qrem::safety_bound_delta(1e-3, 0.001), std::expm1(-1e-3 * std::log(0.998)), 1e-20);
  const std::vector<double> qs = {0.001, 0.002, 0.01};
  EXPECT_NEAR(qrem::safety_bound_delta(qs), 1 / (0.998 * 0.996 * 0.98) - 1, 1e-14);
  EXPECT_NEAR(qrem::first_order_delta(qs), 0.026, 1e-15);
  EXPECT_THROW(qrem::safety_bound_delta(5, 0.5), qrem::DomainError);
  EXPECT_THROW(qrem::safety_bound_delta(-1, 0.1), qrem::DomainError);
  EXPECT_THROW(qrem::first_order_delta(std::vector<double>{0.6}), qrem::DomainError);
}

TEST(Bounds, BiasFactor) {
  EXPECT_DOUBLE_EQ(qrem::qrem_bias_factor(0, 0.3), 1.0);
  EXPECT_NEAR(qrem::qrem_bias_factor(3, 0.05), 1 / 0.729, 1e-14);
  EXPECT_THROW(qrem::qrem_bias_factor(std::vector<double>{0.5}), qrem::DomainError);
}

TEST(Bounds, ContourInvertsDelta) {
  EXPECT_NEAR(qrem::bound_contour(0.001, 0.1), 47.6, 0.05);
  for (double q : {1e-4, 1e-3, 1e-2, 0.1})
    for (double b : {0.01, 0.1, 1.0})
      EXPECT_NEAR(qrem::safety_bound_delta(qrem::bound_contour(q, b), q), b, 1e-12 * (1 + b));
  EXPECT_EQ(qrem::bound_contour(0.0, 0.1), std::numeric_limits<double>::infinity());
  EXPECT_THROW(qrem::bound_contour(0.01, 0.0), qrem::DomainError);
}
