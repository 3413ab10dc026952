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

#pragma once

/**
 * @file
 * State-preparation-and-measurement error model and conventional readout
 * error mitigation.
 *
 * Per qubit i the model holds readout flip rates delta0_i (read 1 given 0),
 * delta1_i (read 0 given 1) and an initialization flip rate q_i. Matrices act
 * on column probability vectors, p_noisy = M p_ideal, so every assignment
 * matrix is column-stochastic:
 *
 *     M_i = [[1 - delta0, delta1],      Q_i = [[1 - q, q],
 *            [delta0, 1 - delta1]]             [q, 1 - q]]
 *
 * Calibration with imperfect initialization measures M_i Q_i; conventional
 * mitigation applies its inverse Lambda_i = Q_i^{-1} M_i^{-1} to data.
 */

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrem/detail/text.hpp"
#include "qrem/error.hpp"

namespace qrem {

/// Largest register for which dense 2^k x 2^k matrices are built.
inline constexpr std::size_t kMaxDenseAssignmentQubits = 14;

class SpamModel {
 public:
  SpamModel() = default;

  /// All vectors must have equal length; every rate must lie in [0, 1/2).
  SpamModel(std::vector<double> delta0, std::vector<double> delta1,
            std::vector<double> q)
      : delta0_(std::move(delta0)), delta1_(std::move(delta1)), q_(std::move(q)) {
    if (delta0_.size() != delta1_.size() || delta0_.size() != q_.size())
      throw DimensionError("SpamModel: rate vectors differ in length");
    auto check = [](const std::vector<double>& v, const char* name) {
      for (double r : v)
        if (!(r >= 0.0 && r < 0.5))
          throw DomainError(std::string("SpamModel: ") + name +
                            " rate outside [0, 0.5): " + detail::format_double(r));
    };
    check(delta0_, "delta0");
    check(delta1_, "delta1");
    check(q_, "q");
  }

  static SpamModel uniform(std::size_t n, double delta0, double delta1, double q) {
    return SpamModel(std::vector<double>(n, delta0), std::vector<double>(n, delta1),
                     std::vector<double>(n, q));
  }

  /// Perfect preparation and readout.
  static SpamModel ideal(std::size_t n) { return uniform(n, 0.0, 0.0, 0.0); }

  std::size_t n_qubits() const noexcept { return q_.size(); }
  double delta0(std::size_t i) const { return delta0_.at(i); }
  double delta1(std::size_t i) const { return delta1_.at(i); }
  double q(std::size_t i) const { return q_.at(i); }
  const std::vector<double>& q_list() const noexcept { return q_; }
  const std::vector<double>& delta0_list() const noexcept { return delta0_; }
  const std::vector<double>& delta1_list() const noexcept { return delta1_; }

  bool has_uniform_q() const {
    return std::adjacent_find(q_.begin(), q_.end(), std::not_equal_to<>()) == q_.end();
  }

  Eigen::Matrix2d readout_matrix(std::size_t i) const {
    Eigen::Matrix2d m;
    m << 1.0 - delta0(i), delta1(i), delta0(i), 1.0 - delta1(i);
    return m;
  }

  Eigen::Matrix2d init_matrix(std::size_t i) const {
    Eigen::Matrix2d m;
    m << 1.0 - q(i), q(i), q(i), 1.0 - q(i);
    return m;
  }

  /// M_i Q_i, the matrix a calibration run with noisy reset observes.
  Eigen::Matrix2d calibrated_matrix(std::size_t i) const {
    return readout_matrix(i) * init_matrix(i);
  }

  /// Lambda_i = Q_i^{-1} M_i^{-1} in the closed form with 1/(1 - 2q) entries.
  Eigen::Matrix2d mitigation_matrix(std::size_t i) const {
    const double s = 1.0 / (1.0 - 2.0 * q(i));
    Eigen::Matrix2d qinv;
    qinv << (1.0 - q(i)) * s, -q(i) * s, -q(i) * s, (1.0 - q(i)) * s;
    return qinv * readout_matrix(i).inverse();
  }

 private:
  std::vector<double> delta0_;
  std::vector<double> delta1_;
  std::vector<double> q_;
};

/// Reads a SpamModel config. Accepted lines:
///   `qubit, delta0, delta1, q`   one record per qubit (commas optional);
///   `uniform: delta0 delta1 q n` shorthand for n identical qubits.
/// Per-qubit records must cover 0..n-1 exactly once.
inline SpamModel parse_spam_model(std::string_view text) {
  const auto lines = detail::tokenize_lines(text, ',');
  if (lines.empty()) throw ParseError(0, "empty SPAM model");
  const auto& first = lines.front();
  if (first.tokens[0] == "uniform:" || first.tokens[0] == "uniform") {
    if (lines.size() != 1)
      throw ParseError(lines[1].number, "uniform shorthand must be the only record");
    if (first.tokens.size() != 5)
      throw ParseError(first.number, "expected 'uniform: delta0 delta1 q n'");
    auto d0 = detail::parse_double(first.tokens[1]);
    auto d1 = detail::parse_double(first.tokens[2]);
    auto q = detail::parse_double(first.tokens[3]);
    auto n = detail::parse_uint(first.tokens[4]);
    if (!d0 || !d1 || !q || !n) throw ParseError(first.number, "bad uniform record");
    try {
      return SpamModel::uniform(*n, *d0, *d1, *q);
    } catch (const DomainError& e) {
      throw ParseError(first.number, e.what());
    }
  }
  std::vector<double> d0(lines.size()), d1(lines.size()), q(lines.size());
  std::vector<bool> seen(lines.size(), false);
  for (const auto& line : lines) {
    if (line.tokens.size() != 4)
      throw ParseError(line.number, "expected 'qubit, delta0, delta1, q'");
    auto idx = detail::parse_uint(line.tokens[0]);
    auto a = detail::parse_double(line.tokens[1]);
    auto b = detail::parse_double(line.tokens[2]);
    auto c = detail::parse_double(line.tokens[3]);
    if (!idx || !a || !b || !c) throw ParseError(line.number, "bad qubit record");
    if (*idx >= lines.size()) throw ParseError(line.number, "qubit index out of range");
    if (seen[*idx]) throw ParseError(line.number, "duplicate qubit record");
    seen[*idx] = true;
    d0[*idx] = *a;
    d1[*idx] = *b;
    q[*idx] = *c;
  }
  try {
    return SpamModel(d0, d1, q);
  } catch (const DomainError& e) {
    throw ParseError(0, e.what());
  }
}

/// Outcome distribution over 2^k bit strings; bit j of an index is the j-th
/// measured qubit.
///
/// Measured distributions are validated on construction. Mitigated
/// distributions may contain negative entries (quasi-probabilities); these are
/// kept as-is and reported by `is_quasi()`.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;

  /// Validates non-negativity (to -1e-12) and unit sum (to 1e-9).
  explicit ProbabilityVector(std::vector<double> values) : values_(std::move(values)) {
    check_length();
    for (double v : values_)
      if (!(v >= -1e-12)) throw DomainError("ProbabilityVector: negative entry");
    if (std::abs(total() - 1.0) > 1e-9)
      throw DomainError("ProbabilityVector: entries do not sum to 1");
  }

  /// Wraps the output of a linear mitigation map without validation.
  static ProbabilityVector mitigated(std::vector<double> values) {
    ProbabilityVector p;
    p.values_ = std::move(values);
    p.check_length();
    return p;
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t n_bits() const noexcept {
    return static_cast<std::size_t>(std::countr_zero(values_.size()));
  }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }

  double total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

  bool is_quasi() const {
    return std::any_of(values_.begin(), values_.end(), [](double v) { return v < 0.0; });
  }

  /// Expectation of Z on every bit in `mask`, sum_b p(b) (-1)^{|b & mask|}.
  double parity_expectation(std::uint64_t mask) const {
    double e = 0.0;
    for (std::size_t b = 0; b < values_.size(); ++b)
      e += (std::popcount(b & mask) % 2 ? -1.0 : 1.0) * values_[b];
    return e;
  }

  /// Parity over all bits.
  double parity_expectation() const { return parity_expectation(values_.size() - 1); }

 private:
  void check_length() const {
    if (values_.empty() || !std::has_single_bit(values_.size()))
      throw DimensionError("ProbabilityVector: length must be a power of two");
  }

  std::vector<double> values_;
};

namespace detail {

inline void check_qubit_list(const SpamModel& model, std::span<const std::size_t> qubits,
                             std::size_t limit) {
  if (qubits.size() > limit) throw DomainError("qubit list exceeds dense-size guard");
  std::vector<std::size_t> sorted(qubits.begin(), qubits.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DomainError("duplicate qubit index");
  if (!sorted.empty() && sorted.back() >= model.n_qubits())
    throw DomainError("qubit index outside SPAM model");
}

// Kronecker product with factor j acting on bit j (bit 0 least significant).
inline Eigen::MatrixXd kron_bits(const std::vector<Eigen::Matrix2d>& factors) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(1, 1);
  for (const auto& f : factors) {
    Eigen::MatrixXd next(2 * m.rows(), 2 * m.cols());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        next.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) = f(a, b) * m;
    m = std::move(next);
  }
  return m;
}

}  // namespace detail

/// Per-qubit 2x2 factors of a tensor-product assignment matrix; factor j acts
/// on bit j of the outcome index.
using LocalFactors = std::vector<Eigen::Matrix2d>;

inline LocalFactors readout_factors(const SpamModel& model,
                                    std::span<const std::size_t> qubits) {
  detail::check_qubit_list(model, qubits, 64);
  LocalFactors f;
  for (std::size_t q : qubits) f.push_back(model.readout_matrix(q));
  return f;
}

inline LocalFactors calibrated_factors(const SpamModel& model,
                                       std::span<const std::size_t> qubits) {
  detail::check_qubit_list(model, qubits, 64);
  LocalFactors f;
  for (std::size_t q : qubits) f.push_back(model.calibrated_matrix(q));
  return f;
}

/// Dense tensor product of the readout matrices M_i of `qubits`.
inline Eigen::MatrixXd assignment_matrix(const SpamModel& model,
                                         std::span<const std::size_t> qubits) {
  detail::check_qubit_list(model, qubits, kMaxDenseAssignmentQubits);
  return detail::kron_bits(readout_factors(model, qubits));
}

/// Dense tensor product of M_i Q_i.
inline Eigen::MatrixXd calibrated_assignment_matrix(const SpamModel& model,
                                                    std::span<const std::size_t> qubits) {
  detail::check_qubit_list(model, qubits, kMaxDenseAssignmentQubits);
  return detail::kron_bits(calibrated_factors(model, qubits));
}

/// Applies a tensor-product matrix to a vector in O(k 2^k).
inline std::vector<double> apply_factors(const LocalFactors& factors,
                                         std::span<const double> p) {
  if (p.size() != (std::size_t{1} << factors.size()))
    throw DimensionError("apply_factors: vector length does not match factors");
  std::vector<double> v(p.begin(), p.end());
  for (std::size_t j = 0; j < factors.size(); ++j) {
    const std::size_t bit = std::size_t{1} << j;
    const auto& f = factors[j];
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i & bit) continue;
      const double a = v[i], b = v[i | bit];
      v[i] = f(0, 0) * a + f(0, 1) * b;
      v[i | bit] = f(1, 0) * a + f(1, 1) * b;
    }
  }
  return v;
}

/// Applies an assignment map to an ideal distribution.
inline ProbabilityVector apply_assignment(const LocalFactors& factors,
                                          const ProbabilityVector& p) {
  return ProbabilityVector(apply_factors(factors, p.values()));
}

/// calibration^{-1} p via a dense LU solve. The result is not clipped.
inline ProbabilityVector conventional_qrem(const ProbabilityVector& p,
                                           const Eigen::MatrixXd& calibration) {
  if (calibration.rows() != calibration.cols() ||
      static_cast<std::size_t>(calibration.rows()) != p.size())
    throw DimensionError("conventional_qrem: calibration shape mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(calibration);
  if (!lu.isInvertible()) throw SingularMatrixError("conventional_qrem: singular calibration");
  const Eigen::VectorXd rhs =
      Eigen::Map<const Eigen::VectorXd>(p.values().data(), static_cast<Eigen::Index>(p.size()));
  const Eigen::VectorXd x = lu.solve(rhs);
  return ProbabilityVector::mitigated(std::vector<double>(x.data(), x.data() + x.size()));
}

/// Same map for a tensor-product calibration, inverting each 2x2 factor.
inline ProbabilityVector conventional_qrem(const ProbabilityVector& p,
                                           const LocalFactors& calibration) {
  LocalFactors inv;
  inv.reserve(calibration.size());
  for (const auto& f : calibration) {
    if (std::abs(f.determinant()) < 1e-14)
      throw SingularMatrixError("conventional_qrem: singular calibration factor");
    inv.push_back(f.inverse());
  }
  return ProbabilityVector::mitigated(apply_factors(inv, p.values()));
}

/// Single-qubit corrected <Z>: raw / (1 - 2q).
inline double qrem_z_expectation(double raw_z, double q) {
  if (!(q >= 0.0 && q < 0.5)) throw DomainError("q outside [0, 0.5)");
  return raw_z / (1.0 - 2.0 * q);
}

/// prod_i (1 - 2 q_i)^{-1} over the supported qubits.
inline double qrem_bias_factor(std::span<const double> q_list) {
  double f = 1.0;
  for (double q : q_list) {
    if (!(q >= 0.0 && q < 0.5)) throw DomainError("q outside [0, 0.5)");
    f /= (1.0 - 2.0 * q);
  }
  return f;
}

/// Bias factor for k qubits with identical rate q.
inline double qrem_bias_factor(std::size_t k, double q) {
  const std::vector<double> qs(k, q);
  return qrem_bias_factor(qs);
}

/// Relative error (1 - 2q)^{-n} - 1 of a weight-n corrected observable.
inline double safety_bound_delta(double n, double q) {
  if (!(q >= 0.0 && q < 0.5)) throw DomainError("q outside [0, 0.5)");
  if (n < 0.0) throw DomainError("negative qubit count");
  return std::expm1(-n * std::log1p(-2.0 * q));
}

/// Heterogeneous-rate relative error prod_i (1 - 2q_i)^{-1} - 1.
inline double safety_bound_delta(std::span<const double> q_list) {
  return qrem_bias_factor(q_list) - 1.0;
}

/// First-order estimate 2 sum_i q_i.
inline double first_order_delta(std::span<const double> q_list) {
  double s = 0.0;
  for (double q : q_list) {
    if (!(q >= 0.0 && q < 0.5)) throw DomainError("q outside [0, 0.5)");
    s += q;
  }
  return 2.0 * s;
}

/// Qubit count n* at which (1 - 2q)^{-n*} - 1 reaches `bound`; +inf for q = 0.
inline double bound_contour(double q, double bound) {
  if (!(q >= 0.0 && q < 0.5)) throw DomainError("q outside [0, 0.5)");
  if (!(bound > 0.0)) throw DomainError("bound must be positive");
  if (q == 0.0) return std::numeric_limits<double>::infinity();
  return std::log1p(bound) / -std::log1p(-2.0 * q);
}

}  // namespace qrem
