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
 * Dense density-matrix simulation with reset noise, two-qubit depolarizing
 * gate noise and the explicit readout-mitigation measurement pipeline.
 */

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qrem/circuit.hpp"
#include "qrem/error.hpp"
#include "qrem/pauli.hpp"
#include "qrem/spam.hpp"

namespace qrem {

using cplx = std::complex<double>;

/// Default size guard for dense states (a 12-qubit state is ~256 MB).
inline constexpr std::size_t kMaxDenseQubits = 12;

namespace detail {

// Plain complex product; skips the NaN/Inf recovery of operator*.
inline cplx cmul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace detail

class DensityMatrix {
 public:
  DensityMatrix() = default;

  /// |0...0><0...0| on n qubits.
  explicit DensityMatrix(std::size_t n, std::size_t max_qubits = kMaxDenseQubits) : n_(n) {
    guard(n, max_qubits);
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    rho_ = Eigen::MatrixXcd::Zero(dim, dim);
    rho_(0, 0) = 1.0;
  }

  DensityMatrix(std::size_t n, Eigen::MatrixXcd rho, std::size_t max_qubits = kMaxDenseQubits)
      : n_(n), rho_(std::move(rho)) {
    guard(n, max_qubits);
    if (rho_.rows() != dim() || rho_.cols() != dim())
      throw DimensionError("DensityMatrix: matrix shape does not match n");
  }

  /// Pure state |psi><psi|.
  static DensityMatrix pure(std::size_t n, const Eigen::VectorXcd& psi) {
    return DensityMatrix(n, psi * psi.adjoint());
  }

  /// Computational basis state |index>.
  static DensityMatrix basis(std::size_t n, std::uint64_t index) {
    DensityMatrix d(n);
    d.rho_(0, 0) = 0.0;
    d.rho_(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return d;
  }

  std::size_t n_qubits() const noexcept { return n_; }
  Eigen::Index dim() const noexcept { return Eigen::Index{1} << n_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }

  cplx trace() const { return rho_.trace(); }
  double purity() const { return (rho_ * rho_).trace().real(); }

  /// Trace 1, Hermitian and eigenvalues >= -tol_psd.
  bool is_valid(double tol = 1e-9, double tol_psd = 1e-8) const {
    if (std::abs(trace() - cplx(1.0, 0.0)) > tol) return false;
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol_psd;
  }

  /// rho <- U rho U^dagger for a single-qubit U.
  void apply_1q(const Eigen::Matrix2cd& u, std::size_t q) {
    const Eigen::Index bit = Eigen::Index{1} << q;
    const Eigen::Index d = dim();
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = 0; r < d; ++r) {
        if (r & bit) continue;
        const cplx a = rho_(r, c), b = rho_(r | bit, c);
        rho_(r, c) = detail::cmul(u(0, 0), a) + detail::cmul(u(0, 1), b);
        rho_(r | bit, c) = detail::cmul(u(1, 0), a) + detail::cmul(u(1, 1), b);
      }
    }
    const Eigen::Matrix2cd ud = u.conjugate();
    for (Eigen::Index c = 0; c < d; ++c) {
      if (c & bit) continue;
      for (Eigen::Index r = 0; r < d; ++r) {
        const cplx a = rho_(r, c), b = rho_(r, c | bit);
        rho_(r, c) = detail::cmul(a, ud(0, 0)) + detail::cmul(b, ud(0, 1));
        rho_(r, c | bit) = detail::cmul(a, ud(1, 0)) + detail::cmul(b, ud(1, 1));
      }
    }
  }

  /// rho <- D rho D^dagger for diagonal D with entries phase(index).
  template <typename PhaseFn>
  void apply_diagonal(PhaseFn&& phase) {
    const Eigen::Index d = dim();
    std::vector<cplx> p(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = phase(i);
    for (Eigen::Index c = 0; c < d; ++c) {
      const cplx pc = std::conj(p[static_cast<std::size_t>(c)]);
      for (Eigen::Index r = 0; r < d; ++r)
        rho_(r, c) = detail::cmul(rho_(r, c), detail::cmul(p[static_cast<std::size_t>(r)], pc));
    }
  }

  /// rho <- P rho P^T for the basis permutation |i> -> |perm(i)|, perm an
  /// involution.
  template <typename Perm>
  void apply_involution(Perm&& perm) {
    const Eigen::Index d = dim();
    for (Eigen::Index r = 0; r < d; ++r) {
      const Eigen::Index pr = perm(r);
      if (pr > r) rho_.row(r).swap(rho_.row(pr));
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      const Eigen::Index pc = perm(c);
      if (pc > c) rho_.col(c).swap(rho_.col(pc));
    }
  }

  void apply_gate(const Gate& g) {
    const Eigen::Index b0 = Eigen::Index{1} << g.q0;
    const Eigen::Index b1 = Eigen::Index{1} << g.q1;
    switch (g.kind) {
      case GateKind::kH: apply_1q(hadamard(), g.q0); break;
      case GateKind::kHY: apply_1q(hadamard_y(), g.q0); break;
      case GateKind::kX:
        apply_involution([b0](Eigen::Index i) { return i ^ b0; });
        break;
      case GateKind::kRZ: {
        const cplx lo = std::polar(1.0, -g.angle / 2.0), hi = std::polar(1.0, g.angle / 2.0);
        apply_diagonal([=](Eigen::Index i) { return (i & b0) ? hi : lo; });
        break;
      }
      case GateKind::kCNOT:
        apply_involution([b0, b1](Eigen::Index i) { return (i & b0) ? (i ^ b1) : i; });
        break;
      case GateKind::kCZ:
        apply_diagonal([b0, b1](Eigen::Index i) {
          return ((i & b0) && (i & b1)) ? cplx(-1.0, 0.0) : cplx(1.0, 0.0);
        });
        break;
    }
  }

  /// rho <- U rho U^dagger with U = exp(i theta P) = cos(theta) + i sin(theta) P,
  /// in one pass. Equals the compiled gate sequence for the same rotation.
  void apply_pauli_rotation(const PauliString& p, double theta) {
    if (p.n_qubits() != n_) throw DimensionError("apply_pauli_rotation: size mismatch");
    if (!p.is_hermitian()) throw DomainError("apply_pauli_rotation: string must be Hermitian");
    if (p.is_identity()) return;
    const auto x = static_cast<Eigen::Index>(to_u64(p.x_bits()));
    const std::uint64_t z = to_u64(p.z_bits());
    const cplx base = to_complex(phase_from_exponent(
        exponent(p.phase()) + static_cast<int>((p.x_bits() & p.z_bits()).count())));
    const Eigen::Index d = dim();
    std::vector<cplx> omega(static_cast<std::size_t>(d));  // P|c> = omega[c] |c ^ x>
    for (Eigen::Index c = 0; c < d; ++c)
      omega[static_cast<std::size_t>(c)] =
          (std::popcount(static_cast<std::uint64_t>(c) & z) % 2) ? -base : base;
    const double co = std::cos(theta), si = std::sin(theta);
    const cplx isin(0.0, si);
    // Left factor: (U rho)(r, .) = cos rho(r, .) + i sin omega[r ^ x] rho(r ^ x, .).
    std::vector<cplx> f(static_cast<std::size_t>(d));
    for (Eigen::Index r = 0; r < d; ++r)
      f[static_cast<std::size_t>(r)] = isin * omega[static_cast<std::size_t>(r ^ x)];
    for (Eigen::Index c = 0; c < d; ++c) {
      cplx* col = rho_.col(c).data();
      if (x == 0) {
        for (Eigen::Index r = 0; r < d; ++r) col[r] *= co + f[static_cast<std::size_t>(r)];
        continue;
      }
      for (Eigen::Index r = 0; r < d; ++r) {
        const Eigen::Index rx = r ^ x;
        if (rx < r) continue;
        const cplx a = col[r], b = col[rx];
        col[r] = co * a + detail::cmul(f[static_cast<std::size_t>(r)], b);
        col[rx] = co * b + detail::cmul(f[static_cast<std::size_t>(rx)], a);
      }
    }
    // Right factor: (A U^dagger)(., c) = cos A(., c) - i sin omega[c] A(., c ^ x).
    for (Eigen::Index c = 0; c < d; ++c) {
      const Eigen::Index cx = c ^ x;
      const cplx gc = -isin * omega[static_cast<std::size_t>(c)];
      if (x == 0) {
        rho_.col(c) *= co + gc;
        continue;
      }
      if (cx < c) continue;
      const cplx gx = -isin * omega[static_cast<std::size_t>(cx)];
      cplx* pc = rho_.col(c).data();
      cplx* px = rho_.col(cx).data();
      for (Eigen::Index r = 0; r < d; ++r) {
        const cplx a = pc[r], b = px[r];
        pc[r] = co * a + detail::cmul(gc, b);
        px[r] = co * b + detail::cmul(gx, a);
      }
    }
  }

  /// rho <- (1 - rate) rho + rate * (Tr_{a,b} rho) (x) I/4.
  void depolarize_pair(std::size_t a, std::size_t b, double rate) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("depolarizing rate outside [0, 1]");
    if (rate == 0.0) return;
    const Eigen::Index ba = Eigen::Index{1} << a, bb = Eigen::Index{1} << b;
    const Eigen::Index pair = ba | bb;
    const Eigen::Index d = dim();
    const cplx keep(1.0 - rate, 0.0);
    Eigen::MatrixXcd out = keep * rho_;
    const Eigen::Index local[4] = {0, ba, bb, ba | bb};
    for (Eigen::Index c = 0; c < d; ++c) {
      if (c & pair) continue;
      for (Eigen::Index r = 0; r < d; ++r) {
        if (r & pair) continue;
        cplx tr = 0.0;
        for (Eigen::Index k : local) tr += rho_(r | k, c | k);
        const cplx add = rate * 0.25 * tr;
        for (Eigen::Index k : local) out(r | k, c | k) += add;
      }
    }
    rho_ = std::move(out);
  }

  static Eigen::Matrix2cd hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd h;
    h << s, s, s, -s;
    return h;
  }

  static Eigen::Matrix2cd hadamard_y() {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd h;
    h << cplx(s, 0), cplx(0, -s), cplx(0, s), cplx(-s, 0);
    return h;
  }

 private:
  static void guard(std::size_t n, std::size_t max_qubits) {
    if (n > std::min(max_qubits, kMaxDenseQubits))
      throw DomainError("DensityMatrix: n exceeds dense-size guard");
  }

  std::size_t n_ = 0;
  Eigen::MatrixXcd rho_;
};

/// Reset-noise state prod_i diag(1 - q_i, q_i).
inline DensityMatrix noisy_initial_state(std::size_t n, std::span<const double> q_list,
                                         std::size_t max_qubits = kMaxDenseQubits) {
  if (q_list.size() != n) throw DimensionError("noisy_initial_state: q_list length mismatch");
  for (double q : q_list)
    if (!(q >= 0.0 && q < 0.5)) throw DomainError("initialization rate outside [0, 0.5)");
  DensityMatrix d(n, max_qubits);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d.dim(), d.dim());
  for (Eigen::Index i = 0; i < d.dim(); ++i) {
    double p = 1.0;
    for (std::size_t k = 0; k < n; ++k) p *= ((i >> k) & 1) ? q_list[k] : 1.0 - q_list[k];
    rho(i, i) = p;
  }
  return DensityMatrix(n, std::move(rho), max_qubits);
}

/// Gate-by-gate evolution. With `gate_noise`, every two-qubit gate is followed
/// by depolarizing at that rate on its pair.
inline DensityMatrix apply_circuit(DensityMatrix rho, const Circuit& c,
                                   std::optional<double> gate_noise = std::nullopt) {
  if (rho.n_qubits() != c.n_qubits()) throw DimensionError("apply_circuit: size mismatch");
  for (const Gate& g : c.gates()) {
    rho.apply_gate(g);
    if (gate_noise && g.is_two_qubit()) rho.depolarize_pair(g.q0, g.q1, *gate_noise);
  }
  return rho;
}

namespace detail {

// P|c> = omega(c)|c ^ x>, omega(c) = i^{phase + #Y} (-1)^{|c & z|}, so
// Tr(rho P) = sum_c omega(c) rho(c, c ^ x).
inline cplx trace_with_pauli(const Eigen::MatrixXcd& rho, const PauliString& p) {
  const std::uint64_t x = to_u64(p.x_bits()), z = to_u64(p.z_bits());
  const cplx base = to_complex(phase_from_exponent(
      exponent(p.phase()) + static_cast<int>((p.x_bits() & p.z_bits()).count())));
  cplx acc = 0.0;
  for (Eigen::Index c = 0; c < rho.rows(); ++c) {
    const auto uc = static_cast<std::uint64_t>(c);
    const double s = (std::popcount(uc & z) % 2) ? -1.0 : 1.0;
    acc += s * rho(c, static_cast<Eigen::Index>(uc ^ x));
  }
  return base * acc;
}

}  // namespace detail

/// Tr(rho P).
inline cplx expectation(const DensityMatrix& rho, const PauliString& p) {
  if (rho.n_qubits() != p.n_qubits()) throw DimensionError("expectation: size mismatch");
  return detail::trace_with_pauli(rho.matrix(), p);
}

/// sum_i c_i Tr(rho P_i). Throws if the imaginary residue exceeds 1e-9.
inline double expectation(const DensityMatrix& rho, const PauliSumOperator& obs) {
  if (rho.n_qubits() != obs.n_qubits()) throw DimensionError("expectation: size mismatch");
  cplx total = 0.0;
  for (const auto& t : obs.terms()) total += t.coefficient * expectation(rho, t.string);
  if (std::abs(total.imag()) > 1e-9)
    throw DomainError("expectation: observable is not Hermitian");
  return total.real();
}

/// Reduced density matrix on `qubits`; local bit j is qubits[j].
inline Eigen::MatrixXcd reduced_density_matrix(const DensityMatrix& rho,
                                               std::span<const std::size_t> qubits) {
  const std::size_t n = rho.n_qubits(), k = qubits.size();
  std::uint64_t keep_mask = 0;
  for (std::size_t q : qubits) keep_mask |= std::uint64_t{1} << q;
  std::vector<std::uint64_t> keep(std::size_t{1} << k, 0), rest;
  for (std::size_t s = 0; s < keep.size(); ++s)
    for (std::size_t j = 0; j < k; ++j)
      if ((s >> j) & 1U) keep[s] |= std::uint64_t{1} << qubits[j];
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i)
    if ((i & keep_mask) == 0) rest.push_back(i);
  const auto dk = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXcd red = Eigen::MatrixXcd::Zero(dk, dk);
  const Eigen::MatrixXcd& m = rho.matrix();
  for (Eigen::Index b = 0; b < dk; ++b)
    for (Eigen::Index a = 0; a < dk; ++a) {
      cplx acc = 0.0;
      for (std::uint64_t r : rest)
        acc += m(static_cast<Eigen::Index>(keep[static_cast<std::size_t>(a)] | r),
                 static_cast<Eigen::Index>(keep[static_cast<std::size_t>(b)] | r));
      red(a, b) = acc;
    }
  return red;
}

inline constexpr std::size_t kMaxMeasuredQubits = 12;

/// Outcome distribution of measuring `obs` through the full readout path:
/// the support is rotated to the Z basis (H for X, HY for Y), the diagonal
/// of the reduced state is read off and the readout matrices M_i are
/// applied. Bit j is the j-th support qubit.
///
/// The rotated diagonal is p(b) = 2^-k sum_T (-1)^{|b & T|} Tr(rho P_T), P_T
/// the restriction of `obs` to the support subset T; the 2^k traces are
/// turned into p by a Walsh-Hadamard transform, O(2^{n+k}) in total.
inline ProbabilityVector measured_distribution(const DensityMatrix& rho, const PauliString& obs,
                                               const SpamModel& spam) {
  if (rho.n_qubits() != obs.n_qubits()) throw DimensionError("qrem_measure: size mismatch");
  const auto support = obs.support_qubits();
  const std::size_t k = support.size();
  if (k > kMaxMeasuredQubits) throw DomainError("qrem_measure: support too large");
  const std::size_t dk = std::size_t{1} << k;
  std::vector<double> p(dk);
  for (std::size_t t = 0; t < dk; ++t) {
    QubitMask x, z;
    for (std::size_t j = 0; j < k; ++j) {
      if (!((t >> j) & 1U)) continue;
      if (obs.x_bits().test(support[j])) x.set(support[j]);
      if (obs.z_bits().test(support[j])) z.set(support[j]);
    }
    p[t] = detail::trace_with_pauli(rho.matrix(), PauliString(obs.n_qubits(), x, z)).real();
  }
  for (std::size_t h = 1; h < dk; h <<= 1)
    for (std::size_t i = 0; i < dk; ++i)
      if (!(i & h)) {
        const double a = p[i], b = p[i | h];
        p[i] = a + b;
        p[i | h] = a - b;
      }
  double total = 0.0;
  for (double& v : p) {
    v = std::max(0.0, v / static_cast<double>(dk));
    total += v;
  }
  for (double& v : p) v /= total;
  return apply_assignment(readout_factors(spam, support), ProbabilityVector(std::move(p)));
}

/// QREM-corrected <obs>: the measured distribution is mitigated with the
/// inverse of the calibrated matrices M_i Q_i and the parity is returned.
inline double qrem_measure(const DensityMatrix& rho, const PauliString& obs,
                           const SpamModel& spam) {
  if (!obs.is_hermitian()) throw DomainError("qrem_measure: observable must be Hermitian");
  if (spam.n_qubits() != rho.n_qubits()) throw DimensionError("qrem_measure: SPAM size mismatch");
  const double sign = obs.phase() == Phase::kMinusOne ? -1.0 : 1.0;
  if (obs.is_identity()) return sign * rho.trace().real();
  const auto support = obs.support_qubits();
  const ProbabilityVector noisy = measured_distribution(rho, obs, spam);
  const ProbabilityVector corrected =
      conventional_qrem(noisy, calibrated_factors(spam, support));
  return sign * corrected.parity_expectation();
}

/// sum_i c_i qrem_measure(rho, P_i).
inline double qrem_energy(const DensityMatrix& rho, const PauliSumOperator& h,
                          const SpamModel& spam) {
  double e = 0.0;
  for (const auto& t : h.terms()) e += t.coefficient * qrem_measure(rho, t.string, spam);
  return e;
}

/// Dense 2^n x 2^n matrix of a Pauli sum (complex coefficients allowed).
inline Eigen::MatrixXcd dense_matrix(const PauliSumOperator& h) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << h.n_qubits());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    const std::uint64_t x = to_u64(t.string.x_bits()), z = to_u64(t.string.z_bits());
    const cplx base = t.coefficient * to_complex(phase_from_exponent(
                                          exponent(t.string.phase()) +
                                          static_cast<int>((t.string.x_bits() & t.string.z_bits()).count())));
    for (Eigen::Index c = 0; c < dim; ++c) {
      const auto uc = static_cast<std::uint64_t>(c);
      const double s = (std::popcount(uc & z) % 2) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(uc ^ x), c) += s * base;
    }
  }
  return m;
}

/// exp(i H t) from the Hermitian eigendecomposition of dense H.
inline Eigen::MatrixXcd exact_propagator(const PauliSumOperator& h, double t) {
  if (h.n_qubits() > kMaxDenseQubits) throw DomainError("exact_propagator: size guard");
  if (!h.is_hermitian()) throw DomainError("exact_propagator: Hamiltonian must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h));
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<cplx>() * cplx(0.0, t)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline Eigen::VectorXcd exact_evolution(const PauliSumOperator& h, double t,
                                        const Eigen::VectorXcd& psi) {
  return exact_propagator(h, t) * psi;
}

inline DensityMatrix exact_evolution(const PauliSumOperator& h, double t,
                                     const DensityMatrix& rho) {
  if (h.n_qubits() != rho.n_qubits()) throw DimensionError("exact_evolution: size mismatch");
  const Eigen::MatrixXcd u = exact_propagator(h, t);
  return DensityMatrix(rho.n_qubits(), u * rho.matrix() * u.adjoint());
}

}  // namespace qrem
