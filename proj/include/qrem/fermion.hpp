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

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qrem/error.hpp"
#include "qrem/pauli.hpp"

namespace qrem {

enum class ExcitationKind { kSingle, kDouble };

/// Single excitation a†_p a_q or double excitation a†_p a†_q a_r a_s.
/// Only the first two (single) or four (double) entries of `orbitals` are
/// meaningful. `slot` indexes the amplitude in a parameter vector.
struct FermionExcitation {
  ExcitationKind kind = ExcitationKind::kSingle;
  std::array<std::size_t, 4> orbitals{};
  std::size_t slot = 0;

  static FermionExcitation single(std::size_t p, std::size_t q, std::size_t slot = 0) {
    FermionExcitation e{ExcitationKind::kSingle, {p, q, 0, 0}, slot};
    e.validate();
    return e;
  }

  static FermionExcitation double_(std::size_t p, std::size_t q, std::size_t r,
                                   std::size_t s, std::size_t slot = 0) {
    FermionExcitation e{ExcitationKind::kDouble, {p, q, r, s}, slot};
    e.validate();
    return e;
  }

  std::size_t order() const { return kind == ExcitationKind::kSingle ? 2 : 4; }

  std::size_t max_orbital() const {
    std::size_t m = 0;
    for (std::size_t i = 0; i < order(); ++i) m = std::max(m, orbitals[i]);
    return m;
  }

  void validate() const {
    const auto& o = orbitals;
    if (kind == ExcitationKind::kSingle) {
      if (o[0] == o[1]) throw DomainError("single excitation requires p != q");
      return;
    }
    if (!(o[0] > o[1]) || !(o[2] > o[3]))
      throw DomainError("double excitation requires p > q and r > s");
    if (o[0] == o[2] || o[0] == o[3] || o[1] == o[2] || o[1] == o[3])
      throw DomainError("double excitation index pairs must be disjoint");
  }

  friend bool operator==(const FermionExcitation& a, const FermionExcitation& b) {
    if (a.kind != b.kind) return false;
    for (std::size_t i = 0; i < a.order(); ++i)
      if (a.orbitals[i] != b.orbitals[i]) return false;
    return true;
  }
};

namespace detail {

// Complex-coefficient Pauli sum used while multiplying ladder operators.
// Strings are stored with phase +1; phases live in the coefficients.
using ComplexPauliSum = std::vector<std::pair<std::complex<double>, PauliString>>;

inline ComplexPauliSum multiply_sums(const ComplexPauliSum& a, const ComplexPauliSum& b) {
  ComplexPauliSum out;
  for (const auto& [ca, pa] : a) {
    for (const auto& [cb, pb] : b) {
      const PauliString prod = multiply(pa, pb);
      const std::complex<double> c = ca * cb * to_complex(prod.phase());
      const PauliString key = prod.with_phase(Phase::kPlusOne);
      auto it = std::find_if(out.begin(), out.end(),
                             [&](const auto& t) { return t.second == key; });
      if (it == out.end())
        out.emplace_back(c, key);
      else
        it->first += c;
    }
  }
  return out;
}

// Jordan-Wigner ladder operator: a†_j = Z_{<j} (X_j - iY_j)/2,
// a_j = Z_{<j} (X_j + iY_j)/2.
inline ComplexPauliSum ladder(std::size_t n, std::size_t j, bool creation) {
  QubitMask zs;
  for (std::size_t i = 0; i < j; ++i) zs.set(i);
  QubitMask x;
  x.set(j);
  QubitMask zy = zs;
  zy.set(j);
  const double sign = creation ? -1.0 : 1.0;
  return {{{0.5, 0.0}, PauliString(n, x, zs)},
          {{0.0, 0.5 * sign}, PauliString(n, x, zy)}};
}

}  // namespace detail

/// Jordan-Wigner image of the anti-Hermitian generator T - T† for `exc`.
///
/// Every returned term has an imaginary coefficient, stored as a real
/// coefficient on a string with phase +i, so exp(theta * result) is unitary.
inline PauliSumOperator jordan_wigner_excitation(const FermionExcitation& exc,
                                                 std::size_t n_qubits) {
  exc.validate();
  if (exc.max_orbital() >= n_qubits)
    throw DomainError("jordan_wigner_excitation: orbital index out of range");
  const auto& o = exc.orbitals;
  detail::ComplexPauliSum t;
  if (exc.kind == ExcitationKind::kSingle) {
    t = detail::multiply_sums(detail::ladder(n_qubits, o[0], true),
                              detail::ladder(n_qubits, o[1], false));
  } else {
    t = detail::multiply_sums(
        detail::multiply_sums(detail::ladder(n_qubits, o[0], true),
                              detail::ladder(n_qubits, o[1], true)),
        detail::multiply_sums(detail::ladder(n_qubits, o[2], false),
                              detail::ladder(n_qubits, o[3], false)));
  }
  // T† has conjugated coefficients on the same Hermitian strings, so
  // T - T† = sum (c - conj(c)) P = sum 2i Im(c) P.
  std::vector<PauliSumOperator::Term> terms;
  for (const auto& [c, p] : t) {
    const double im = 2.0 * c.imag();
    if (std::abs(im) < 1e-15) continue;
    terms.push_back({im, p.with_phase(Phase::kPlusI)});
  }
  return PauliSumOperator(n_qubits, terms);
}

}  // namespace qrem
